#include "qpi/holo.hpp"

#include <cmath>

#include "qpi/fft.hpp"
#include "qpi/rng.hpp"

namespace qpi::holo {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Band-limited unit-variance noise: white Gaussian field filtered by a
// Gaussian transfer function exp(-2 pi^2 L^2 |f|^2), then normalized to
// mean 0 / std 1 over the full grid. L is the correlation length in pixels.
RealField correlated_noise(const Grid& grid, double corr_length, Rng& rng) {
    ComplexField white(grid);
    for (auto& v : white) v = {rng.gaussian(), 0.0};
    ComplexField spectrum = fft2(white);
    const int w = grid.width, h = grid.height;
    for (int y = 0; y < h; ++y) {
        const double fy = bin_frequency(y, h);
        for (int x = 0; x < w; ++x) {
            const double fx = bin_frequency(x, w);
            const double f2 = fx * fx + fy * fy;
            spectrum.at(x, y) *= std::exp(-2.0 * kPi * kPi * corr_length * corr_length * f2);
        }
    }
    ComplexField filtered = ifft2(spectrum);
    RealField out(grid);
    double sum = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = filtered[i].real();
        sum += out[i];
    }
    const double m = sum / out.size();
    double var = 0.0;
    for (auto& v : out) {
        v -= m;
        var += v * v;
    }
    var /= out.size();
    const double sd = std::sqrt(var);
    if (sd > 0.0)
        for (auto& v : out) v /= sd;
    return out;
}

} // namespace

void OpticalConfig::validate() const {
    if (width <= 0 || height <= 0)
        throw InvalidConfigurationError("optics: grid dimensions must be positive");
    if (reference_amplitude <= 0.0)
        throw InvalidConfigurationError("optics: reference amplitude must be positive");
    if (pixel_pitch_um <= 0.0 || wavelength_um <= 0.0)
        throw InvalidConfigurationError("optics: pitch and wavelength must be positive");
    const double t = std::fabs(tilt_fx) + std::fabs(tilt_fy);
    if (t <= 0.0 || t >= 1.0)
        throw InvalidConfigurationError(
            "optics: tilt must satisfy 0 < |fx| + |fy| < 1 cycles/pixel");
}

PhantomClass phantom_class_from_label(const std::string& label) {
    if (label == "smooth-small") return PhantomClass::SmoothSmall;
    if (label == "smooth-large") return PhantomClass::SmoothLarge;
    if (label == "textured-abnormal") return PhantomClass::TexturedAbnormal;
    throw InvalidInputError("unknown phantom class: " + label);
}

std::string phantom_class_label(PhantomClass c) {
    switch (c) {
        case PhantomClass::SmoothSmall: return "smooth-small";
        case PhantomClass::SmoothLarge: return "smooth-large";
        case PhantomClass::TexturedAbnormal: return "textured-abnormal";
    }
    throw InvalidInputError("unknown phantom class value");
}

PhantomSpec PhantomSpec::for_class(PhantomClass c) {
    PhantomSpec s;
    s.cls = c;
    switch (c) {
        case PhantomClass::SmoothSmall:
            s.peak_phase_rad = 1.1;
            s.texture_amplitude_rad = 0.05;
            s.texture_corr_length_px = 6.0;
            break;
        case PhantomClass::SmoothLarge:
            s.peak_phase_rad = 2.2;
            s.texture_amplitude_rad = 0.05;
            s.texture_corr_length_px = 8.0;
            break;
        case PhantomClass::TexturedAbnormal:
            s.peak_phase_rad = 3.8;
            s.texture_amplitude_rad = 0.5;
            s.texture_corr_length_px = 3.0;
            break;
    }
    return s;
}

void PhantomSpec::validate(const OpticalConfig& optics) const {
    optics.validate();
    if (nucleus_radius_px <= 1.0)
        throw InvalidConfigurationError("phantom: nucleus radius must exceed 1 px");
    if (2.0 * nucleus_radius_px >= std::min(optics.width, optics.height))
        throw InvalidConfigurationError("phantom: nucleus does not fit in the ROI");
    if (peak_phase_rad <= 0.0)
        throw InvalidConfigurationError("phantom: peak phase must be positive");
    if (texture_amplitude_rad < 0.0 || texture_corr_length_px <= 0.0)
        throw InvalidConfigurationError("phantom: invalid texture parameters");
    if (inner_transmittance <= 0.0 || inner_transmittance > 1.0)
        throw InvalidConfigurationError("phantom: transmittance must be in (0, 1]");
}

ComplexField make_reference(const OpticalConfig& optics) {
    optics.validate();
    ComplexField ref({optics.width, optics.height});
    for (int y = 0; y < optics.height; ++y) {
        for (int x = 0; x < optics.width; ++x) {
            const double ph = kTwoPi * (optics.tilt_fx * x + optics.tilt_fy * y);
            ref.at(x, y) = std::polar(optics.reference_amplitude, ph);
        }
    }
    return ref;
}

PhantomTruth make_phantom(const PhantomSpec& spec, const OpticalConfig& optics,
                          std::uint64_t seed) {
    spec.validate(optics);
    const Grid grid{optics.width, optics.height};
    const int cx = optics.width / 2, cy = optics.height / 2;
    const double r0 = spec.nucleus_radius_px;

    PhantomTruth t;
    t.center_x = cx;
    t.center_y = cy;
    t.mask.values = Field<std::uint8_t>(grid, 0);
    t.phase = RealField(grid, 0.0);
    t.object = ComplexField(grid);
    t.brightfield.grid = grid;
    t.brightfield.pixels.assign(grid.size() * 3, 0);

    Rng texture_rng(mix_seed(seed, 0x7e78));
    Rng bf_rng(mix_seed(seed, 0xb41e));
    RealField texture = spec.texture_amplitude_rad > 0.0
                            ? correlated_noise(grid, spec.texture_corr_length_px, texture_rng)
                            : RealField(grid, 0.0);

    int area = 0;
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double r = std::sqrt(dx * dx + dy * dy);
            const bool inside = r <= r0;
            double phase = 0.0;
            if (inside) {
                const double dome = std::cos(0.5 * kPi * r / r0);
                phase = spec.peak_phase_rad * dome * dome +
                        spec.texture_amplitude_rad * texture.at(x, y);
                t.mask.values.at(x, y) = 1;
                ++area;
            }
            t.phase.at(x, y) = phase;
            const double amp = inside ? spec.inner_transmittance : 1.0;
            t.object.at(x, y) = std::polar(amp, phase);

            const std::uint8_t* base = inside ? spec.nucleus_rgb : spec.background_rgb;
            for (int c = 0; c < 3; ++c) {
                double v = base[c];
                if (spec.brightfield_noise_sigma > 0.0)
                    v += spec.brightfield_noise_sigma * bf_rng.gaussian();
                v = std::max(0.0, std::min(255.0, std::round(v)));
                t.brightfield.pixels[t.brightfield.index(x, y) + c] =
                    static_cast<std::uint8_t>(v);
            }
        }
    }
    t.mask.area = area;
    return t;
}

RealField synthesize_hologram(const ComplexField& object, const OpticalConfig& optics,
                              double noise_sigma, std::uint64_t noise_seed) {
    optics.validate();
    require_same_grid(object.grid(), {optics.width, optics.height}, "synthesize_hologram");
    if (noise_sigma < 0.0)
        throw InvalidConfigurationError("hologram noise sigma must be nonnegative");
    ComplexField ref = make_reference(optics);
    RealField h(object.grid());
    Rng rng(mix_seed(noise_seed, 0x5e45));
    for (std::size_t i = 0; i < h.size(); ++i) {
        const std::complex<double> s = ref[i] + object[i];
        double v = std::norm(s);
        if (noise_sigma > 0.0) v = std::max(0.0, v + noise_sigma * rng.gaussian());
        h[i] = v;
    }
    return h;
}

} // namespace qpi::holo
