#include "qpi/recon.hpp"

#include <cmath>

#include "qpi/fft.hpp"
#include "qpi/field_ops.hpp"

namespace qpi::recon {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Sub-pixel peak offset from three samples via the vertex of the parabola
// through (-1, m0), (0, m1), (1, m2), clamped to half a bin.
double parabolic_offset(double m0, double m1, double m2) {
    const double denom = m0 - 2.0 * m1 + m2;
    if (denom == 0.0) return 0.0;
    double off = 0.5 * (m0 - m2) / denom;
    return std::max(-0.5, std::min(0.5, off));
}

struct SubCosts {
    double data;
    double smooth;
};

SubCosts eval_costs(const RealField& h, const ComplexField& o, const ComplexField& r,
                    double delta, ComplexField& gx, ComplexField& gy) {
    double cd = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double res = h[i] - std::norm(r[i] + o[i]);
        cd += res * res;
    }
    gradient(o, gx, gy);
    double cs = 0.0;
    const double inv_d2 = 1.0 / (delta * delta);
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double g2 = std::norm(gx[i]) + std::norm(gy[i]);
        cs += std::sqrt(1.0 + g2 * inv_d2) - 1.0;
    }
    return {cd, cs};
}

} // namespace

void ReconConfig::validate() const {
    if (window_radius < 0.0)
        throw InvalidConfigurationError("recon: window radius must be nonnegative");
    if (delta_scale <= 0.0)
        throw InvalidConfigurationError("recon: delta scale must be positive");
    if (fixed_delta < 0.0)
        throw InvalidConfigurationError("recon: fixed delta must be nonnegative");
    if (max_outer_iterations < 1 || data_steps_per_iteration < 0 ||
        smooth_steps_per_iteration < 0 || max_halvings < 1)
        throw InvalidConfigurationError("recon: invalid iteration counts");
    if (relative_tolerance < 0.0 || armijo_sigma <= 0.0 || armijo_sigma >= 1.0)
        throw InvalidConfigurationError("recon: invalid tolerance parameters");
}

ComplexField ReferenceBeam::render(const Grid& grid) const {
    ComplexField ref(grid);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x)
            ref.at(x, y) = std::polar(amplitude, kTwoPi * (tilt_fx * x + tilt_fy * y));
    return ref;
}

ReferenceBeam calibrate_reference(const RealField& calibration_hologram) {
    const int w = calibration_hologram.width(), h = calibration_hologram.height();
    ComplexField input(calibration_hologram.grid());
    for (std::size_t i = 0; i < input.size(); ++i) input[i] = calibration_hologram[i];
    ComplexField spectrum = fft2(input);

    RealField mag(spectrum.grid());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(spectrum[i]);

    // Strongest bin excluding DC itself; closeness to DC is checked after.
    int bx = -1, by = -1;
    double best = -1.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x == 0 && y == 0) continue;
            if (mag.at(x, y) > best) {
                best = mag.at(x, y);
                bx = x;
                by = y;
            }
        }
    }
    const auto bin_dist = [](int k, int n) {
        const int m = ((k % n) + n) % n;
        return std::min(m, n - m);
    };
    const int dc_dist2 = bin_dist(bx, w) * bin_dist(bx, w) + bin_dist(by, h) * bin_dist(by, h);
    if (dc_dist2 <= 9)
        throw CalibrationFailureError(
            "carrier peak within 3 bins of DC; tilt too small to separate terms");

    const auto wrap_idx = [](int k, int n) { return ((k % n) + n) % n; };
    const double ox = parabolic_offset(mag.at(wrap_idx(bx - 1, w), by), mag.at(bx, by),
                                       mag.at(wrap_idx(bx + 1, w), by));
    const double oy = parabolic_offset(mag.at(bx, wrap_idx(by - 1, h)), mag.at(bx, by),
                                       mag.at(bx, wrap_idx(by + 1, h)));

    double fx = bin_frequency(bx, w) + ox / w;
    double fy = bin_frequency(by, h) + oy / h;
    // The spectrum of a real hologram is Hermitian; pick the lobe in the
    // fy > 0 half-plane (fx > 0 on the fy == 0 line).
    if (fy < 0.0 || (fy == 0.0 && fx < 0.0)) {
        fx = -fx;
        fy = -fy;
    }

    ReferenceBeam ref;
    ref.tilt_fx = fx;
    ref.tilt_fy = fy;
    ref.amplitude = std::sqrt(mean(calibration_hologram) / 2.0);
    return ref;
}

ComplexField fourier_reconstruct(const RealField& hologram, const ReferenceBeam& ref,
                                 double window_radius) {
    if (ref.amplitude <= 0.0)
        throw InvalidConfigurationError("fourier_reconstruct: nonpositive reference amplitude");
    const double fmag = std::hypot(ref.tilt_fx, ref.tilt_fy);
    double radius = window_radius > 0.0 ? window_radius : fmag / 2.0;
    if (radius <= 0.0)
        throw InvalidConfigurationError("fourier_reconstruct: window radius is zero");

    // The R*O term of |R + O|^2 sits at -f; windowing there and dividing by
    // conj(R) demodulates with the sub-pixel tilt handled exactly.
    const double cfx = -ref.tilt_fx, cfy = -ref.tilt_fy;
    if (std::hypot(frequency_distance(cfx, 0.0), frequency_distance(cfy, 0.0)) <= radius)
        throw InvalidConfigurationError(
            "fourier_reconstruct: sideband window overlaps the DC term");

    const int w = hologram.width(), h = hologram.height();
    ComplexField input(hologram.grid());
    for (std::size_t i = 0; i < input.size(); ++i) input[i] = hologram[i];
    ComplexField spectrum = fft2(input);

    const double r2 = radius * radius;
    for (int y = 0; y < h; ++y) {
        const double dy = frequency_distance(bin_frequency(y, h), cfy);
        for (int x = 0; x < w; ++x) {
            const double dx = frequency_distance(bin_frequency(x, w), cfx);
            if (dx * dx + dy * dy > r2) spectrum.at(x, y) = 0.0;
        }
    }

    ComplexField lobe = ifft2(spectrum);
    ComplexField ref_field = ref.render(hologram.grid());
    ComplexField object(hologram.grid());
    for (std::size_t i = 0; i < object.size(); ++i)
        object[i] = lobe[i] / std::conj(ref_field[i]);
    return object;
}

double select_delta(const ComplexField& object, double scale) {
    if (scale <= 0.0) throw InvalidConfigurationError("select_delta: scale must be positive");
    auto [gx, gy] = gradient(object);
    std::vector<double> mags(object.size());
    for (std::size_t i = 0; i < mags.size(); ++i)
        mags[i] = std::sqrt(std::norm(gx[i]) + std::norm(gy[i]));
    const double med = median(std::move(mags));
    if (med <= 0.0)
        throw DegenerateInputError("select_delta: median gradient magnitude is zero");
    return scale * med;
}

CostBreakdown cost(const RealField& hologram, const ComplexField& object,
                   const ComplexField& reference, double delta) {
    require_same_grid(hologram.grid(), object.grid(), "cost");
    require_same_grid(hologram.grid(), reference.grid(), "cost");
    if (delta <= 0.0) throw InvalidConfigurationError("cost: delta must be positive");
    ComplexField gx(object.grid()), gy(object.grid());
    SubCosts c = eval_costs(hologram, object, reference, delta, gx, gy);
    return {c.data, c.smooth};
}

void cost_gradient(const RealField& hologram, const ComplexField& object,
                   const ComplexField& reference, double delta,
                   ComplexField& grad_data, ComplexField& grad_smooth) {
    require_same_grid(hologram.grid(), object.grid(), "cost_gradient");
    require_same_grid(hologram.grid(), reference.grid(), "cost_gradient");
    if (delta <= 0.0) throw InvalidConfigurationError("cost_gradient: delta must be positive");
    grad_data = ComplexField(object.grid());
    for (std::size_t i = 0; i < object.size(); ++i) {
        const std::complex<double> s = reference[i] + object[i];
        const double res = hologram[i] - std::norm(s);
        grad_data[i] = -2.0 * res * s;
    }

    auto [gx, gy] = gradient(object);
    const double inv_d2 = 1.0 / (delta * delta);
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double g2 = std::norm(gx[i]) + std::norm(gy[i]);
        const double wgt = inv_d2 / std::sqrt(1.0 + g2 * inv_d2);
        gx[i] *= wgt;
        gy[i] *= wgt;
    }
    grad_smooth = ComplexField(object.grid());
    divergence(gx, gy, grad_smooth);
    for (auto& v : grad_smooth) v *= -0.5;
}

namespace {

// One backtracking gradient step on one term. The step must produce an
// Armijo decrease of its own term and must not increase the total cost
// (guard that keeps the recorded trace monotone when delta refreshes).
// Returns the accepted step size, or 0 when backtracking exhausts.
double descend(const RealField& h, ComplexField& o, const ComplexField& r, double delta,
               const ComplexField& g, bool data_term, double prev_step,
               const ReconConfig& cfg) {
    double gn2 = 0.0;
    for (const auto& v : g) gn2 += std::norm(v);
    if (!(gn2 > 0.0)) return 0.0;

    ComplexField gx(o.grid()), gy(o.grid());
    const SubCosts f0 = eval_costs(h, o, r, delta, gx, gy);
    const double sub0 = data_term ? f0.data : f0.smooth;
    const double tot0 = f0.data + f0.smooth;
    if (!std::isfinite(tot0))
        throw DivergenceError("optimization cost is not finite");

    ComplexField trial(o.grid());
    double t = std::max(prev_step * 2.0, 1e-300);
    for (int k = 0; k < cfg.max_halvings; ++k, t *= 0.5) {
        for (std::size_t i = 0; i < o.size(); ++i) trial[i] = o[i] - t * g[i];
        const SubCosts f = eval_costs(h, trial, r, delta, gx, gy);
        const double sub = data_term ? f.data : f.smooth;
        const double tot = f.data + f.smooth;
        if (!std::isfinite(tot)) continue;
        // d/dt of the term along -g at t=0 is -2 |g|^2.
        if (sub <= sub0 - 2.0 * cfg.armijo_sigma * t * gn2 && tot <= tot0) {
            o = std::move(trial);
            return t;
        }
    }
    return 0.0;
}

} // namespace

ReconResult optimize_reconstruct(const RealField& hologram, const ReferenceBeam& ref,
                                 const ReconConfig& config,
                                 const std::optional<ComplexField>& initial) {
    config.validate();
    ComplexField object = initial ? *initial
                                  : fourier_reconstruct(hologram, ref, config.window_radius);
    require_same_grid(hologram.grid(), object.grid(), "optimize_reconstruct");
    ComplexField reference = ref.render(hologram.grid());

    ReconResult result;
    result.trace.reserve(config.max_outer_iterations);
    double delta = 0.0;
    double step_data = 0.0, step_smooth = 0.25;
    // Conservative first data step: the data-term curvature is bounded by a
    // few times the peak hologram intensity.
    double hmax = 0.0;
    for (const auto& v : hologram) hmax = std::max(hmax, std::fabs(v));
    step_data = 1.0 / (16.0 * std::max(hmax, 1e-12));

    ComplexField grad_data, grad_smooth;
    for (int outer = 0; outer < config.max_outer_iterations; ++outer) {
        // Refreshing delta re-scales the smoothness term; clamping it
        // non-decreasing keeps the refresh from raising the recorded cost.
        if (config.fixed_delta > 0.0) {
            delta = config.fixed_delta;
        } else {
            try {
                delta = std::max(select_delta(object, config.delta_scale), delta);
            } catch (const DegenerateInputError&) {
                if (delta <= 0.0) throw;
            }
        }

        for (int s = 0; s < config.data_steps_per_iteration; ++s) {
            cost_gradient(hologram, object, reference, delta, grad_data, grad_smooth);
            const double t = descend(hologram, object, reference, delta, grad_data, true,
                                     step_data, config);
            if (t > 0.0) step_data = t;
        }
        for (int s = 0; s < config.smooth_steps_per_iteration; ++s) {
            cost_gradient(hologram, object, reference, delta, grad_data, grad_smooth);
            const double t = descend(hologram, object, reference, delta, grad_smooth, false,
                                     step_smooth, config);
            if (t > 0.0) step_smooth = t;
        }

        const CostBreakdown cb = cost(hologram, object, reference, delta);
        if (!std::isfinite(cb.total()))
            throw DivergenceError("optimization cost diverged");
        result.trace.push_back({outer, cb.data, cb.smooth, cb.total(), delta, step_data,
                                step_smooth});
        if (outer > 0) {
            const double prev = result.trace[outer - 1].total_cost;
            if (std::fabs(prev - cb.total()) <= config.relative_tolerance * std::fabs(prev))
                break;
        }
    }
    result.object = std::move(object);
    return result;
}

PhaseMap wrapped_phase(const ComplexField& object, RealField* validity) {
    PhaseMap pm;
    pm.values = RealField(object.grid());
    pm.wrapped = true;
    if (validity) *validity = RealField(object.grid(), 1.0);
    for (std::size_t i = 0; i < object.size(); ++i) {
        if (object[i] == std::complex<double>(0.0, 0.0)) {
            pm.values[i] = 0.0;
            if (validity) (*validity)[i] = 0.0;
            continue;
        }
        double ph = std::atan2(object[i].imag(), object[i].real());
        if (ph <= -kPi) ph = kPi; // principal range (-pi, pi]
        pm.values[i] = ph;
    }
    return pm;
}

} // namespace qpi::recon
