#pragma once

#include <cstdint>
#include <string>

#include "qpi/field.hpp"

namespace qpi::holo {

// Off-axis acquisition geometry. Tilt frequencies are in cycles/pixel;
// wavelength and pixel pitch are carried as metadata only, the math is in
// pixel and radian units throughout.
struct OpticalConfig {
    int width = 256;
    int height = 256;
    double pixel_pitch_um = 3.5;
    double wavelength_um = 0.650;
    double reference_amplitude = 1.0;
    double tilt_fx = 0.203125;  // cycles/pixel along x
    double tilt_fy = 0.1484375; // cycles/pixel along y

    void validate() const;
};

enum class PhantomClass { SmoothSmall, SmoothLarge, TexturedAbnormal };

PhantomClass phantom_class_from_label(const std::string& label);
std::string phantom_class_label(PhantomClass c);

// Per-class phantom parameters. Classes share brightfield appearance by
// design; they differ in phase height and texture so that only phase-derived
// features separate them.
struct PhantomSpec {
    PhantomClass cls = PhantomClass::SmoothSmall;
    double nucleus_radius_px = 42.0;
    double peak_phase_rad = 1.1;
    double texture_amplitude_rad = 0.05;   // std of the masked texture component
    double texture_corr_length_px = 6.0;   // Gaussian spectral filter width
    double inner_transmittance = 0.92;     // object amplitude inside the nucleus
    double brightfield_noise_sigma = 2.0;  // 8-bit sensor noise, each channel
    std::uint8_t nucleus_rgb[3] = {96, 64, 128};
    std::uint8_t background_rgb[3] = {204, 176, 212};

    void validate(const OpticalConfig& optics) const;

    static PhantomSpec for_class(PhantomClass c);
};

// Ground truth emitted alongside each synthetic nucleus.
struct PhantomTruth {
    ComplexField object;      // complex transmission O
    RealField phase;          // unwrapped truth phase, radians
    NucleusMask mask;         // truth support
    RgbImage brightfield;     // noisy color view, same ROI
    double center_x = 0.0;
    double center_y = 0.0;
};

// Tilted plane reference R(x, y) = R0 exp(i 2 pi (fx x + fy y)).
ComplexField make_reference(const OpticalConfig& optics);

// Synthesizes one phantom nucleus: cos^2 dome phase profile of the given
// peak height plus band-limited texture inside a centered disk mask, with
// the matching brightfield view. Deterministic in (spec, optics, seed).
PhantomTruth make_phantom(const PhantomSpec& spec, const OpticalConfig& optics,
                          std::uint64_t seed);

// H = |R + O|^2, optionally with additive Gaussian sensor noise (sigma in
// the same intensity units as H, clamped at 0).
RealField synthesize_hologram(const ComplexField& object, const OpticalConfig& optics,
                              double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

} // namespace qpi::holo
