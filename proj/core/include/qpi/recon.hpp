#pragma once

#include <optional>
#include <vector>

#include "qpi/field.hpp"

namespace qpi::recon {

// Carrier estimate recovered from a no-sample hologram.
struct ReferenceBeam {
    double amplitude = 1.0;
    double tilt_fx = 0.0; // cycles/pixel
    double tilt_fy = 0.0;

    ComplexField render(const Grid& grid) const;
};

struct ReconConfig {
    double window_radius = 0.0;     // cycles/pixel; 0 selects |f|/2 automatically
    double delta_scale = 1.0;       // c in delta = c * median gradient magnitude
    double fixed_delta = 0.0;       // > 0 pins delta, bypassing select_delta
    int max_outer_iterations = 200;
    int data_steps_per_iteration = 5;
    int smooth_steps_per_iteration = 1;
    double relative_tolerance = 1e-6;
    double armijo_sigma = 1e-4;
    int max_halvings = 40;

    void validate() const;
};

// Cost of one optimization state: data term, smoothness term, total.
struct CostBreakdown {
    double data = 0.0;
    double smooth = 0.0;
    double total() const { return data + smooth; }
};

// One record per outer iteration.
struct TracePoint {
    int iteration = 0;
    double data_cost = 0.0;
    double smooth_cost = 0.0;
    double total_cost = 0.0;
    double delta = 0.0;
    double data_step = 0.0;
    double smooth_step = 0.0;
};

struct ReconResult {
    ComplexField object;
    std::vector<TracePoint> trace;
};

// Estimates carrier tilt and amplitude from a no-sample hologram: strongest
// non-DC spectral bin, refined to sub-pixel by separable parabolic fits, sign
// normalized into the fy > 0 (or fy == 0, fx > 0) half-plane. Amplitude is
// the balanced-arm estimate sqrt(mean(H) / 2), exact when |O| == R0 and
// biased otherwise. A peak within 3 bins of DC is a calibration failure.
ReferenceBeam calibrate_reference(const RealField& calibration_hologram);

// Baseline reconstruction: isolate the +1 carrier lobe with a hard circular
// window in the spectrum, inverse transform, divide by conj(R). Resolution is
// limited to the window radius.
ComplexField fourier_reconstruct(const RealField& hologram, const ReferenceBeam& ref,
                                 double window_radius = 0.0);

// delta = scale * median over pixels of |grad O|. Degenerate when the median
// vanishes (more than half the gradient field flat).
double select_delta(const ComplexField& object, double scale);

// C_data = sum (H - |R + O|^2)^2,
// C_smooth = sum (sqrt(1 + |grad O|^2 / delta^2) - 1).
CostBreakdown cost(const RealField& hologram, const ComplexField& object,
                   const ComplexField& reference, double delta);

// Conjugate-convention gradients: for a perturbation dO the first-order cost
// change is 2 Re <g, dO>. data part: -2 (H - |R + O|^2) (R + O);
// smooth part: -1/2 div(w gx, w gy), w = 1 / (delta^2 sqrt(1 + |grad O|^2 / delta^2)).
void cost_gradient(const RealField& hologram, const ComplexField& object,
                   const ComplexField& reference, double delta,
                   ComplexField& grad_data, ComplexField& grad_smooth);

// Alternating minimization: per outer iteration, backtracking gradient steps
// on the data term then the smoothness term. Accepted steps must satisfy an
// Armijo decrease of their own term and never increase the total cost, and
// delta is refreshed but never lowered across iterations, so the recorded
// total-cost trace is non-increasing. A refresh whose median degenerates
// keeps the previous delta (first iteration rethrows; a fixed_delta avoids
// both). Starts from fourier_reconstruct unless an initial object is
// supplied.
ReconResult optimize_reconstruct(const RealField& hologram, const ReferenceBeam& ref,
                                 const ReconConfig& config = {},
                                 const std::optional<ComplexField>& initial = std::nullopt);

// Pixelwise arg(O) in (-pi, pi]. Zero-magnitude pixels get phase 0 and, when
// a validity field is supplied, validity 0 (1 elsewhere).
PhaseMap wrapped_phase(const ComplexField& object, RealField* validity = nullptr);

} // namespace qpi::recon
