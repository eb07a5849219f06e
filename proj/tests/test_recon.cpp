#include <doctest.h>

#include <cmath>

#include "qpi/field_ops.hpp"
#include "qpi/holo.hpp"
#include "qpi/recon.hpp"
#include "qpi/unwrap.hpp"

#include "oracles.hpp"
#include "testutil.hpp"

using namespace qpi;
using namespace qpi::recon;

namespace {

holo::OpticalConfig optics_64() {
    holo::OpticalConfig o;
    o.width = 64;
    o.height = 64;
    o.tilt_fx = 0.25;    // bin 16
    o.tilt_fy = 0.1875;  // bin 12
    return o;
}

// No-sample calibration frame: unit object arm against the tilted reference.
RealField calibration_frame(const holo::OpticalConfig& o) {
    ComplexField flat({o.width, o.height}, {1.0, 0.0});
    return holo::synthesize_hologram(flat, o);
}

// Direct cost evaluation from the definitions, independent of the library.
double direct_cost(const RealField& h, const ComplexField& o, const ComplexField& r,
                   double delta) {
    double c1 = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double res = h[i] - std::norm(r[i] + o[i]);
        c1 += res * res;
    }
    double c2 = 0.0;
    const int w = o.width(), hh = o.height();
    for (int y = 0; y < hh; ++y)
        for (int x = 0; x < w; ++x) {
            const std::complex<double> gx =
                x + 1 < w ? o.at(x + 1, y) - o.at(x, y) : std::complex<double>{};
            const std::complex<double> gy =
                y + 1 < hh ? o.at(x, y + 1) - o.at(x, y) : std::complex<double>{};
            const double g2 = std::norm(gx) + std::norm(gy);
            c2 += std::sqrt(1.0 + g2 / (delta * delta)) - 1.0;
        }
    return c1 + c2;
}

} // namespace

TEST_CASE("calibration recovers an on-bin carrier exactly") {
    holo::OpticalConfig o = optics_64();
    o.reference_amplitude = 1.0;
    ReferenceBeam ref = calibrate_reference(calibration_frame(o));
    CHECK(ref.tilt_fx == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(ref.tilt_fy == doctest::Approx(0.1875).epsilon(1e-12));
    // Balanced arms: mean(H) = R0^2 + |O|^2 = 2, so the estimate is exact.
    CHECK(ref.amplitude == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("calibration amplitude follows the balanced-arm closed form") {
    holo::OpticalConfig o = optics_64();
    o.reference_amplitude = 2.0;
    RealField h = calibration_frame(o);
    // Integer fringe periods: the cosine averages out, mean(H) = R0^2 + 1.
    CHECK(mean(h) == doctest::Approx(5.0).epsilon(1e-12));
    ReferenceBeam ref = calibrate_reference(h);
    // The estimator assumes balanced arms, so here it is biased by design:
    // sqrt(mean(H)/2) = sqrt(2.5), not 2.
    CHECK(ref.amplitude == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
}

TEST_CASE("calibration refines off-bin carriers to sub-bin accuracy") {
    holo::OpticalConfig o = optics_64();
    o.tilt_fx = 0.25 + 0.37 / 64.0;
    o.tilt_fy = 0.1875 - 0.29 / 64.0;
    ReferenceBeam ref = calibrate_reference(calibration_frame(o));
    CHECK(std::fabs(ref.tilt_fx - o.tilt_fx) < 0.3 / 64.0);
    CHECK(std::fabs(ref.tilt_fy - o.tilt_fy) < 0.3 / 64.0);
}

TEST_CASE("calibration normalizes the carrier into the fy > 0 half-plane") {
    holo::OpticalConfig o = optics_64();
    o.tilt_fx = -0.25;
    o.tilt_fy = -0.1875;
    ReferenceBeam ref = calibrate_reference(calibration_frame(o));
    CHECK(ref.tilt_fy > 0.0);
    CHECK(ref.tilt_fx == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(ref.tilt_fy == doctest::Approx(0.1875).epsilon(1e-12));
}

TEST_CASE("zero tilt cannot be calibrated") {
    // A tiltless frame concentrates everything at and around DC.
    holo::OpticalConfig o = optics_64();
    ComplexField flat({o.width, o.height}, {1.0, 0.0});
    ComplexField ref({o.width, o.height}, {1.0, 0.0});
    RealField h({o.width, o.height});
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::norm(ref[i] + flat[i]);
    CHECK_THROWS_AS(calibrate_reference(h), CalibrationFailureError);

    // Tilt of one bin: the carrier sits 1 bin from DC, still too close.
    holo::OpticalConfig tiny = optics_64();
    tiny.tilt_fx = 1.0 / 64.0;
    tiny.tilt_fy = 1.0 / 64.0;
    CHECK_THROWS_AS(calibrate_reference(calibration_frame(tiny)), CalibrationFailureError);
}

TEST_CASE("fourier_reconstruct recovers a flat object almost exactly") {
    holo::OpticalConfig o = optics_64();
    ComplexField flat({o.width, o.height}, {1.0, 0.0});
    RealField h = holo::synthesize_hologram(flat, o);
    ReferenceBeam ref = calibrate_reference(h);
    ComplexField rec = fourier_reconstruct(h, ref);
    CHECK(testutil::max_abs_diff(rec, flat) < 1e-9);
}

TEST_CASE("fourier_reconstruct window must exclude DC") {
    holo::OpticalConfig o = optics_64();
    RealField h = calibration_frame(o);
    ReferenceBeam ref = calibrate_reference(h);
    const double fmag = std::hypot(ref.tilt_fx, ref.tilt_fy);
    CHECK_THROWS_AS(fourier_reconstruct(h, ref, fmag * 1.01), InvalidConfigurationError);
    CHECK_NOTHROW(fourier_reconstruct(h, ref, fmag * 0.5));
}

TEST_CASE("fourier_reconstruct keeps a smooth dome within 0.1 rad masked RMSE") {
    holo::OpticalConfig o;
    o.width = 128;
    o.height = 128;
    holo::PhantomSpec spec = holo::PhantomSpec::for_class(holo::PhantomClass::SmoothLarge);
    spec.nucleus_radius_px = 21.0;
    spec.texture_amplitude_rad = 0.0;
    holo::PhantomTruth t = holo::make_phantom(spec, o, 17);
    RealField h = holo::synthesize_hologram(t.object, o);
    ReferenceBeam ref = calibrate_reference(calibration_frame(o));
    ComplexField rec = fourier_reconstruct(h, ref);
    PhaseMap wrapped = wrapped_phase(rec);
    PhaseMap un = unwrap::unwrap_phase(wrapped);
    CHECK(testutil::masked_rmse(un.values, t.phase, &t.mask.values) < 0.1);
}

TEST_CASE("cost is zero for the exact object and penalty vanishes when flat") {
    holo::OpticalConfig o = optics_64();
    ComplexField obj = testutil::random_complex_field(o.width, o.height, 21);
    RealField h = holo::synthesize_hologram(obj, o);
    ComplexField r = holo::make_reference(o);
    CostBreakdown cb = cost(h, obj, r, 1.0);
    CHECK(cb.data == doctest::Approx(0.0).epsilon(1e-18));
    CHECK(cb.smooth > 0.0);

    ComplexField flat({o.width, o.height}, {0.7, -0.2});
    RealField hf = holo::synthesize_hologram(flat, o);
    CostBreakdown cf = cost(hf, flat, r, 0.5);
    CHECK(cf.data == 0.0);
    CHECK(cf.smooth == 0.0);
}

TEST_CASE("cost matches a direct evaluation on random states") {
    holo::OpticalConfig o = optics_64();
    ComplexField obj = testutil::random_complex_field(o.width, o.height, 31);
    ComplexField guess = testutil::random_complex_field(o.width, o.height, 32);
    RealField h = holo::synthesize_hologram(obj, o);
    ComplexField r = holo::make_reference(o);
    for (double delta : {0.3, 1.0, 7.5}) {
        CostBreakdown cb = cost(h, guess, r, delta);
        CHECK(cb.total() == doctest::Approx(direct_cost(h, guess, r, delta)).epsilon(1e-12));
    }
}

TEST_CASE("smoothness cost approaches its quadratic and linear limits") {
    ComplexField obj = testutil::random_complex_field(24, 24, 5);
    RealField h({24, 24}, 1.0);
    ComplexField r({24, 24}, {1.0, 0.0});

    auto [gx, gy] = gradient(obj);
    double quad = 0.0, lin = 0.0, gmax = 0.0, gmin = 1e300;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double g2 = std::norm(gx[i]) + std::norm(gy[i]);
        quad += g2;
        lin += std::sqrt(g2);
        gmax = std::max(gmax, std::sqrt(g2));
        if (g2 > 0.0) gmin = std::min(gmin, std::sqrt(g2));
    }

    const double big = 1e4 * gmax;
    CHECK(cost(h, obj, r, big).smooth ==
          doctest::Approx(quad / (2.0 * big * big)).epsilon(1e-6));

    const double small = 1e-4 * gmin;
    // For delta much below every gradient the penalty tends to sum |g|/delta.
    CHECK(cost(h, obj, r, small).smooth == doctest::Approx(lin / small).epsilon(1e-3));
}

TEST_CASE("cost_gradient satisfies the finite-difference contract") {
    // dC = 2 Re <g, dO>: a real pixel perturbation changes the cost by
    // 2 eps Re(g), an imaginary one by 2 eps Im(g).
    holo::OpticalConfig o;
    o.width = 32;
    o.height = 32;
    o.tilt_fx = 0.25;
    o.tilt_fy = 0.1875;
    ComplexField truth = testutil::random_complex_field(32, 32, 8);
    RealField h = holo::synthesize_hologram(truth, o);
    ComplexField r = holo::make_reference(o);
    ComplexField obj = testutil::random_complex_field(32, 32, 9);
    const double delta = select_delta(obj, 1.0);

    ComplexField gd, gs;
    cost_gradient(h, obj, r, delta, gd, gs);

    Rng rng(77);
    const double eps = 1e-5;
    for (int probe = 0; probe < 12; ++probe) {
        const std::size_t p = rng.below(obj.size());
        ComplexField plus = obj, minus = obj;
        const bool real_dir = probe % 2 == 0;
        const std::complex<double> step =
            real_dir ? std::complex<double>(eps, 0.0) : std::complex<double>(0.0, eps);
        plus[p] += step;
        minus[p] -= step;
        const double fd = (cost(h, plus, r, delta).total() -
                           cost(h, minus, r, delta).total()) /
                          (2.0 * eps);
        const std::complex<double> g = gd[p] + gs[p];
        const double analytic = real_dir ? 2.0 * g.real() : 2.0 * g.imag();
        CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
    }
}

TEST_CASE("penalty gradient reduces to the scaled Laplacian for large delta") {
    ComplexField obj = testutil::random_complex_field(16, 16, 3);
    RealField h({16, 16}, 1.0);
    ComplexField r({16, 16}, {1.0, 0.0});
    auto [gx, gy] = gradient(obj);
    double gmax = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i)
        gmax = std::max(gmax, std::sqrt(std::norm(gx[i]) + std::norm(gy[i])));
    const double delta = 1e4 * gmax;

    ComplexField gd, gs;
    cost_gradient(h, obj, r, delta, gd, gs);
    ComplexField lap = divergence(gx, gy);
    // Full real-parameterization gradient 2 g_smooth tends to -lap/delta^2.
    for (std::size_t i = 0; i < gs.size(); ++i) {
        const std::complex<double> expect = -lap[i] / (delta * delta);
        CHECK(std::abs(2.0 * gs[i] - expect) < 1e-6 * std::abs(expect) + 1e-300);
    }
}

TEST_CASE("gradient vanishes at an exact flat solution") {
    holo::OpticalConfig o = optics_64();
    ComplexField flat({o.width, o.height}, {0.9, 0.1});
    RealField h = holo::synthesize_hologram(flat, o);
    ComplexField r = holo::make_reference(o);
    ComplexField gd, gs;
    cost_gradient(h, flat, r, 1.0, gd, gs);
    for (std::size_t i = 0; i < gd.size(); ++i) {
        CHECK(std::abs(gd[i]) == 0.0);
        CHECK(std::abs(gs[i]) == 0.0);
    }
}

TEST_CASE("select_delta is the scaled median gradient magnitude") {
    ComplexField obj = testutil::random_complex_field(15, 13, 6);
    auto [gx, gy] = gradient(obj);
    std::vector<double> mags;
    for (std::size_t i = 0; i < gx.size(); ++i)
        mags.push_back(std::sqrt(std::norm(gx[i]) + std::norm(gy[i])));
    const double med = oracle::median_sorted(mags);
    CHECK(select_delta(obj, 1.0) == doctest::Approx(med).epsilon(1e-12));
    CHECK(select_delta(obj, 2.5) == doctest::Approx(2.5 * med).epsilon(1e-12));

    ComplexField flat({8, 8}, {1.0, 0.0});
    CHECK_THROWS_AS(select_delta(flat, 1.0), DegenerateInputError);
}

TEST_CASE("optimize_reconstruct: trace is non-increasing and beats the baseline") {
    holo::OpticalConfig o;
    o.width = 128;
    o.height = 128;
    holo::PhantomSpec spec = holo::PhantomSpec::for_class(holo::PhantomClass::SmoothLarge);
    spec.nucleus_radius_px = 21.0;
    spec.peak_phase_rad = 2.5;
    spec.texture_amplitude_rad = 0.0;
    holo::PhantomTruth t = holo::make_phantom(spec, o, 23);
    RealField h = holo::synthesize_hologram(t.object, o);
    ReferenceBeam ref = calibrate_reference(calibration_frame(o));

    ReconConfig cfg;
    cfg.max_outer_iterations = 60;
    ReconResult res = optimize_reconstruct(h, ref, cfg);
    REQUIRE(res.trace.size() > 2);
    for (std::size_t k = 1; k < res.trace.size(); ++k)
        CHECK(res.trace[k].total_cost <= res.trace[k - 1].total_cost * (1.0 + 1e-12));
    // Delta never decreases across outer iterations.
    for (std::size_t k = 1; k < res.trace.size(); ++k)
        CHECK(res.trace[k].delta >= res.trace[k - 1].delta);

    PhaseMap opt_un = unwrap::unwrap_phase(wrapped_phase(res.object));
    CHECK(testutil::masked_rmse(opt_un.values, t.phase, &t.mask.values) < 0.05);

    ComplexField baseline = fourier_reconstruct(h, ref);
    PhaseMap base_un = unwrap::unwrap_phase(wrapped_phase(baseline));
    CHECK(testutil::masked_rmse(opt_un.values, t.phase, &t.mask.values) <
          testutil::masked_rmse(base_un.values, t.phase, &t.mask.values));
}

TEST_CASE("optimize_reconstruct sharpens a hard phase step beyond the baseline") {
    holo::OpticalConfig o;
    o.width = 128;
    o.height = 128;
    const int cx = 64, cy = 64;
    const double step_height = 1.2, radius = 24.0;
    ComplexField obj({128, 128});
    RealField truth({128, 128}, 0.0);
    Field<std::uint8_t> mask({128, 128}, 0);
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x) {
            const bool in = std::hypot(x - cx, y - cy) <= radius;
            truth.at(x, y) = in ? step_height : 0.0;
            mask.at(x, y) = in;
            obj.at(x, y) = std::polar(1.0, truth.at(x, y));
        }
    RealField h = holo::synthesize_hologram(obj, o);
    ReferenceBeam ref = calibrate_reference(calibration_frame(o));

    ReconConfig cfg;
    cfg.max_outer_iterations = 80;
    ReconResult res = optimize_reconstruct(h, ref, cfg);
    PhaseMap opt_un = unwrap::unwrap_phase(wrapped_phase(res.object));
    PhaseMap base_un = unwrap::unwrap_phase(wrapped_phase(fourier_reconstruct(h, ref)));
    const double e_opt = testutil::masked_rmse(opt_un.values, truth, nullptr);
    const double e_base = testutil::masked_rmse(base_un.values, truth, nullptr);
    CHECK(e_opt < e_base);
}

TEST_CASE("optimize_reconstruct stays put when started at a smooth exact solution") {
    holo::OpticalConfig o = optics_64();
    holo::PhantomSpec spec = holo::PhantomSpec::for_class(holo::PhantomClass::SmoothSmall);
    spec.nucleus_radius_px = 14.0;
    spec.peak_phase_rad = 0.3;
    spec.texture_amplitude_rad = 0.0;
    holo::PhantomTruth t = holo::make_phantom(spec, o, 4);
    RealField h = holo::synthesize_hologram(t.object, o);
    ReferenceBeam ref;
    ref.amplitude = 1.0;
    ref.tilt_fx = o.tilt_fx;
    ref.tilt_fy = o.tilt_fy;

    ReconConfig cfg;
    cfg.max_outer_iterations = 10;
    cfg.fixed_delta = 0.05;
    ReconResult res = optimize_reconstruct(h, ref, cfg, t.object);
    double sum_h2 = 0.0;
    for (const auto& v : h) sum_h2 += v * v;
    for (std::size_t k = 1; k < res.trace.size(); ++k)
        CHECK(res.trace[k].total_cost <= res.trace[k - 1].total_cost * (1.0 + 1e-12));
    // The data term stays negligible against the hologram energy and the
    // object stays close to the input.
    CHECK(res.trace.back().data_cost < 1e-3 * sum_h2);
    CHECK(testutil::max_abs_diff(res.object, t.object) < 0.05);
}

TEST_CASE("persistent non-finite cost raises a divergence error") {
    holo::OpticalConfig o = optics_64();
    RealField h({o.width, o.height}, 1e200); // residual squares overflow
    ReferenceBeam ref;
    ref.amplitude = 1.0;
    ref.tilt_fx = o.tilt_fx;
    ref.tilt_fy = o.tilt_fy;
    holo::PhantomSpec spec = holo::PhantomSpec::for_class(holo::PhantomClass::SmoothSmall);
    spec.nucleus_radius_px = 14.0;
    holo::PhantomTruth t = holo::make_phantom(spec, o, 2);
    ReconConfig cfg;
    cfg.max_outer_iterations = 3;
    cfg.fixed_delta = 1.0;
    CHECK_THROWS_AS(optimize_reconstruct(h, ref, cfg, t.object), DivergenceError);
}

TEST_CASE("wrapped_phase maps into (-pi, pi] and flags zero pixels") {
    ComplexField f({4, 1});
    f.at(0, 0) = {1.0, 0.0};   // 0
    f.at(1, 0) = {-1.0, 0.0};  // pi, not -pi
    f.at(2, 0) = {0.0, -1.0};  // -pi/2
    f.at(3, 0) = {0.0, 0.0};   // undefined -> 0, invalid
    RealField validity;
    PhaseMap pm = wrapped_phase(f, &validity);
    CHECK(pm.wrapped);
    CHECK(pm.values.at(0, 0) == 0.0);
    CHECK(pm.values.at(1, 0) == doctest::Approx(M_PI));
    CHECK(pm.values.at(2, 0) == doctest::Approx(-M_PI / 2));
    CHECK(pm.values.at(3, 0) == 0.0);
    CHECK(validity.at(0, 0) == 1.0);
    CHECK(validity.at(3, 0) == 0.0);

    ComplexField r = testutil::random_complex_field(9, 9, 14);
    PhaseMap pr = wrapped_phase(r);
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(pr.values[i] > -M_PI);
        CHECK(pr.values[i] <= M_PI);
        CHECK(pr.values[i] ==
              doctest::Approx(std::atan2(r[i].imag(), r[i].real())).epsilon(1e-15));
    }
}

TEST_CASE("reconstruction of an offset ROI from a larger frame matches truth") {
    // A 256 ROI cut from a 384 frame carries a constant carrier phase offset;
    // the unwrap floor normalization removes it, so masked phase agrees with
    // truth without any global registration.
    holo::OpticalConfig full;
    full.width = 384;
    full.height = 384;
    holo::PhantomSpec spec = holo::PhantomSpec::for_class(holo::PhantomClass::SmoothLarge);
    spec.texture_amplitude_rad = 0.0;
    holo::PhantomTruth t = holo::make_phantom(spec, full, 31);
    RealField h = holo::synthesize_hologram(t.object, full);

    ReferenceBeam ref = calibrate_reference(calibration_frame(full));

    const int off = 64, side = 256;
    RealField roi({side, side});
    RealField truth_roi({side, side});
    Field<std::uint8_t> mask_roi({side, side}, 0);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            roi.at(x, y) = h.at(x + off, y + off);
            truth_roi.at(x, y) = t.phase.at(x + off, y + off);
            mask_roi.at(x, y) = t.mask.values.at(x + off, y + off);
        }

    ComplexField rec = fourier_reconstruct(roi, ref);
    PhaseMap un = unwrap::unwrap_phase(wrapped_phase(rec));
    CHECK(testutil::masked_rmse(un.values, truth_roi, &mask_roi) < 0.1);
}
