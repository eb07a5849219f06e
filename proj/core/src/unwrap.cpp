#include "qpi/unwrap.hpp"

#include <algorithm>
#include <cmath>

#include "qpi/fft.hpp"
#include "qpi/field_ops.hpp"

namespace qpi::unwrap {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

} // namespace

double wrap_to_principal(double x) {
    double w = std::fmod(x + kPi, kTwoPi);
    if (w <= 0.0) w += kTwoPi;
    return w - kPi;
}

void normalize_offset(RealField& phase) {
    std::vector<double> v(phase.begin(), phase.end());
    const std::size_t k = std::max<std::size_t>(1, v.size() / 10);
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += v[i];
    const double floor_mean = sum / static_cast<double>(k);
    for (auto& p : phase) p -= floor_mean;
}

PhaseMap unwrap_phase(const PhaseMap& wrapped) {
    if (!wrapped.wrapped)
        throw InvalidInputError("unwrap_phase: input is already unwrapped");
    const RealField& w = wrapped.values;
    const int W = w.width(), H = w.height();

    // Wrapped forward differences: the least-squares target gradient.
    RealField dx(w.grid(), 0.0), dy(w.grid(), 0.0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x + 1 < W; ++x)
            dx.at(x, y) = wrap_to_principal(w.at(x + 1, y) - w.at(x, y));
    for (int y = 0; y + 1 < H; ++y)
        for (int x = 0; x < W; ++x)
            dy.at(x, y) = wrap_to_principal(w.at(x, y + 1) - w.at(x, y));

    // Normal equations: (D^T D) u = D^T d. divergence() is -(D^T .), so the
    // right-hand side is -div and the operator eigenvalues are positive.
    RealField rhs = divergence(dx, dy);
    for (auto& v : rhs) v = -v;

    RealField spectrum = dct2(rhs);
    for (int q = 0; q < H; ++q) {
        const double ly = 2.0 - 2.0 * std::cos(kPi * q / H);
        for (int p = 0; p < W; ++p) {
            if (p == 0 && q == 0) {
                spectrum.at(0, 0) = 0.0; // mean is not determined by gradients
                continue;
            }
            const double lx = 2.0 - 2.0 * std::cos(kPi * p / W);
            spectrum.at(p, q) /= lx + ly;
        }
    }

    PhaseMap out;
    out.values = idct2(spectrum);
    out.wrapped = false;
    normalize_offset(out.values);
    return out;
}

} // namespace qpi::unwrap
