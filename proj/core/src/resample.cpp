#include "qpi/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qpi {
namespace {

// Keys cubic convolution kernel with a = -0.5.
double cubic(double t) {
    t = std::fabs(t);
    if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

struct Tap {
    int first;                  // first source index (clamped later)
    std::vector<double> weight; // normalized weights
};

// Precomputed taps for one axis.
std::vector<Tap> make_taps(int src_n, int dst_n, double scale) {
    const double kernel_scale = scale < 1.0 ? scale : 1.0;
    const double support = 2.0 / kernel_scale;
    std::vector<Tap> taps(dst_n);
    for (int d = 0; d < dst_n; ++d) {
        const double center = (d + 0.5) / scale - 0.5;
        const int first = static_cast<int>(std::ceil(center - support));
        const int last = static_cast<int>(std::floor(center + support));
        Tap& tap = taps[d];
        tap.first = first;
        tap.weight.resize(last - first + 1);
        double sum = 0.0;
        for (int s = first; s <= last; ++s) {
            const double w = kernel_scale * cubic((s - center) * kernel_scale);
            tap.weight[s - first] = w;
            sum += w;
        }
        if (sum != 0.0)
            for (auto& w : tap.weight) w /= sum;
        (void)src_n;
    }
    return taps;
}

// Resamples along x only, to dst_w columns.
RealField resample_rows(const RealField& f, int dst_w, double scale) {
    const int w = f.width(), h = f.height();
    const auto taps = make_taps(w, dst_w, scale);
    RealField out({dst_w, h});
    for (int y = 0; y < h; ++y) {
        const double* row = f.data() + static_cast<std::size_t>(y) * w;
        double* orow = out.data() + static_cast<std::size_t>(y) * dst_w;
        for (int d = 0; d < dst_w; ++d) {
            const Tap& tap = taps[d];
            double acc = 0.0;
            for (std::size_t k = 0; k < tap.weight.size(); ++k) {
                const int s = std::clamp(tap.first + static_cast<int>(k), 0, w - 1);
                acc += tap.weight[k] * row[s];
            }
            orow[d] = acc;
        }
    }
    return out;
}

RealField transpose(const RealField& f) {
    RealField out({f.height(), f.width()});
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x) out.at(y, x) = f.at(x, y);
    return out;
}

} // namespace

RealField resample_bicubic(const RealField& f, double scale) {
    if (scale <= 0.0)
        throw InvalidInputError("resample: scale must be positive");
    const int dst_w = static_cast<int>(std::ceil(scale * f.width()));
    const int dst_h = static_cast<int>(std::ceil(scale * f.height()));
    if (dst_w < 1 || dst_h < 1)
        throw InvalidInputError("resample: output would be empty");
    RealField rows = resample_rows(f, dst_w, scale);
    RealField cols = resample_rows(transpose(rows), dst_h, scale);
    return transpose(cols);
}

Field<std::uint8_t> resample_mask(const Field<std::uint8_t>& mask, double scale) {
    RealField real(mask.grid());
    for (std::size_t i = 0; i < mask.size(); ++i) real[i] = mask[i];
    RealField scaled = resample_bicubic(real, scale);
    Field<std::uint8_t> out(scaled.grid(), 0);
    for (std::size_t i = 0; i < scaled.size(); ++i) out[i] = scaled[i] >= 0.5 ? 1 : 0;
    return out;
}

} // namespace qpi
