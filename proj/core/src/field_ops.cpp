#include "qpi/field_ops.hpp"

#include <algorithm>
#include <numeric>

namespace qpi {

template <typename T>
void gradient(const Field<T>& f, Field<T>& gx, Field<T>& gy) {
    require_same_grid(f.grid(), gx.grid(), "gradient");
    require_same_grid(f.grid(), gy.grid(), "gradient");
    const int w = f.width(), h = f.height();
    for (int y = 0; y < h; ++y) {
        const T* row = f.data() + static_cast<std::size_t>(y) * w;
        T* gxr = gx.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w - 1; ++x) gxr[x] = row[x + 1] - row[x];
        gxr[w - 1] = T{};
    }
    for (int y = 0; y < h - 1; ++y) {
        const T* row = f.data() + static_cast<std::size_t>(y) * w;
        const T* next = row + w;
        T* gyr = gy.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) gyr[x] = next[x] - row[x];
    }
    T* last = gy.data() + static_cast<std::size_t>(h - 1) * w;
    std::fill(last, last + w, T{});
}

// Negative adjoint of the forward-difference gradient. Derived entrywise:
// (Dx^T g)[y, 0] = -g[y, 0], interior g[y, x-1] - g[y, x], last column
// g[y, w-2]; divergence = -(Dx^T gx + Dy^T gy).
template <typename T>
void divergence(const Field<T>& gx, const Field<T>& gy, Field<T>& out) {
    require_same_grid(gx.grid(), gy.grid(), "divergence");
    require_same_grid(gx.grid(), out.grid(), "divergence");
    const int w = gx.width(), h = gx.height();
    for (int y = 0; y < h; ++y) {
        const T* gxr = gx.data() + static_cast<std::size_t>(y) * w;
        T* o = out.data() + static_cast<std::size_t>(y) * w;
        o[0] = gxr[0];
        for (int x = 1; x < w - 1; ++x) o[x] = gxr[x] - gxr[x - 1];
        if (w > 1) o[w - 1] = -gxr[w - 2];
    }
    for (int y = 0; y < h; ++y) {
        const T* gyr = gy.data() + static_cast<std::size_t>(y) * w;
        T* o = out.data() + static_cast<std::size_t>(y) * w;
        if (y == 0) {
            for (int x = 0; x < w; ++x) o[x] += gyr[x];
        } else if (y == h - 1) {
            const T* prev = gy.data() + static_cast<std::size_t>(y - 1) * w;
            for (int x = 0; x < w; ++x) o[x] += -prev[x];
        } else {
            const T* prev = gy.data() + static_cast<std::size_t>(y - 1) * w;
            for (int x = 0; x < w; ++x) o[x] += gyr[x] - prev[x];
        }
    }
}

template void gradient<double>(const Field<double>&, Field<double>&, Field<double>&);
template void gradient<std::complex<double>>(const Field<std::complex<double>>&,
                                             Field<std::complex<double>>&,
                                             Field<std::complex<double>>&);
template void divergence<double>(const Field<double>&, const Field<double>&, Field<double>&);
template void divergence<std::complex<double>>(const Field<std::complex<double>>&,
                                               const Field<std::complex<double>>&,
                                               Field<std::complex<double>>&);

double mean(const RealField& f) {
    return std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
}

double median(std::vector<double> values) {
    if (values.empty()) throw DegenerateInputError("median of empty value set");
    const std::size_t n = values.size();
    auto mid = values.begin() + n / 2;
    std::nth_element(values.begin(), mid, values.end());
    double hi = *mid;
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(values.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace qpi
