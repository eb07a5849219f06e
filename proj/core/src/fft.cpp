#include "qpi/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace qpi {
namespace {

// FFTW planning is not thread-safe; execution with distinct buffers is.
// Plans are created once per shape and reused, keyed by (w, h, kind) where
// kind is the FFTW sign for c2c transforms or the r2r kind for DCTs.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan c2c_plan(int w, int h, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_tuple(w, h, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(w) * h);
    std::vector<std::complex<double>> out(in.size());
    // FFTW uses row-major (n0 = rows, n1 = cols).
    fftw_plan p = fftw_plan_dft_2d(h, w,
                                   reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()),
                                   sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

fftw_plan r2r_plan(int w, int h, fftw_r2r_kind kind) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_tuple(w, h, static_cast<int>(kind));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<double> in(static_cast<std::size_t>(w) * h);
    std::vector<double> out(in.size());
    fftw_plan p = fftw_plan_r2r_2d(h, w, in.data(), out.data(), kind, kind,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

ComplexField c2c(const ComplexField& f, int sign) {
    fftw_plan p = c2c_plan(f.width(), f.height(), sign);
    ComplexField out(f.grid());
    // Out-of-place c2c preserves its input; the const_cast is safe.
    fftw_execute_dft(p,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(f.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / std::sqrt(static_cast<double>(f.size()));
    for (auto& v : out) v *= s;
    return out;
}

} // namespace

ComplexField fft2(const ComplexField& f) { return c2c(f, FFTW_FORWARD); }
ComplexField ifft2(const ComplexField& f) { return c2c(f, FFTW_BACKWARD); }

RealField dct2(const RealField& f) {
    fftw_plan p = r2r_plan(f.width(), f.height(), FFTW_REDFT10);
    RealField out(f.grid());
    fftw_execute_r2r(p, const_cast<double*>(f.data()), out.data());
    return out;
}

RealField idct2(const RealField& f) {
    fftw_plan p = r2r_plan(f.width(), f.height(), FFTW_REDFT01);
    RealField out(f.grid());
    fftw_execute_r2r(p, const_cast<double*>(f.data()), out.data());
    // REDFT01(REDFT10(x)) multiplies by 2N per axis.
    const double s = 1.0 / (4.0 * f.width() * f.height());
    for (auto& v : out) v *= s;
    return out;
}

double bin_frequency(int k, int n) {
    return (k <= n / 2) ? static_cast<double>(k) / n : static_cast<double>(k) / n - 1.0;
}

double frequency_distance(double fa, double fb) {
    double d = std::fabs(fa - fb);
    d = std::fmod(d, 1.0);
    return std::min(d, 1.0 - d);
}

} // namespace qpi
