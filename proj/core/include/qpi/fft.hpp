#pragma once

#include "qpi/field.hpp"

namespace qpi {

// Unitary 2D DFT pair: forward kernel exp(-i 2 pi (ux/W + vy/H)), both
// directions scaled by 1/sqrt(W*H) so ifft2(fft2(f)) == f and energy is
// preserved. Plans are cached per (width, height, direction) and shared
// across threads.
ComplexField fft2(const ComplexField& f);
ComplexField ifft2(const ComplexField& f);

// 2D DCT-II and its inverse (DCT-III scaled so idct2(dct2(f)) == f).
// dct2 coefficients are unnormalized FFTW REDFT10 output; only the round
// trip and the basis are contractual.
RealField dct2(const RealField& f);
RealField idct2(const RealField& f);

// Signed frequency of DFT bin k on an N-point grid, in cycles/pixel:
// k/N for k <= N/2, k/N - 1 above.
double bin_frequency(int k, int n);

// Toroidal distance between two frequencies in cycles/pixel (unit torus).
double frequency_distance(double fa, double fb);

} // namespace qpi
