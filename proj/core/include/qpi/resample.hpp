#pragma once

#include "qpi/field.hpp"

namespace qpi {

// Separable bicubic resampling (Keys kernel, a = -0.5). For scale < 1 the
// kernel support is widened by 1/scale so downscaling is antialiased.
// Source indices are clamped at the borders and the tap weights renormalized.
// Output size along each axis is ceil(scale * size). Sample mapping:
// src = (dst + 0.5) / scale - 0.5.
RealField resample_bicubic(const RealField& f, double scale);

// Mask variant: resamples the mask as reals and re-binarizes at 0.5.
Field<std::uint8_t> resample_mask(const Field<std::uint8_t>& mask, double scale);

} // namespace qpi
