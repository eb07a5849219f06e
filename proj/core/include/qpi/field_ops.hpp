#pragma once

#include "qpi/field.hpp"

namespace qpi {

// Forward differences with replicated (Neumann) boundary: the last column of
// gx and last row of gy are zero. gradient and divergence are exact negative
// adjoints: <grad f, (gx,gy)> == -<f, div(gx,gy)> for all fields, and
// div(grad f) is the 5-point Laplacian with reflected boundary.
template <typename T>
void gradient(const Field<T>& f, Field<T>& gx, Field<T>& gy);

template <typename T>
void divergence(const Field<T>& gx, const Field<T>& gy, Field<T>& out);

template <typename T>
std::pair<Field<T>, Field<T>> gradient(const Field<T>& f) {
    Field<T> gx(f.grid()), gy(f.grid());
    gradient(f, gx, gy);
    return {std::move(gx), std::move(gy)};
}

template <typename T>
Field<T> divergence(const Field<T>& gx, const Field<T>& gy) {
    Field<T> out(gx.grid());
    divergence(gx, gy, out);
    return out;
}

// Mean over all samples.
double mean(const RealField& f);

// Median with the two-middle-element average for even counts.
// Throws DegenerateInputError on empty input.
double median(std::vector<double> values);

} // namespace qpi
