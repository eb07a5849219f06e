#pragma once

#include "qpi/field.hpp"

namespace qpi::unwrap {

// Principal value of x in (-pi, pi].
double wrap_to_principal(double x);

// Exact least-squares phase unwrapping (Neumann boundary): wrapped forward
// differences form the target gradient field; the normal equations are the
// discrete Poisson problem diagonalized by the 2D DCT-II, solved by dividing
// each coefficient by (2 cos(pi p / W) + 2 cos(pi q / H) - 4) with the mean
// coefficient pinned to zero. The result is then offset-normalized by
// subtracting the mean of its lowest decile (at least one sample), which
// maps a background-dominated field to a near-zero floor and is idempotent.
// Output is marked unwrapped. Rejects inputs already marked unwrapped.
PhaseMap unwrap_phase(const PhaseMap& wrapped);

// The offset normalization applied by unwrap_phase, exposed for reuse:
// subtracts the mean of the floor(max(1, N/10)) smallest samples.
void normalize_offset(RealField& phase);

} // namespace qpi::unwrap
