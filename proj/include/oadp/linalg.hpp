#pragma once

// Exact rational linear algebra (fraction-free elimination, kernels, ranks)
// and the numeric SVD rank used on the floating-point side.

#include "oadp/rational.hpp"
#include "oadp/rng.hpp"

#include <vector>

namespace oadp {

// Exact basis of the right null space via fraction-free (Bareiss) elimination
// with deterministic pivoting: columns left to right, first nonzero row in
// order. Basis vectors are scaled to primitive integer vectors with positive
// leading entry; basis size = cols - rank. Exactness contract: m * v = 0.
std::vector<RationalVector> rational_kernel(const RationalMatrix& m);

// Rank by the same elimination.
int rational_rank(const RationalMatrix& m);

// Number of singular values > tol * (largest singular value); 0 for the zero
// matrix.
int numeric_rank(const ComplexMatrix& m, double tol);

// True when v lies in the exact span of the given vectors.
bool in_rational_span(const std::vector<RationalVector>& basis, const RationalVector& v);

// Random integer-entry vector/matrix helpers for generic draws.
RationalVector random_rational_point(SplitRng& rng, int size, long bound);
RationalMatrix random_invertible_matrix(SplitRng& rng, int size, long bound);

// All exponent vectors of total degree exactly d in nhom variables, in
// lexicographic order from the lowest variable index.
std::vector<std::vector<int>> homogeneous_monomials(int nhom, int d);

}  // namespace oadp
