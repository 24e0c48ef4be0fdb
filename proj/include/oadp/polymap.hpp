#pragma once

// Polynomial parametrizations P^n --> P^N in an affine source chart: N+1
// exact rational components in n affine parameters, plus their symbolic
// partial derivatives, projective evaluation, and exact chart changes.

#include "oadp/multipoly.hpp"
#include "oadp/projective.hpp"
#include "oadp/rng.hpp"

#include <vector>

namespace oadp {

class PolyMap {
 public:
  PolyMap() = default;
  PolyMap(int source_dim, std::vector<RationalPoly> components);

  int source_dim() const { return source_dim_; }
  int target_dim() const { return static_cast<int>(components_.size()); }
  int degree() const { return degree_; }
  const std::vector<RationalPoly>& components() const { return components_; }
  // partials()[i][j] = d components[i] / d u_j.
  const std::vector<std::vector<RationalPoly>>& partials() const { return partials_; }

  ComplexVector eval_raw(const ComplexVector& u) const;
  RationalVector eval_exact(const RationalVector& u) const;

 private:
  int source_dim_ = 0;
  int degree_ = 0;
  std::vector<RationalPoly> components_;
  std::vector<std::vector<RationalPoly>> partials_;
};

// Componentwise evaluation followed by canonical normalization; BasePointError
// when the image vector vanishes (u in the base locus of f).
ProjectivePoint evaluate_map(const PolyMap& f, const ComplexVector& u);
RationalVector evaluate_map_exact(const PolyMap& f, const RationalVector& u);

// Exact symbolic partial derivatives evaluated at u: (N+1) x n.
ComplexMatrix jacobian(const PolyMap& f, const ComplexVector& u);
RationalMatrix jacobian_exact(const PolyMap& f, const RationalVector& u);

// Symmetric bilinear form of a homogeneous quadric: q(x+tw) = q(x) + t*B(x,w)
// + t^2*q(w), computed as grad q(x) . w; rejects non-quadratic input.
Complex polar_bilinear(const RationalPoly& q, const ComplexVector& x, const ComplexVector& w);
Rational polar_bilinear_exact(const RationalPoly& q, const RationalVector& x, const RationalVector& w);

// The same projective map in a new source chart: homogenize all components to
// the common map degree, precompose with the invertible matrix M on the
// homogeneous source coordinates, and dehomogenize at v_0 = 1. Counting
// solutions in several such charts catches solutions at parameter infinity.
PolyMap reparametrize(const PolyMap& f, const RationalMatrix& M);

// Composing with an invertible matrix on the *target* coordinates (projective
// coordinate change of the ambient space).
PolyMap transform_target(const PolyMap& f, const RationalMatrix& A);

}  // namespace oadp
