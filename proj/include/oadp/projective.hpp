#pragma once

// Projective points with a canonical affine normalization: the coordinate of
// largest modulus is scaled to exactly 1 (ties broken by lowest index).
// Canonical form makes deduplication and report output deterministic.

#include "oadp/errors.hpp"
#include "oadp/rational.hpp"

#include <cmath>

namespace oadp {

inline int argmax_modulus(const ComplexVector& v) {
  int best = 0;
  double best_abs = std::abs(v[0]);
  for (int i = 1; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

class ProjectivePoint {
 public:
  explicit ProjectivePoint(const ComplexVector& coords) {
    const int pivot = argmax_modulus(coords);
    if (std::abs(coords[pivot]) == 0.0)
      throw BasePointError("projective point from the zero vector");
    coords_ = coords / coords[pivot];
    coords_[pivot] = Complex(1.0, 0.0);
    pivot_ = pivot;
  }

  const ComplexVector& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()) - 1; }
  int pivot() const { return pivot_; }

  // Max-norm distance between canonical representatives, with the second
  // point rescaled on the first point's pivot so near-ties in modulus cannot
  // flip the chart between the two operands.
  double distance_to(const ProjectivePoint& other) const {
    const Complex anchor = other.coords_[pivot_];
    if (std::abs(anchor) < 1e-14) return 2.0;  // other vanishes on our chart: far apart
    return (coords_ - other.coords_ / anchor).template lpNorm<Eigen::Infinity>();
  }

 private:
  ComplexVector coords_;
  int pivot_;
};

// Exact canonical normalization over Q (largest |coordinate|, lowest-index
// tiebreak), used when sampling rational points on a model.
inline RationalVector normalize_exact(const RationalVector& v) {
  int best = -1;
  Rational best_abs(0);
  for (int i = 0; i < v.size(); ++i) {
    const Rational a = rational_abs(v[i]);
    if (best < 0 || a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (best < 0 || best_abs == 0) throw BasePointError("exact projective point from the zero vector");
  RationalVector r = v;
  for (int i = 0; i < r.size(); ++i) r[i] /= v[best];
  return r;
}

inline ComplexVector to_complex_vector(const RationalVector& v) {
  ComplexVector r(v.size());
  for (int i = 0; i < v.size(); ++i) r[i] = to_complex(v[i]);
  return r;
}

}  // namespace oadp
