#include "oadp/polymap.hpp"

#include "oadp/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace oadp {

PolyMap::PolyMap(int source_dim, std::vector<RationalPoly> components)
    : source_dim_(source_dim), components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("PolyMap needs at least one component");
  bool all_zero = true;
  for (const auto& c : components_) {
    if (c.num_vars() != source_dim_)
      throw std::invalid_argument("PolyMap component variable count mismatch");
    if (!c.is_zero()) all_zero = false;
    degree_ = std::max(degree_, c.total_degree());
  }
  if (all_zero) throw std::invalid_argument("PolyMap with all components zero");
  partials_.resize(components_.size());
  for (size_t i = 0; i < components_.size(); ++i) {
    partials_[i].reserve(source_dim_);
    for (int j = 0; j < source_dim_; ++j) partials_[i].push_back(components_[i].derivative(j));
  }
}

ComplexVector PolyMap::eval_raw(const ComplexVector& u) const {
  if (u.size() != source_dim_) throw std::invalid_argument("parameter dimension mismatch");
  ComplexVector r(target_dim());
  for (int i = 0; i < target_dim(); ++i) r[i] = components_[i].eval<Complex>(u);
  return r;
}

RationalVector PolyMap::eval_exact(const RationalVector& u) const {
  if (u.size() != source_dim_) throw std::invalid_argument("parameter dimension mismatch");
  RationalVector r(target_dim());
  for (int i = 0; i < target_dim(); ++i) r[i] = components_[i].eval<Rational>(u);
  return r;
}

ProjectivePoint evaluate_map(const PolyMap& f, const ComplexVector& u) {
  const ComplexVector v = f.eval_raw(u);
  if (v.lpNorm<Eigen::Infinity>() == 0.0)
    throw BasePointError("parameter lies in the base locus of the map");
  return ProjectivePoint(v);
}

RationalVector evaluate_map_exact(const PolyMap& f, const RationalVector& u) {
  RationalVector v = f.eval_exact(u);
  bool zero = true;
  for (int i = 0; i < v.size(); ++i)
    if (v[i] != 0) zero = false;
  if (zero) throw BasePointError("rational parameter lies in the base locus of the map");
  return normalize_exact(v);
}

ComplexMatrix jacobian(const PolyMap& f, const ComplexVector& u) {
  ComplexMatrix J(f.target_dim(), f.source_dim());
  for (int i = 0; i < f.target_dim(); ++i)
    for (int j = 0; j < f.source_dim(); ++j) J(i, j) = f.partials()[i][j].eval<Complex>(u);
  return J;
}

RationalMatrix jacobian_exact(const PolyMap& f, const RationalVector& u) {
  RationalMatrix J(f.target_dim(), f.source_dim());
  for (int i = 0; i < f.target_dim(); ++i)
    for (int j = 0; j < f.source_dim(); ++j) J(i, j) = f.partials()[i][j].eval<Rational>(u);
  return J;
}

namespace {
void require_quadric(const RationalPoly& q) {
  if (q.is_zero() || !q.is_homogeneous(2))
    throw std::invalid_argument("polar_bilinear needs a nonzero homogeneous quadric");
}
}  // namespace

Complex polar_bilinear(const RationalPoly& q, const ComplexVector& x, const ComplexVector& w) {
  require_quadric(q);
  Complex acc(0.0, 0.0);
  for (int i = 0; i < q.num_vars(); ++i) acc += q.derivative(i).eval<Complex>(x) * w[i];
  return acc;
}

Rational polar_bilinear_exact(const RationalPoly& q, const RationalVector& x, const RationalVector& w) {
  require_quadric(q);
  Rational acc(0);
  for (int i = 0; i < q.num_vars(); ++i) acc += q.derivative(i).eval<Rational>(x) * w[i];
  return acc;
}

PolyMap reparametrize(const PolyMap& f, const RationalMatrix& M) {
  const int n = f.source_dim();
  if (M.rows() != n + 1 || M.cols() != n + 1)
    throw std::invalid_argument("chart matrix must be (n+1) x (n+1)");
  const int D = f.degree();
  // Affine-linear substitutions a_j(v) = M(j,0) + sum_k M(j,k+1) v_k.
  std::vector<RationalPoly> subs;
  subs.reserve(n + 1);
  for (int j = 0; j <= n; ++j) {
    RationalPoly a = RationalPoly::constant(n, M(j, 0));
    for (int k = 0; k < n; ++k) a += M(j, k + 1) * RationalPoly::variable(n, k);
    subs.push_back(a);
  }
  std::vector<RationalPoly> comps;
  comps.reserve(f.target_dim());
  for (const auto& c : f.components()) comps.push_back(c.homogenize(D).compose(subs));
  return PolyMap(n, std::move(comps));
}

PolyMap transform_target(const PolyMap& f, const RationalMatrix& A) {
  const int m = f.target_dim();
  if (A.rows() != m || A.cols() != m)
    throw std::invalid_argument("target transform must be (N+1) x (N+1)");
  std::vector<RationalPoly> comps;
  comps.reserve(m);
  for (int i = 0; i < m; ++i) {
    RationalPoly c(f.source_dim());
    for (int j = 0; j < m; ++j) {
      if (A(i, j) == 0) continue;
      c += A(i, j) * f.components()[j];
    }
    comps.push_back(std::move(c));
  }
  return PolyMap(f.source_dim(), std::move(comps));
}

}  // namespace oadp
