#include "oadp/varieties.hpp"

#include "oadp/errors.hpp"
#include "oadp/linalg.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace oadp {

namespace {

RationalPoly rp_const(int nvars, long c) { return RationalPoly::constant(nvars, Rational(c)); }
RationalPoly rp_var(int nvars, int i) { return RationalPoly::variable(nvars, i); }

// Random homogeneous form of degree d in nhom variables with nonzero integer
// coefficients in [-bound, bound].
RationalPoly random_form(SplitRng& rng, int nhom, int d, long bound) {
  RationalPoly p(nhom);
  for (const auto& mono : homogeneous_monomials(nhom, d))
    p.add_term(mono, Rational(rng.nonzero_int(bound)));
  return p;
}

// Substitutes chart polynomials into a homogeneous form.
RationalPoly on_chart(const RationalPoly& form, const std::vector<RationalPoly>& chart) {
  return form.compose(chart);
}

// Exact resultant-style coprimality check for two univariate polynomials given
// by coefficient vectors (degree = size-1): full-rank Sylvester matrix.
bool coprime_univariate(const std::vector<Rational>& f, const std::vector<Rational>& g) {
  const int df = static_cast<int>(f.size()) - 1;
  const int dg = static_cast<int>(g.size()) - 1;
  if (df <= 0 || dg <= 0) return true;
  RationalMatrix syl = RationalMatrix::Zero(df + dg, df + dg);
  for (int r = 0; r < dg; ++r)
    for (int k = 0; k <= df; ++k) syl(r, r + k) = f[k];
  for (int r = 0; r < df; ++r)
    for (int k = 0; k <= dg; ++k) syl(dg + r, r + k) = g[k];
  return rational_rank(syl) == df + dg;
}

VarietyModel make_parametrized(std::string label, int variety_dim,
                               std::vector<RationalPoly> comps) {
  VarietyModel m;
  m.kind = ModelKind::Parametrized;
  m.label = std::move(label);
  m.variety_dim = variety_dim;
  m.ambient_dim = static_cast<int>(comps.size()) - 1;
  m.components.emplace_back(variety_dim, std::move(comps));
  m.validate();
  return m;
}

}  // namespace

const PolyMap& VarietyModel::map() const {
  if (components.size() != 1)
    throw ConfigError("model '" + label + "' is not a single parametrized map");
  return components.front();
}

void VarietyModel::validate() const {
  switch (kind) {
    case ModelKind::Parametrized:
      if (components.size() != 1) throw ConfigError("Parametrized model needs exactly one map");
      break;
    case ModelKind::Union: {
      if (components.size() < 2) throw ConfigError("Union model needs at least two maps");
      for (std::size_t i = 0; i < components.size(); ++i)
        for (std::size_t j = i + 1; j < components.size(); ++j)
          if (components[i].components() == components[j].components())
            throw ConfigError("Union components must be pairwise distinct");
      break;
    }
    case ModelKind::ImplicitCurveCI:
      if (quadrics.size() != 2 || ambient_dim != 3 || variety_dim != 1)
        throw ConfigError("implicit complete-intersection models are curves in P^3");
      for (const RationalPoly& q : quadrics)
        if (q.num_vars() != 4 || q.is_zero() || !q.is_homogeneous(2))
          throw ConfigError("implicit model equations must be homogeneous quadrics in 4 variables");
      return;
  }
  for (const PolyMap& f : components)
    if (f.target_dim() != ambient_dim + 1)
      throw ConfigError("component target dimension does not match ambient space");
}

VarietyModel scroll(const std::vector<int>& a) {
  if (a.empty()) throw ConfigError("scroll needs at least one degree");
  for (int ai : a)
    if (ai < 1) throw ConfigError("scroll degrees must be >= 1 (smooth scrolls only)");
  const int k = static_cast<int>(a.size()) - 1;
  const int nvars = k + 1;  // t, lambda_1..lambda_k
  std::vector<RationalPoly> comps;
  const RationalPoly t = rp_var(nvars, 0);
  for (int i = 0; i <= k; ++i) {
    RationalPoly tj = rp_const(nvars, 1);
    for (int j = 0; j <= a[i]; ++j) {
      comps.push_back(i == 0 ? tj : rp_var(nvars, i) * tj);
      tj = tj * t;
    }
  }
  std::string label = "scroll(";
  for (std::size_t i = 0; i < a.size(); ++i)
    label += (i ? "," : "") + std::to_string(a[i]);
  label += ")";
  return make_parametrized(label, k + 1, std::move(comps));
}

VarietyModel segre(const std::vector<int>& m) {
  if (m.empty()) throw ConfigError("segre needs at least one factor");
  for (int mi : m)
    if (mi < 1) throw ConfigError("segre factor dimensions must be >= 1");
  int nvars = 0;
  for (int mi : m) nvars += mi;
  std::vector<RationalPoly> comps{rp_const(nvars, 1)};
  int offset = 0;
  for (int mi : m) {
    std::vector<RationalPoly> factor{rp_const(nvars, 1)};
    for (int j = 0; j < mi; ++j) factor.push_back(rp_var(nvars, offset + j));
    std::vector<RationalPoly> next;
    for (const RationalPoly& c : comps)
      for (const RationalPoly& x : factor) next.push_back(c * x);
    comps = std::move(next);
    offset += mi;
  }
  std::string label = "segre(";
  for (std::size_t i = 0; i < m.size(); ++i)
    label += (i ? "," : "") + std::to_string(m[i]);
  label += ")";
  return make_parametrized(label, nvars, std::move(comps));
}

VarietyModel edge_variety(int n, int eps, SplitRng rng) {
  if (n < 2) throw ConfigError("edge_variety needs n >= 2 (the n=1 case is the two skew lines)");
  if (eps != 0 && eps != 1) throw ConfigError("edge_variety type must be 0 or 1");
  const int nvars = n;
  std::vector<RationalPoly> comps;
  if (eps == 1) {
    // Divisor of type (1,2) on Seg(1,n): over y in a chart of P^n the fiber
    // point on the P^1 factor is (b(y) : -a(y)), for fixed general quadrics
    // a, b; Segre coordinates z_{0j} = b*y_j, z_{1j} = -a*y_j.
    std::vector<RationalPoly> chart{rp_const(nvars, 1)};
    for (int j = 0; j < n; ++j) chart.push_back(rp_var(nvars, j));
    RationalPoly a, b;
    for (int attempt = 0;; ++attempt) {
      SplitRng draw = rng.derive(static_cast<std::uint64_t>(attempt));
      a = random_form(draw, n + 1, 2, 5);
      b = random_form(draw, n + 1, 2, 5);
      const auto monos = homogeneous_monomials(n + 1, 2);
      RationalMatrix coeffs = RationalMatrix::Zero(2, static_cast<Eigen::Index>(monos.size()));
      for (std::size_t c = 0; c < monos.size(); ++c) {
        auto ita = a.terms().find(monos[c]);
        auto itb = b.terms().find(monos[c]);
        if (ita != a.terms().end()) coeffs(0, static_cast<Eigen::Index>(c)) = ita->second;
        if (itb != b.terms().end()) coeffs(1, static_cast<Eigen::Index>(c)) = itb->second;
      }
      if (rational_rank(coeffs) == 2) break;
      if (attempt >= 5) throw ConfigError("edge_variety: failed to draw independent quadrics");
    }
    const RationalPoly A = on_chart(a, chart), B = on_chart(b, chart);
    for (const RationalPoly& y : chart) comps.push_back(B * y);
    for (const RationalPoly& y : chart) comps.push_back(-(A * y));
  } else {
    // Divisor of type (0,2): P^1 x Q' with Q' = {y_0 y_1 = sum y_j^2} smooth
    // with the rational point (1:0:...:0); stereographic chart
    // y(m) = (sum m_k^2, 1, m_1, ..., m_{n-1}), P^1 chart x = (1 : t).
    const RationalPoly t = rp_var(nvars, 0);
    std::vector<RationalPoly> y;
    RationalPoly y0(nvars);
    for (int k = 1; k < n; ++k) {
      const RationalPoly mk = rp_var(nvars, k);
      y0 += mk * mk;
    }
    y.push_back(y0);
    y.push_back(rp_const(nvars, 1));
    for (int k = 1; k < n; ++k) y.push_back(rp_var(nvars, k));
    for (const RationalPoly& yj : y) comps.push_back(yj);
    for (const RationalPoly& yj : y) comps.push_back(t * yj);
  }
  return make_parametrized("edge(" + std::to_string(n) + "," + std::to_string(eps) + ")", n,
                           std::move(comps));
}

VarietyModel skew_lines() {
  VarietyModel m;
  m.kind = ModelKind::Union;
  m.label = "skew_lines";
  m.variety_dim = 1;
  m.ambient_dim = 3;
  m.components.emplace_back(
      1, std::vector<RationalPoly>{rp_const(1, 1), rp_var(1, 0), rp_const(1, 0), rp_const(1, 0)});
  m.components.emplace_back(
      1, std::vector<RationalPoly>{rp_const(1, 0), rp_const(1, 0), rp_const(1, 1), rp_var(1, 0)});
  m.validate();
  return m;
}

VarietyModel curve_on_quadric(int a, int b, SplitRng rng) {
  if (a < 0 || b < 0 || (a == 0 && b == 0))
    throw UnsupportedDivisorType("divisor type (" + std::to_string(a) + "," + std::to_string(b) +
                                 ") is not supported");
  const std::string label = "curve(" + std::to_string(a) + "," + std::to_string(b) + ")";
  // Coordinates on P^3 are the Segre coordinates (z00, z01, z10, z11) of
  // P^1_s x P^1_t; the fixed smooth quadric is Q = z00*z11 - z01*z10.
  if (a == 2 && b == 2) {
    VarietyModel m;
    m.kind = ModelKind::ImplicitCurveCI;
    m.label = label;
    m.variety_dim = 1;
    m.ambient_dim = 3;
    RationalPoly Q(4);
    Q.add_term({1, 0, 0, 1}, Rational(1));
    Q.add_term({0, 1, 1, 0}, Rational(-1));
    m.quadrics.push_back(Q);
    m.quadrics.push_back(random_form(rng, 4, 2, 5));
    m.validate();
    return m;
  }
  if (std::min(a, b) > 1)
    throw UnsupportedDivisorType("divisor type (" + std::to_string(a) + "," + std::to_string(b) +
                                 ") has no implemented smooth rational member");
  if (a == 0 || b == 0) {
    // Type (0,k) / (k,0): k distinct fibers of one ruling. k = 1 is a single
    // line; k = 2 gives two skew lines (reducible generic member).
    const int k = std::max(a, b);
    std::vector<long> roots;
    while (static_cast<int>(roots.size()) < k) {
      const long r = rng.uniform_int(-9, 9);
      if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    std::vector<PolyMap> lines;
    for (long r : roots) {
      const RationalPoly u = rp_var(1, 0), one = rp_const(1, 1), rc = rp_const(1, r);
      std::vector<RationalPoly> comps =
          a == 0 ? std::vector<RationalPoly>{one, rc, u, rc * u}    // t = (1:r), s free
                 : std::vector<RationalPoly>{one, u, rc, rc * u};   // s = (1:r), t free
      lines.emplace_back(1, std::move(comps));
    }
    if (k == 1) {
      VarietyModel m;
      m.kind = ModelKind::Parametrized;
      m.label = label;
      m.variety_dim = 1;
      m.ambient_dim = 3;
      m.components = std::move(lines);
      m.validate();
      return m;
    }
    VarietyModel m;
    m.kind = ModelKind::Union;
    m.label = label;
    m.variety_dim = 1;
    m.ambient_dim = 3;
    m.components = std::move(lines);
    m.validate();
    return m;
  }
  // Irreducible rational member with min(a,b) = 1: solve the bihomogeneous
  // equation for the degree-1 factor. If a = 1:
  // F = s0*F0(t) + s1*F1(t) with deg F_i = b, so s = (F1 : -F0), t = (1 : u).
  const bool solve_s = (a == 1);
  const int dhigh = solve_s ? b : a;
  std::vector<Rational> F0(dhigh + 1), F1(dhigh + 1);
  for (int attempt = 0;; ++attempt) {
    SplitRng draw = rng.derive(static_cast<std::uint64_t>(attempt));
    for (int i = 0; i <= dhigh; ++i) F0[i] = Rational(draw.nonzero_int(5));
    for (int i = 0; i <= dhigh; ++i) F1[i] = Rational(draw.nonzero_int(5));
    if (coprime_univariate(F0, F1)) break;
    if (attempt >= 5) throw ConfigError(label + ": failed to draw a coprime pencil");
  }
  const RationalPoly u = rp_var(1, 0);
  RationalPoly p0(1), p1(1), pw = rp_const(1, 1);
  for (int i = 0; i <= dhigh; ++i) {
    p0 += F0[i] * pw;
    p1 += F1[i] * pw;
    pw = pw * u;
  }
  RationalPoly s0(1), s1(1), t0(1), t1(1);
  if (solve_s) {
    s0 = p1;
    s1 = -p0;
    t0 = rp_const(1, 1);
    t1 = u;
  } else {
    t0 = p1;
    t1 = -p0;
    s0 = rp_const(1, 1);
    s1 = u;
  }
  std::vector<RationalPoly> comps{s0 * t0, s0 * t1, s1 * t0, s1 * t1};
  return make_parametrized(label, 1, std::move(comps));
}

VarietyModel veronese() {
  const RationalPoly u = rp_var(2, 0), v = rp_var(2, 1), one = rp_const(2, 1);
  return make_parametrized("veronese", 2, {one, u, v, u * u, u * v, v * v});
}

VarietyModel del_pezzo_quintic() {
  const std::vector<std::array<long, 3>> pts{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        RationalMatrix t(3, 3);
        for (int c = 0; c < 3; ++c) {
          t(0, c) = Rational(pts[i][c]);
          t(1, c) = Rational(pts[j][c]);
          t(2, c) = Rational(pts[k][c]);
        }
        if (rational_rank(t) != 3)
          throw ConfigError("del_pezzo_quintic base points are not in general position");
      }
  const auto monos = homogeneous_monomials(3, 3);
  RationalMatrix eval(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(monos.size()));
  for (std::size_t r = 0; r < pts.size(); ++r)
    for (std::size_t c = 0; c < monos.size(); ++c) {
      Rational v(1);
      for (int i = 0; i < 3; ++i)
        for (int e = 0; e < monos[c][i]; ++e) v *= Rational(pts[r][i]);
      eval(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  const std::vector<RationalVector> basis = rational_kernel(eval);
  std::vector<RationalPoly> chart{rp_const(2, 1), rp_var(2, 0), rp_var(2, 1)};
  std::vector<RationalPoly> comps;
  for (const RationalVector& cub : basis) {
    RationalPoly form(3);
    for (std::size_t c = 0; c < monos.size(); ++c)
      form.add_term(monos[c], cub[static_cast<Eigen::Index>(c)]);
    comps.push_back(on_chart(form, chart));
  }
  return make_parametrized("del_pezzo_quintic", 2, std::move(comps));
}

VarietyModel flag_threefold(SplitRng rng) {
  for (int attempt = 0; attempt <= 5; ++attempt) {
    SplitRng draw = rng.derive(static_cast<std::uint64_t>(attempt));
    RationalMatrix ab(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) ab(i, j) = Rational(draw.nonzero_int(5));
    if (rational_rank(ab) != 2) continue;
    // x = (1, u1, u2), w(t) = a + t*b, y = x cross w; components z_ij = x_i*y_j.
    const int nvars = 3;  // u1, u2, t
    const RationalPoly t = rp_var(nvars, 2);
    std::vector<RationalPoly> x{rp_const(nvars, 1), rp_var(nvars, 0), rp_var(nvars, 1)};
    std::vector<RationalPoly> w, y(3, RationalPoly(nvars));
    for (int j = 0; j < 3; ++j) w.push_back(ab(0, j) * rp_const(nvars, 1) + ab(1, j) * t);
    for (int i = 0; i < 3; ++i)
      y[i] = x[(i + 1) % 3] * w[(i + 2) % 3] - x[(i + 2) % 3] * w[(i + 1) % 3];
    std::vector<RationalPoly> comps;
    RationalPoly trace(nvars);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        comps.push_back(x[i] * y[j]);
        if (i == j) trace += comps.back();
      }
    if (!trace.is_zero()) throw ConfigError("flag_threefold: incidence identity violated");
    VarietyModel m = make_parametrized("flag_threefold", 3, std::move(comps));
    // Fibers must be 0-dimensional: exact Jacobian rank 3 at 20 sample points.
    bool ok = true;
    SplitRng pts = draw.derive("fiber-check");
    for (int s = 0; s < 20 && ok; ++s) {
      SplitRng ps = pts.derive(static_cast<std::uint64_t>(s));
      RationalVector u0 = random_rational_point(ps, nvars, 9);
      ok = rational_rank(jacobian_exact(m.map(), u0)) == 3;
    }
    if (ok) return m;
  }
  throw ConfigError("flag_threefold: failed to draw a generic line");
}

VarietyModel grassmannian_16() {
  const int nvars = 8;  // a1..a4, b1..b4 in rows (1,0,a), (0,1,b)
  auto r1 = [&](int col) {
    if (col == 0) return rp_const(nvars, 1);
    if (col == 1) return rp_const(nvars, 0);
    return rp_var(nvars, col - 2);
  };
  auto r2 = [&](int col) {
    if (col == 0) return rp_const(nvars, 0);
    if (col == 1) return rp_const(nvars, 1);
    return rp_var(nvars, col + 2);
  };
  std::vector<RationalPoly> comps;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) comps.push_back(r1(i) * r2(j) - r1(j) * r2(i));
  return make_parametrized("grassmannian_16", 8, std::move(comps));
}

VarietyModel degree8_scroll(SplitRng rng) {
  // Coordinates on P^7: (z0, z1, z00, z01, z02, z10, z11, z12), where the
  // z_ij are Segre coordinates of Seg(1,2) and L = {z_ij = 0} is the vertex
  // line of the cone F over Seg(1,2).  The ruling divisor of F over a point
  // [a:b] of the P^1 factor is the P^4 {b*z_0j - a*z_1j = 0}; a quadric
  // containing it reads Q = sum_j (b*z_0j - a*z_1j) * lambda_j with
  // arbitrary linear forms lambda_j.  Cutting F with such a quadric leaves,
  // besides the P^4 itself, a divisor meeting every ruling plane
  // span(L, Segre point) in a line.  Taking the ruling P^4s over [0:1] and
  // [1:0], the two residual divisors meet each ruling plane in the single
  // point given by Cramer's rule; their intersection X is the scroll: over
  // a fixed P^2-point the Cramer point moves linearly with s, so X is
  // swept by lines, one through each of its general points.
  const int nvars = 3;  // s, t1, t2 — chart of P^1 x P^2
  std::vector<RationalPoly> seg;  // s_i * t_j on the chart
  const RationalPoly one = rp_const(nvars, 1), s = rp_var(nvars, 0);
  const RationalPoly tc[3] = {one, rp_var(nvars, 1), rp_var(nvars, 2)};
  for (int j = 0; j < 3; ++j) seg.push_back(tc[j]);
  for (int j = 0; j < 3; ++j) seg.push_back(s * tc[j]);
  for (int attempt = 0; attempt <= 5; ++attempt) {
    SplitRng draw = rng.derive(static_cast<std::uint64_t>(attempt));
    // lambda^x_j = c^x_j z0 + d^x_j z1 + m^x_j(z_ij), x = a (P^4 over [0:1],
    // prefactors z_0j) or b (P^4 over [1:0], prefactors z_1j)
    const RationalVector ca = random_rational_point(draw, 3, 5);
    const RationalVector da = random_rational_point(draw, 3, 5);
    const RationalVector cb = random_rational_point(draw, 3, 5);
    const RationalVector db = random_rational_point(draw, 3, 5);
    std::vector<RationalPoly> ma(3), mb(3);
    for (int j = 0; j < 3; ++j) ma[j] = random_form(draw, 6, 1, 5);
    for (int j = 0; j < 3; ++j) mb[j] = random_form(draw, 6, 1, 5);
    // On a point (z0, z1, mu * s_i t_j) of F the quadric over [0:1] factors
    // as mu * s_0 * (z0 c^a(t) + z1 d^a(t) + mu e^a(s,t)), and likewise over
    // [1:0] with prefactor mu * s_1; the parenthesized parts are linear in
    // (z0, z1, mu).
    RationalPoly cA(nvars), dA(nvars), eA(nvars), cB(nvars), dB(nvars), eB(nvars);
    for (int j = 0; j < 3; ++j) {
      cA += ca[j] * tc[j];
      dA += da[j] * tc[j];
      cB += cb[j] * tc[j];
      dB += db[j] * tc[j];
      eA += tc[j] * on_chart(ma[j], seg);
      eB += tc[j] * on_chart(mb[j], seg);
    }
    const RationalPoly D = cA * dB - cB * dA;
    if (D.is_zero()) continue;
    std::vector<RationalPoly> comps;
    comps.push_back(dA * eB - dB * eA);  // z0
    comps.push_back(eA * cB - eB * cA);  // z1
    for (const RationalPoly& m : seg) comps.push_back(D * m);
    // Exact containment check: both quadrics vanish identically on the image.
    const std::vector<RationalPoly> zij(comps.begin() + 2, comps.end());
    for (int x = 0; x < 2; ++x) {
      RationalPoly val(nvars);
      for (int j = 0; j < 3; ++j) {
        RationalPoly lam = (x == 0 ? ca : cb)[j] * comps[0] + (x == 0 ? da : db)[j] * comps[1] +
                           on_chart((x == 0 ? ma : mb)[j], zij);
        val += zij[static_cast<std::size_t>(x * 3 + j)] * lam;
      }
      if (!val.is_zero()) throw ConfigError("degree8_scroll: containment identity violated");
    }
    VarietyModel m = make_parametrized("degree8_scroll", 3, std::move(comps));
    // Generic draws only: the map must be generically finite and the image
    // must span P^7 (the eight components are linearly independent).
    bool ok = true;
    SplitRng pts = draw.derive("fiber-check");
    for (int t = 0; t < 10 && ok; ++t) {
      SplitRng ps = pts.derive(static_cast<std::uint64_t>(t));
      const RationalVector u0 = random_rational_point(ps, nvars, 9);
      ok = rational_rank(jacobian_exact(m.map(), u0)) == 3;
    }
    if (ok) {
      std::map<std::vector<int>, int> cols;
      for (const RationalPoly& c : m.map().components())
        for (const auto& [mono, coef] : c.terms())
          cols.emplace(mono, static_cast<int>(cols.size()));
      RationalMatrix coeff = RationalMatrix::Zero(8, static_cast<Eigen::Index>(cols.size()));
      for (int i = 0; i < 8; ++i)
        for (const auto& [mono, coef] : m.map().components()[static_cast<std::size_t>(i)].terms())
          coeff(i, cols.at(mono)) = coef;
      ok = rational_rank(coeff) == 8;
    }
    if (ok) return m;
  }
  throw ConfigError("degree8_scroll: failed to draw a generic configuration");
}

VarietyModel apply_random_coordinate_change(const VarietyModel& model, SplitRng rng) {
  const int size = model.ambient_dim + 1;
  const RationalMatrix A = random_invertible_matrix(rng, size, 9);
  VarietyModel out = model;
  out.label = model.label + "+coordchange";
  if (model.kind == ModelKind::ImplicitCurveCI) {
    // New equations q(A^{-1} z) so that the zero set is A * (old zero set).
    const RationalMatrix Ainv = A.inverse();
    std::vector<RationalPoly> subs;
    for (int j = 0; j < size; ++j) {
      RationalPoly lj(size);
      for (int k = 0; k < size; ++k) {
        std::vector<int> mono(size, 0);
        mono[k] = 1;
        lj.add_term(mono, Ainv(j, k));
      }
      subs.push_back(lj);
    }
    out.quadrics.clear();
    for (const RationalPoly& qq : model.quadrics) out.quadrics.push_back(qq.compose(subs));
  } else {
    out.components.clear();
    for (const PolyMap& f : model.components) out.components.push_back(transform_target(f, A));
  }
  out.validate();
  return out;
}

PolySystem preimage_system(const PolyMap& f, const ProjectivePoint& q) {
  const ComplexVector& qc = q.coords();
  const int j0 = q.pivot();
  std::vector<ComplexPoly> eqs;
  ComplexPoly fj0 = to_complex_poly(f.components()[j0]);
  for (int j = 0; j < f.target_dim(); ++j) {
    if (j == j0) continue;
    eqs.push_back(to_complex_poly(f.components()[j]) * qc[j0] - fj0 * qc[j]);
  }
  PolySystem sys;
  sys.equations = std::move(eqs);
  sys.num_vars = f.source_dim();
  return sys;
}

bool membership_test(const VarietyModel& model, const ProjectivePoint& q, const SolverConfig& cfg) {
  if (model.kind == ModelKind::ImplicitCurveCI)
    throw ConfigError("membership_test needs a parametrized or union model");
  // The image-distance tolerance must sit well above the Newton terminal
  // residual: a converged preimage with Jacobian smallest singular value s
  // still carries an image error of order residual/s.  Tightening the solver
  // residual below ~1e-11 is counterproductive — double-precision evaluation
  // noise keeps Newton from ever reporting convergence.
  const double tol = std::max(1e-7, 100.0 * cfg.residual_tol);
  for (std::size_t ci = 0; ci < model.components.size(); ++ci) {
    const PolyMap& f = model.components[ci];
    const PolySystem sys = preimage_system(f, q);
    const AcceptFn on_image = [&](const ComplexVector& u) {
      try {
        return evaluate_map(f, u).distance_to(q) < tol;
      } catch (const BasePointError&) {
        return false;
      }
    };
    // When q carries noise from an upstream numeric solve (line midpoints,
    // projected feet), the overdetermined preimage system is inconsistent at
    // the noise level and Gauss-Newton plateaus there — sometimes just above
    // a tight residual target even though the plateau point sits orders of
    // magnitude inside the image-distance gate.  Escalate the target tenfold
    // at a time: the tight solve stays the common fast path and the
    // image-distance accept remains the decisive criterion at every rung.
    for (double rung = cfg.residual_tol;; rung *= 10.0) {
      SolverConfig local = cfg;
      local.residual_tol = rung;
      local.seed = SplitRng(cfg.seed).derive("membership").derive(ci).next_u64();
      local.batch_size = 50;
      local.max_batches = 3;
      local.saturation_batches = 3;
      local.threads = 1;
      if (solve_overdetermined(sys, local, on_image).count() > 0) return true;
      if (rung * 10.0 > tol || rung * 10.0 >= cfg.dedup_tol) break;
    }
  }
  return false;
}

}  // namespace oadp
