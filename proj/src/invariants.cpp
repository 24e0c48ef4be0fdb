#include "oadp/invariants.hpp"

#include "oadp/catalog.hpp"
#include "oadp/errors.hpp"
#include "oadp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string_view>
#include <utility>

namespace oadp {

namespace {

constexpr double kImageFloor = 1e-6;   // smallest image vector treated as nonzero
constexpr double kDistinctTol = 1e-4;  // two image points closer than this count as equal

int exact_pivot(const RationalVector& p) {
  int best = 0;
  Rational best_abs = rational_abs(p[0]);
  for (Eigen::Index i = 1; i < p.size(); ++i) {
    const Rational a = rational_abs(p[i]);
    if (a > best_abs) {
      best_abs = a;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Rational dot_exact(const RationalVector& a, const RationalVector& b) {
  Rational s(0);
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool exact_zero(const RationalVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != Rational(0)) return false;
  return true;
}

RationalPoly linear_form(const RationalVector& c) {
  const int nh = static_cast<int>(c.size());
  RationalPoly p(nh);
  std::vector<int> e(nh, 0);
  for (int i = 0; i < nh; ++i) {
    if (c[i] == Rational(0)) continue;
    e[i] = 1;
    p.add_term(e, c[i]);
    e[i] = 0;
  }
  return p;
}

double round12(double v) { return std::round(v * 1e12) / 1e12; }

bool point_less(const ProjectivePoint& a, const ProjectivePoint& b) {
  for (Eigen::Index i = 0; i < a.coords().size(); ++i) {
    const double ar = round12(a.coords()[i].real()), br = round12(b.coords()[i].real());
    if (ar != br) return ar < br;
    const double ai = round12(a.coords()[i].imag()), bi = round12(b.coords()[i].imag());
    if (ai != bi) return ai < bi;
  }
  return false;
}

void dedup_and_sort(std::vector<ProjectivePoint>& pts, double tol) {
  std::vector<ProjectivePoint> out;
  for (const ProjectivePoint& p : pts) {
    bool dup = false;
    for (const ProjectivePoint& q : out)
      if (p.distance_to(q) < tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), point_less);
  pts = std::move(out);
}

// ---------------------------------------------------------------------------
// Secant systems: unknowns (u, v, lambda), image point lambda*f(u)+(1-lambda)*
// f(v) forced proportional to p by cross-multiplication against p's pivot.
// The symmetric weighting keeps both solutions of a swapped pair at O(1)
// coordinates: (u, v, lambda) <-> (v, u, 1-lambda).
// ---------------------------------------------------------------------------

std::vector<ComplexPoly> secant_equations(const PolyMap& fa, const PolyMap& fb,
                                          const ComplexVector& p) {
  const int na = fa.source_dim(), nb = fb.source_dim();
  const int m = na + nb + 1;
  const int nh = fa.target_dim();
  const ComplexPoly lam = ComplexPoly::variable(m, m - 1);
  const ComplexPoly one = ComplexPoly::constant(m, Complex(1.0));
  std::vector<ComplexPoly> S;
  S.reserve(static_cast<std::size_t>(nh));
  for (int i = 0; i < nh; ++i) {
    const ComplexPoly fu = to_complex_poly(fa.components()[i]).embed(m, 0);
    const ComplexPoly fv = to_complex_poly(fb.components()[i]).embed(m, na);
    S.push_back(lam * fu + (one - lam) * fv);
  }
  // cross-multiplication pivot: largest |p_i| among coordinates where the
  // secant family is not identically zero (a zero pivot component would turn
  // every equation into a multiple of the zero polynomial)
  int i0 = -1;
  for (int i = 0; i < nh; ++i) {
    if (S[static_cast<std::size_t>(i)].is_zero()) continue;
    if (i0 < 0 || std::abs(p[i]) > std::abs(p[i0])) i0 = i;
  }
  if (i0 < 0) throw ConfigError("secant system: the component maps are identically zero");
  std::vector<ComplexPoly> eqs;
  for (int i = 0; i < nh; ++i) {
    if (i == i0) continue;
    eqs.push_back(p[i] * S[i0] - p[i0] * S[i]);
  }
  return eqs;
}

// Discards converged points whose two image points vanish or coincide
// (base-locus hits and tangential/diagonal degenerations are not secants).
AcceptFn secant_accept(PolyMap fa, PolyMap fb) {
  const int na = fa.source_dim(), nb = fb.source_dim();
  return [fa = std::move(fa), fb = std::move(fb), na, nb](const ComplexVector& w) {
    const ComplexVector x = fa.eval_raw(w.head(na));
    const ComplexVector y = fb.eval_raw(w.segment(na, nb));
    if (x.lpNorm<Eigen::Infinity>() < kImageFloor) return false;
    if (y.lpNorm<Eigen::Infinity>() < kImageFloor) return false;
    return ProjectivePoint(x).distance_to(ProjectivePoint(y)) > kDistinctTol;
  };
}

long bezout_product(const std::vector<ComplexPoly>& eqs) {
  long b = 1;
  for (const ComplexPoly& e : eqs) b *= std::max(1, e.total_degree());
  return b;
}

double max_solution_coord(const SolutionSet& set) {
  double big = 0.0;
  for (const Solution& s : set.solutions) big = std::max(big, s.point.cwiseAbs().maxCoeff());
  return big;
}

SolutionSet solve_secant_pair(const PolyMap& fa, const PolyMap& fb, const ComplexVector& p,
                              const SolverConfig& cfg) {
  auto eqs = secant_equations(fa, fb, p);
  const int m = fa.source_dim() + fb.source_dim() + 1;
  PolySystem sys{std::move(eqs), m, std::nullopt};
  sys.bezout_bound = bezout_product(sys.equations);
  if (static_cast<int>(sys.equations.size()) != m)
    throw ConfigError("secant system is not square for this model");
  return solve_square(sys, cfg, secant_accept(fa, fb));
}

// ---------------------------------------------------------------------------
// Tangent frames and annihilators (exact).
// ---------------------------------------------------------------------------

// Rows span the tangent space of the affine cone at f(u): the point itself
// plus all partial-derivative vectors; (n+1) x (N+1).
RationalMatrix tangent_frame(const PolyMap& f, const RationalVector& u) {
  const int n = f.source_dim(), nh = f.target_dim();
  const RationalVector img = f.eval_exact(u);
  if (exact_zero(img)) throw BasePointError("tangent frame at a base point of the map");
  RationalMatrix m(n + 1, nh);
  m.row(0) = img.transpose();
  const RationalMatrix J = jacobian_exact(f, u);
  for (int k = 0; k < n; ++k) m.row(k + 1) = J.col(k).transpose();
  return m;
}

std::vector<RationalVector> tangent_annihilator(const PolyMap& f, const RationalVector& u) {
  const RationalMatrix frame = tangent_frame(f, u);
  if (rational_rank(frame) != static_cast<int>(frame.rows()))
    throw BasePointError("map is not an immersion at the sampled point");
  return rational_kernel(frame);
}

// ---------------------------------------------------------------------------
// Degree: count a general codimension-n linear section in three random source
// charts; the counts must agree.
// ---------------------------------------------------------------------------

// Random affine source change u -> A u + b. A projective change would move
// base points of the compactified map into the chart, and their Newton basins
// drown every start (all image coordinates vanish there); an affine change
// keeps them at infinity while still reshuffling the solver landscape.
PolyMap affine_rechart(const PolyMap& f, SplitRng rng) {
  const int n = f.source_dim();
  RationalMatrix M = RationalMatrix::Zero(n + 1, n + 1);
  M(0, 0) = 1;
  const RationalMatrix A = random_invertible_matrix(rng, n, 9);
  const RationalVector b = random_rational_point(rng, n, 9);
  for (int i = 0; i < n; ++i) {
    M(i + 1, 0) = b[i];
    for (int j = 0; j < n; ++j) M(i + 1, j + 1) = A(i, j);
  }
  return reparametrize(f, M);
}

long parametrized_degree(const PolyMap& f0, const SolverConfig& cfg, SplitRng rng) {
  const int n = f0.source_dim();
  const int nh = f0.target_dim();
  // Charts 1 and 2 are *projective* source changes: the three charts then have
  // independent loci at infinity, so a section root escaping one chart is seen
  // by the others and the disagreement forces a redraw. (Base points that a
  // projective change drags into the chart are harmless here: the image-ratio
  // accept below rejects them at any multiplicity.)
  std::vector<PolyMap> charts{f0};
  for (int t = 1; t < 3; ++t) {
    SplitRng crng = rng.derive("chart").derive(static_cast<std::uint64_t>(t));
    charts.push_back(reparametrize(f0, random_invertible_matrix(crng, n + 1, 9)));
  }
  for (int redraw = 0; redraw <= 5; ++redraw) {
    SplitRng lrng = rng.derive("section").derive(static_cast<std::uint64_t>(redraw));
    std::vector<RationalVector> forms;
    for (int k = 0; k < n; ++k) forms.push_back(random_rational_point(lrng, nh, 9));
    long agreed = -1;
    bool ok = true;
    for (int t = 0; t < 3 && ok; ++t) {
      const PolyMap f = charts[static_cast<std::size_t>(t)];
      std::vector<ComplexPoly> eqs;
      for (const RationalVector& c : forms) {
        RationalPoly acc(n);
        for (int j = 0; j < nh; ++j) acc += c[j] * f.components()[j];
        if (acc.is_zero()) {
          // the form annihilates the whole image span: degenerate draw
          ok = false;
          break;
        }
        eqs.push_back(to_complex_poly(acc));
      }
      if (!ok) break;
      PolySystem sys{std::move(eqs), n, std::nullopt};
      sys.bezout_bound = bezout_product(sys.equations);
      const SolverConfig c2 =
          cfg.with_seed(lrng.derive("solve").derive(static_cast<std::uint64_t>(t)).next_u64());
      // A converged point is a genuine section point only if its *projective*
      // image satisfies the forms: near a base point of the map the image
      // magnitude collapses and the raw equations are trivially small, but the
      // image direction sweeps the exceptional locus, far from the section.
      std::vector<ComplexVector> cforms;
      for (const RationalVector& c : forms) cforms.push_back(to_complex_vector(c));
      AcceptFn accept = [f, cforms](const ComplexVector& u) {
        const ComplexVector img = f.eval_raw(u);
        const double nf = img.norm();
        if (nf < 1e-12) return false;
        for (const ComplexVector& c : cforms)
          if (std::abs(c.dot(img)) > 1e-5 * c.norm() * nf) return false;
        return true;
      };
      const SolutionSet set = solve_square(sys, c2, accept);
      if (!set.saturated || set.continuum_suspected || set.singular_count() > 0) {
        ok = false;  // tangential or degenerate section: redraw the linear forms
        break;
      }
      if (agreed < 0)
        agreed = set.count();
      else if (agreed != set.count())
        ok = false;
    }
    if (ok && agreed >= 0) return agreed;
  }
  throw DegenerateDataError("degree: linear sections stayed degenerate or charts disagreed");
}

// ---------------------------------------------------------------------------
// Secant lines through a general point of P^3 for a curve given as an
// intersection of two quadrics: a line through p with direction point w is
// secant iff the two binary forms Q_i(s*p + t*w) are proportional, i.e. the
// 2x3 coefficient matrix [[c_i, B_i(p,w), Q_i(w)]] has rank 1. With c_i =
// Q_i(p) != 0 the two minors against the first column already force the
// third, which is kept as a consistency filter.
// ---------------------------------------------------------------------------

struct CiDraw {
  PolySystem sys;                 // minors restricted to a general plane, in (alpha, beta)
  std::vector<ComplexPoly> w;    // the plane parametrization, 4 linear components
  ComplexPoly m23;               // consistency minor
  std::vector<ComplexPoly> b;    // polar values B_i(p, w(alpha, beta))
  std::vector<ComplexPoly> a;    // Q_i(w(alpha, beta))
  ComplexVector p;               // the base point
  Complex c1, c2;
};

CiDraw ci_secant_system(const VarietyModel& model, const RationalVector& p, SplitRng rng) {
  const auto& Q = model.quadrics;
  const Rational c1 = Q[0].eval<Rational>(p);
  const Rational c2 = Q[1].eval<Rational>(p);
  if (c1 == Rational(0) || c2 == Rational(0))
    throw BasePointError("base point lies on a quadric of the pencil");
  RationalVector A = random_rational_point(rng, 4, 9);
  RationalVector B1 = random_rational_point(rng, 4, 9);
  RationalVector B2 = random_rational_point(rng, 4, 9);
  RationalMatrix dir(2, 4);
  dir.row(0) = B1.transpose();
  dir.row(1) = B2.transpose();
  if (rational_rank(dir) < 2) throw BasePointError("degenerate plane draw");
  std::vector<RationalPoly> w;
  for (int j = 0; j < 4; ++j) {
    RationalPoly wj = RationalPoly::constant(2, A[j]);
    wj += B1[j] * RationalPoly::variable(2, 0);
    wj += B2[j] * RationalPoly::variable(2, 1);
    w.push_back(std::move(wj));
  }
  std::vector<RationalPoly> b(2, RationalPoly(2)), a(2, RationalPoly(2));
  for (int i = 0; i < 2; ++i) {
    RationalPoly acc(2);
    for (int j = 0; j < 4; ++j) acc += Q[i].derivative(j).eval<Rational>(p) * w[j];
    b[i] = acc;
    a[i] = Q[i].compose(w);
  }
  std::vector<RationalPoly> eqs{c1 * b[1] - c2 * b[0], c1 * a[1] - c2 * a[0]};
  CiDraw d{PolySystem::from_rational(eqs, 2), {}, to_complex_poly(b[0] * a[1] - b[1] * a[0]),
           {}, {}, to_complex_vector(p), to_complex(c1), to_complex(c2)};
  d.sys.bezout_bound = 2;
  for (const RationalPoly& wj : w) d.w.push_back(to_complex_poly(wj));
  for (int i = 0; i < 2; ++i) {
    d.b.push_back(to_complex_poly(b[i]));
    d.a.push_back(to_complex_poly(a[i]));
  }
  return d;
}

ComplexVector ci_direction(const CiDraw& d, const ComplexVector& ab) {
  ComplexVector wv(4);
  for (int j = 0; j < 4; ++j) wv[j] = d.w[static_cast<std::size_t>(j)].eval<Complex>(ab);
  return wv;
}

bool ci_consistent(const CiDraw& d, const ComplexVector& ab) {
  const Complex b0 = d.b[0].eval<Complex>(ab), b1 = d.b[1].eval<Complex>(ab);
  const Complex a0 = d.a[0].eval<Complex>(ab), a1 = d.a[1].eval<Complex>(ab);
  const double scale = std::max(1.0, std::abs(b0 * a1) + std::abs(b1 * a0));
  return std::abs(d.m23.eval<Complex>(ab)) < 1e-6 * scale;
}

struct CiSecants {
  std::vector<ComplexVector> directions;  // one accepted w per secant line
  SolutionSet set;
  CiDraw draw;
};

CiSecants ci_secants(const VarietyModel& model, SplitRng rng, const SolverConfig& cfg) {
  for (int attempt = 0; attempt <= 5; ++attempt) {
    SplitRng arng = rng.derive(static_cast<std::uint64_t>(attempt));
    const RationalVector p = random_rational_point(arng, 4, 9);
    CiDraw d;
    try {
      d = ci_secant_system(model, p, arng.derive("plane"));
    } catch (const BasePointError&) {
      continue;
    }
    const CiDraw* dp = &d;
    AcceptFn accept = [dp](const ComplexVector& ab) {
      return ci_direction(*dp, ab).lpNorm<Eigen::Infinity>() > kImageFloor;
    };
    const SolverConfig c2 = cfg.with_seed(arng.derive("solve").next_u64());
    SolutionSet set = solve_square(d.sys, c2, accept);
    if (set.singular_count() > 0 && attempt < 5) continue;  // tangent pencil line: redraw
    CiSecants out{{}, std::move(set), std::move(d)};
    for (const Solution& s : out.set.solutions)
      if (ci_consistent(out.draw, s.point)) out.directions.push_back(ci_direction(out.draw, s.point));
    return out;
  }
  throw DegenerateDataError("secants of the quadric pencil stayed degenerate over retries");
}

}  // namespace

// ---------------------------------------------------------------------------

long degree_of(const VarietyModel& model, const SolverConfig& cfg) {
  model.validate();
  cfg.validate();
  SplitRng rng = SplitRng(cfg.seed).derive("degree");
  switch (model.kind) {
    case ModelKind::ImplicitCurveCI: {
      // a complete intersection meets a general line in exactly the Bezout
      // number of points; no numeric work needed
      long d = 1;
      for (const RationalPoly& q : model.quadrics) d *= q.total_degree();
      return d;
    }
    case ModelKind::Union: {
      long d = 0;
      for (std::size_t i = 0; i < model.components.size(); ++i)
        d += parametrized_degree(model.components[i], cfg, rng.derive(i));
      return d;
    }
    case ModelKind::Parametrized:
      return parametrized_degree(model.map(), cfg, rng);
  }
  throw ConfigError("unknown model kind");
}

long secant_dimension(const VarietyModel& model, const SolverConfig& cfg) {
  model.validate();
  cfg.validate();
  if (model.kind == ModelKind::ImplicitCurveCI)
    throw ConfigError("secant dimension needs a parametrized model");
  SplitRng rng = SplitRng(cfg.seed).derive("secant-dim");
  const std::size_t k = model.components.size();
  long best = -1;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const PolyMap& fa = model.components[a];
      const PolyMap& fb = model.components[b];
      for (int draw = 0; draw < 3; ++draw) {
        for (int attempt = 0;; ++attempt) {
          if (attempt > 5)
            throw DegenerateDataError("secant dimension: base points persisted over retries");
          SplitRng drng =
              rng.derive(a * 131 + b).derive(static_cast<std::uint64_t>(draw * 7 + attempt));
          try {
            const RationalVector u = random_rational_point(drng, fa.source_dim(), 9);
            const RationalVector v = random_rational_point(drng, fb.source_dim(), 9);
            const RationalMatrix fra = tangent_frame(fa, u);
            const RationalMatrix frb = tangent_frame(fb, v);
            RationalMatrix stack(fra.rows() + frb.rows(), fra.cols());
            stack.topRows(fra.rows()) = fra;
            stack.bottomRows(frb.rows()) = frb;
            best = std::max(best, static_cast<long>(rational_rank(stack)) - 1);
          } catch (const BasePointError&) {
            continue;
          }
          break;
        }
      }
    }
  }
  return best;
}

bool is_defective(const VarietyModel& model, const SolverConfig& cfg) {
  // non-degenerate space curves always have secants filling P^3
  if (model.kind == ModelKind::ImplicitCurveCI) return false;
  const long expected = std::min<long>(2L * model.variety_dim + 1, model.ambient_dim);
  return secant_dimension(model, cfg) < expected;
}

InvariantResult adp_count(const VarietyModel& model, const SolverConfig& cfg) {
  model.validate();
  cfg.validate();
  InvariantResult r;
  r.name = "nu";
  r.evidence.seed = cfg.seed;
  SplitRng rng = SplitRng(cfg.seed).derive("adp");
  const int N = model.ambient_dim;

  if (model.kind == ModelKind::ImplicitCurveCI) {
    long agreed = -1;
    for (int draw = 0; draw < 3; ++draw) {
      ++r.evidence.trials;
      CiSecants cs = ci_secants(model, rng.derive("ci").derive(static_cast<std::uint64_t>(draw)),
                                cfg);
      r.evidence.batches_run += cs.set.batches_run;
      r.flags.unsaturated = r.flags.unsaturated || !cs.set.saturated;
      r.flags.continuum = r.flags.continuum || cs.set.continuum_suspected;
      const long cnt = static_cast<long>(cs.directions.size());
      r.evidence.solutions_seen += static_cast<int>(cnt);
      // each secant line meets the general plane once, so counts are not halved
      if (agreed < 0)
        agreed = cnt;
      else if (agreed != cnt)
        throw DegenerateDataError("apparent double points: independent draws disagree");
    }
    r.value = agreed;
    return r;
  }

  if (model.kind == ModelKind::Parametrized) {
    const int n = model.variety_dim;
    if (N != 2 * n + 1)
      throw ConfigError("apparent double points are defined for X^n in P^{2n+1}");
    if (is_defective(model, cfg)) {
      r.flags.defective = true;
      r.value = 0;
      return r;
    }
    for (int attempt = 0; attempt <= 5; ++attempt) {
      ++r.evidence.trials;
      SplitRng arng = rng.derive(static_cast<std::uint64_t>(attempt));
      const RationalVector p = random_rational_point(arng, N + 1, 9);
      PolyMap f = model.map();
      if (attempt > 0) {
        SplitRng crng = arng.derive("chart");
        f = reparametrize(f, random_invertible_matrix(crng, n + 1, 9));
      }
      const SolverConfig c2 = cfg.with_seed(arng.derive("solve").next_u64());
      const SolutionSet set = solve_secant_pair(f, f, to_complex_vector(p), c2);
      r.evidence.batches_run += set.batches_run;
      if (set.singular_count() > 0 && attempt < 5) {
        ++r.evidence.redraws;  // multiple double point for this draw: redraw data and chart
        continue;
      }
      if (set.singular_count() > 0)
        throw DegenerateDataError("apparent double points: singular secants persisted");
      if (max_solution_coord(set) > 100.0) {
        // a secant foot sits near this chart's infinity, where conditioning
        // degrades; count on a fresh chart instead
        if (attempt == 5)
          throw DegenerateDataError("apparent double points: no chart kept the secants finite");
        ++r.evidence.redraws;
        continue;
      }
      r.evidence.solutions_seen += set.count();
      r.flags.unsaturated = !set.saturated;
      r.flags.continuum = set.continuum_suspected;
      if (!set.continuum_suspected && set.count() % 2 != 0)
        throw ParityViolationError("ordered secant count " + std::to_string(set.count()) +
                                   " is odd; the two-point symmetry was broken");
      r.value = set.count() / 2;
      return r;
    }
  }

  // Union: a secant through a general point either joins two components (each
  // such line appears once per ordered pair (a,b), a<b) or stays inside one
  // component (ordered two-point symmetry: halved).
  const std::size_t k = model.components.size();
  long total = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const PolyMap& fa = model.components[a];
      const PolyMap& fb = model.components[b];
      if (fa.source_dim() + fb.source_dim() + 1 != N)
        throw ConfigError("union secant system is not square for this component pair");
      for (int attempt = 0;; ++attempt) {
        if (attempt > 5)
          throw DegenerateDataError("apparent double points: singular secants persisted");
        ++r.evidence.trials;
        SplitRng prng = rng.derive(a * 97 + b).derive(static_cast<std::uint64_t>(attempt));
        const RationalVector p = random_rational_point(prng, N + 1, 9);
        const SolverConfig c2 = cfg.with_seed(prng.derive("solve").next_u64());
        const SolutionSet set = solve_secant_pair(fa, fb, to_complex_vector(p), c2);
        r.evidence.batches_run += set.batches_run;
        if (set.singular_count() > 0 || max_solution_coord(set) > 100.0) {
          ++r.evidence.redraws;
          continue;
        }
        r.evidence.solutions_seen += set.count();
        r.flags.unsaturated = r.flags.unsaturated || !set.saturated;
        r.flags.continuum = r.flags.continuum || set.continuum_suspected;
        if (a == b) {
          if (!set.continuum_suspected && set.count() % 2 != 0)
            throw ParityViolationError("ordered secant count on one component is odd");
          total += set.count() / 2;
        } else {
          total += set.count();
        }
        break;
      }
    }
  }
  r.value = total;
  return r;
}

EntryLocusResult entry_locus(const VarietyModel& model, const ProjectivePoint* p_in,
                             const SolverConfig& cfg) {
  model.validate();
  cfg.validate();
  if (model.kind == ModelKind::Union)
    throw ConfigError("entry locus is implemented for irreducible models only");
  SplitRng rng = SplitRng(cfg.seed).derive("entry-locus");
  EntryLocusResult out;

  if (model.kind == ModelKind::ImplicitCurveCI) {
    CiSecants cs = ci_secants(model, rng.derive("ci"), cfg);
    out.continuum_suspected = cs.set.continuum_suspected;
    for (const ComplexVector& w : cs.directions) {
      // contact points: roots of Q_1 restricted to the line s*p + t*w (t = 1;
      // t = 0 would need Q_1(p) = 0, excluded by the draw)
      ComplexVector grad(4);
      for (int j = 0; j < 4; ++j)
        grad[j] = model.quadrics[0].derivative(j).eval<Complex>(cs.draw.p);
      const Complex bv =
          std::inner_product(grad.data(), grad.data() + 4, w.data(), Complex(0));
      const Complex av = model.quadrics[0].eval<Complex>(w);
      const Complex cv = cs.draw.c1;
      const Complex disc = std::sqrt(bv * bv - 4.0 * cv * av);
      for (int sign = -1; sign <= 1; sign += 2) {
        const Complex s = (-bv + static_cast<double>(sign) * disc) / (2.0 * cv);
        const ComplexVector z = s * cs.draw.p + w;
        if (z.lpNorm<Eigen::Infinity>() < kImageFloor) continue;
        out.points.emplace_back(z);
      }
    }
    dedup_and_sort(out.points, cfg.dedup_tol);
    return out;
  }

  const PolyMap& f = model.map();
  const int n = model.variety_dim;
  const int m = 2 * n + 1;
  const int N = model.ambient_dim;

  ComplexVector pvec;
  if (p_in != nullptr) {
    pvec = p_in->coords();
  } else {
    // a general point of the secant variety: lambda*f(u) + (1-lambda)*f(v)
    for (int attempt = 0;; ++attempt) {
      if (attempt > 5) throw DegenerateDataError("entry locus: base-point draws persisted");
      SplitRng prng = rng.derive("point").derive(static_cast<std::uint64_t>(attempt));
      const RationalVector u = random_rational_point(prng, n, 9);
      const RationalVector v = random_rational_point(prng, n, 9);
      const Rational lam = prng.small_rational(9, 7);
      const RationalVector x = f.eval_exact(u), y = f.eval_exact(v);
      if (exact_zero(x) || exact_zero(y)) continue;
      RationalVector p(N + 1);
      for (int i = 0; i <= N; ++i) p[i] = lam * x[i] + (Rational(1) - lam) * y[i];
      if (exact_zero(p)) continue;
      pvec = to_complex_vector(normalize_exact(p));
      break;
    }
  }

  std::vector<ComplexPoly> eqs = secant_equations(f, f, pvec);
  const int extra = m - static_cast<int>(eqs.size());
  if (extra > 0) {
    // underdetermined secant system (ambient smaller than 2n+1): slice the
    // solution set with random affine-linear equations; any accepted point
    // certifies a positive-dimensional family
    SplitRng srng = rng.derive("slice");
    for (int s = 0; s < extra; ++s) {
      ComplexPoly slice = ComplexPoly::constant(m, Complex(srng.nonzero_int(9)));
      for (int j = 0; j < m; ++j)
        slice += Complex(srng.nonzero_int(9)) * ComplexPoly::variable(m, j);
      eqs.push_back(std::move(slice));
    }
  }
  PolySystem sys{std::move(eqs), m, std::nullopt};
  sys.bezout_bound = bezout_product(sys.equations);
  const SolverConfig c2 = cfg.with_seed(rng.derive("solve").next_u64());
  const SolutionSet set = static_cast<int>(sys.equations.size()) == m
                              ? solve_square(sys, c2, secant_accept(f, f))
                              : solve_overdetermined(sys, c2, secant_accept(f, f));
  out.continuum_suspected = set.continuum_suspected || (extra > 0 && set.count() > 0);
  for (const Solution& s : set.solutions) {
    const ComplexVector x = f.eval_raw(s.point.head(n));
    const ComplexVector y = f.eval_raw(s.point.segment(n, n));
    if (x.lpNorm<Eigen::Infinity>() > kImageFloor) out.points.emplace_back(x);
    if (y.lpNorm<Eigen::Infinity>() > kImageFloor) out.points.emplace_back(y);
  }
  dedup_and_sort(out.points, cfg.dedup_tol);
  return out;
}

long lines_through_point(const VarietyModel& model, const SolverConfig& cfg) {
  model.validate();
  cfg.validate();
  if (model.kind != ModelKind::Parametrized)
    throw ConfigError("line counting is implemented for parametrized models");
  const PolyMap& f = model.map();
  const int n = model.variety_dim;
  const int nh = model.ambient_dim + 1;
  SplitRng rng = SplitRng(cfg.seed).derive("lines");
  const std::vector<RationalPoly> quadrics =
      quadrics_through(model, default_quadric_samples(model), rng.derive("quadrics").next_u64());
  if (quadrics.empty())
    throw QuadricsInsufficientError("no quadrics vanish on the model; lines cannot be isolated");
  std::vector<std::vector<RationalPoly>> grads;
  for (const RationalPoly& q : quadrics) {
    std::vector<RationalPoly> g;
    for (int j = 0; j < nh; ++j) g.push_back(q.derivative(j));
    grads.push_back(std::move(g));
  }

  long agreed = -1;
  for (int trial = 0; trial < 3; ++trial) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 5) throw DegenerateDataError("line count: degenerate draws persisted");
      SplitRng trng =
          rng.derive("trial").derive(static_cast<std::uint64_t>(trial * 7 + attempt));
      const RationalVector u0 = random_rational_point(trng, n, 9);
      RationalVector x = f.eval_exact(u0);
      if (exact_zero(x)) continue;
      x = normalize_exact(x);
      // two affine-linear gauge conditions pick one direction point w per
      // line through x and exclude w proportional to x (g(x) != 0 exactly)
      const RationalVector hc = random_rational_point(trng, nh, 9);
      const RationalVector gc = random_rational_point(trng, nh, 9);
      if (dot_exact(hc, x) == Rational(0) || dot_exact(gc, x) == Rational(0)) continue;
      std::vector<RationalPoly> eqs;
      for (std::size_t i = 0; i < quadrics.size(); ++i) {
        RationalVector gx(nh);
        for (int j = 0; j < nh; ++j) gx[j] = grads[i][static_cast<std::size_t>(j)].eval<Rational>(x);
        // A quadric singular at x — e.g. the square of a linear form that
        // vanishes on a degenerate model — has a vacuous polar condition;
        // its constraint on the line survives through q(w) = 0 below.
        if (!exact_zero(gx)) eqs.push_back(linear_form(gx));  // polar B_q(x, w) = 0
        eqs.push_back(quadrics[i]);                           // q(w) = 0
      }
      eqs.push_back(linear_form(hc) - RationalPoly::constant(nh, Rational(1)));
      eqs.push_back(linear_form(gc));
      PolySystem sys = PolySystem::from_rational(eqs, nh);
      const SolverConfig c2 = cfg.with_seed(trng.derive("solve").next_u64());
      const SolutionSet set = solve_overdetermined(sys, c2);
      if (set.continuum_suspected)
        throw QuadricsInsufficientError(
            "the quadrics admit a positive-dimensional line family through the point");
      if (!set.saturated) continue;
      // An ill-conditioned phantom solution of the direction system shows up
      // as a fuzzy cluster: several converged copies of one direction
      // separated by noise above the dedup tolerance.  Such a draw is
      // unreliable (a genuine direction can be starved out by the phantom's
      // basin), so take a fresh base point and gauge.
      bool fuzzy = false;
      for (std::size_t a = 0; a < set.solutions.size() && !fuzzy; ++a)
        for (std::size_t b = a + 1; b < set.solutions.size() && !fuzzy; ++b) {
          const double scale = std::max(
              {set.solutions[a].point.norm(), set.solutions[b].point.norm(), 1e-30});
          fuzzy = (set.solutions[a].point - set.solutions[b].point).norm() < 1e-4 * scale;
        }
      if (fuzzy) continue;
      const ComplexVector xc = ProjectivePoint(to_complex_vector(x)).coords();
      const ComplexVector u0c = to_complex_vector(u0);
      const double mtol = std::max(1e-7, 100.0 * cfg.residual_tol);
      long cnt = 0;
      int si = 0;
      for (const Solution& s : set.solutions) {
        const ProjectivePoint wp(s.point);
        const ComplexVector mid = xc + wp.coords();
        // The preimage of the base point x is known exactly (u0), so track it
        // along the pencil x + eps*w with one seeded Newton run per step.  A
        // tracked endpoint whose image lands on the midpoint certifies
        // membership even when a global multi-start inversion would drown in
        // a contracted locus of f; a failed track proves nothing, so fall
        // back to the global test.
        bool member = false;
        try {
          ComplexVector ucur = u0c;
          double t = 0.0;   // progress along the segment from x to the midpoint
          double h = 0.25;  // adaptive step, halved when a step cannot be certified
          bool tracked = true;
          while (t < 1.0 - 1e-12) {
            const double tn = std::min(1.0, t + h);
            const ProjectivePoint pe(xc + tn * wp.coords());
            const PolySystem msys = preimage_system(f, pe);
            std::optional<Solution> step;
            for (double rt = cfg.residual_tol; !step && rt <= mtol && rt < cfg.dedup_tol;
                 rt *= 10.0) {
              SolverConfig rc = cfg;
              rc.residual_tol = rt;
              step = refine_root(msys, ucur, rc);
            }
            // Accept a step only if the refined point's image really sits on
            // the target: Newton can converge onto a contracted locus where
            // the cross-multiplied equations vanish identically, and such a
            // step must be subdivided, not followed.
            bool good = false;
            if (step) {
              try {
                good = evaluate_map(f, step->point).distance_to(pe) < mtol;
              } catch (const BasePointError&) {
              }
            }
            if (good) {
              ucur = step->point;
              t = tn;
              h = std::min(0.25, 2.0 * h);
            } else {
              h *= 0.5;
              if (h < 1e-3) {
                tracked = false;
                break;
              }
            }
          }
          if (tracked)
            member = evaluate_map(f, ucur).distance_to(ProjectivePoint(mid)) < mtol;
        } catch (const BasePointError&) {
        }
        const SolverConfig mcfg =
            cfg.with_seed(trng.derive("member").derive(static_cast<std::uint64_t>(si++)).next_u64());
        try {
          if (!member) member = membership_test(model, ProjectivePoint(mid), mcfg);
        } catch (const BasePointError&) {
        }
        if (member) ++cnt;
      }
      if (agreed < 0)
        agreed = cnt;
      else if (agreed != cnt)
        throw DegenerateDataError("line count: counts at independent base points disagree");
      break;
    }
  }
  return agreed;
}

namespace {

// Degree of the rational map u -> (a.f(u))_a cut out by the annihilator
// forms: fibers of a general target point, counted on a fresh random source
// chart per draw until three consecutive draws agree. Converged points are
// accepted only when their projection values align with the target
// direction (see the accept below); targets that collapse an equation or
// land on the contact-locus image are redrawn, as are disagreeing draws.
long projected_component_degree(const std::vector<RationalVector>& ann, const PolyMap& fc,
                                SplitRng rng, const SolverConfig& cfg, InvariantResult& r) {
  const int s = fc.source_dim();
  const int nh = fc.target_dim();
  const int K = static_cast<int>(ann.size());
  const auto project = [&ann, nh](const PolyMap& f) {
    std::vector<RationalPoly> P;
    for (const RationalVector& a : ann) {
      RationalPoly acc(f.source_dim());
      for (int j = 0; j < nh; ++j) acc += a[j] * f.components()[j];
      P.push_back(std::move(acc));
    }
    return P;
  };
  const std::vector<RationalPoly> P0 = project(fc);
  if (std::all_of(P0.begin(), P0.end(), [](const RationalPoly& p) { return p.is_zero(); }))
    return 0;  // the whole component lies inside the center of the projection

  long agreed = -1;
  int consecutive = 0;
  for (int draw = 0;; ++draw) {
    if (draw >= 10)
      throw DegenerateDataError("tangential projection: target draws kept disagreeing");
    ++r.evidence.trials;
    SplitRng drng = rng.derive("target").derive(static_cast<std::uint64_t>(draw));
    const std::vector<RationalPoly> P =
        draw == 0 ? P0 : project(affine_rechart(fc, drng.derive("chart")));
    std::vector<ComplexPoly> Pn;  // unit coefficient 2-norm
    std::vector<double> iscale;
    for (const RationalPoly& pk : P) {
      ComplexPoly pc = to_complex_poly(pk);
      double norm2 = 0.0;
      for (const auto& [mono, coef] : pc.terms()) norm2 += std::norm(coef);
      const double sc = 1.0 / std::sqrt(std::max(norm2, 1e-300));
      iscale.push_back(sc);
      Pn.push_back(Complex(sc) * pc);
    }
    const RationalVector q = random_rational_point(drng, K, 9);
    const int k0 = exact_pivot(q);
    std::vector<ComplexPoly> eqs;
    bool degenerate_target = false;
    for (int k = 0; k < K; ++k) {
      if (k == k0) continue;
      RationalPoly eq =
          q[k] * P[static_cast<std::size_t>(k0)] - q[k0] * P[static_cast<std::size_t>(k)];
      // an identically vanishing cross-multiple means the target sits exactly
      // on a collapsed image direction (two projections are proportional):
      // that draw carries no information, take a fresh one
      if (eq.is_zero()) {
        degenerate_target = true;
        break;
      }
      eqs.push_back(to_complex_poly(eq));
    }
    if (degenerate_target) {
      ++r.evidence.redraws;
      consecutive = 0;
      continue;
    }
    PolySystem sys{std::move(eqs), s, std::nullopt};
    sys.bezout_bound = bezout_product(sys.equations);
    // A genuine fiber point has P(u) proportional to the target q, so its
    // normalized projection values align with q's (identically rescaled)
    // direction to within residual / |P(u)|.  A base-locus artifact has
    // residual-scale magnitude and a direction the solved equations no
    // longer pin down.  Both tests are relative, so no absolute magnitude
    // floor is imposed on genuine points.
    ComplexVector qn(K);
    ComplexVector qcv = to_complex_vector(q);
    for (int k = 0; k < K; ++k) qn[k] = qcv[k] * iscale[static_cast<std::size_t>(k)];
    qn.normalize();
    AcceptFn accept = [&Pn, qn](const ComplexVector& u) {
      ComplexVector val(static_cast<int>(Pn.size()));
      for (std::size_t k = 0; k < Pn.size(); ++k)
        val[static_cast<Eigen::Index>(k)] = Pn[k].eval<Complex>(u);
      const double nv = val.norm();
      if (nv < 1e-8) return false;
      return (val - qn.dot(val) * qn).norm() < 1e-3 * nv;
    };
    const SolverConfig c2 = cfg.with_seed(drng.derive("solve").next_u64());
    const SolutionSet set = static_cast<int>(sys.equations.size()) == s
                                ? solve_square(sys, c2, accept)
                                : solve_overdetermined(sys, c2, accept);
    r.evidence.batches_run += set.batches_run;
    if (set.singular_count() > 0 || set.continuum_suspected || !set.saturated) {
      ++r.evidence.redraws;  // degenerate target: fiber met the contact locus
      consecutive = 0;
      continue;
    }
    r.evidence.solutions_seen += set.count();
    if (agreed == set.count()) {
      ++consecutive;
    } else {
      if (agreed >= 0) ++r.evidence.redraws;
      agreed = set.count();
      consecutive = 1;
    }
    if (consecutive >= 3) break;
  }
  if (agreed == 0) {
    const std::vector<RationalPoly>& P = P0;
    // no preimage of a general target: certify that the projected image has
    // dimension < s (the projection collapses, degree 0 by convention)
    SplitRng rrng = rng.derive("rank");
    int maxrank = 0;
    for (int t = 0; t < 50; ++t) {
      SplitRng prng = rrng.derive(static_cast<std::uint64_t>(t));
      const RationalVector u = random_rational_point(prng, s, 9);
      RationalMatrix mat(s + 1, K);
      for (int k = 0; k < K; ++k) {
        mat(0, k) = P[static_cast<std::size_t>(k)].eval<Rational>(u);
        for (int j = 0; j < s; ++j)
          mat(j + 1, k) = P[static_cast<std::size_t>(k)].derivative(j).eval<Rational>(u);
      }
      maxrank = std::max(maxrank, rational_rank(mat));
      if (maxrank == s + 1) break;
    }
    if (maxrank == s + 1)
      throw DegenerateDataError("tangential projection: dominant map with no visible fibers");
    return 0;
  }
  return agreed;
}

}  // namespace

InvariantResult tangential_projection_degree(const VarietyModel& model, const SolverConfig& cfg) {
  model.validate();
  cfg.validate();
  if (model.kind == ModelKind::ImplicitCurveCI)
    throw ConfigError("tangential projection needs a parametrized model");
  InvariantResult r;
  r.name = "delta";
  r.evidence.seed = cfg.seed;
  SplitRng rng = SplitRng(cfg.seed).derive("delta");
  const PolyMap& f0 = model.components.front();
  for (int attempt = 0;; ++attempt) {
    if (attempt > 5)
      throw DegenerateDataError("tangential projection: singular tangent frames persisted");
    SplitRng arng = rng.derive(static_cast<std::uint64_t>(attempt));
    std::vector<RationalVector> ann;
    try {
      const RationalVector u0 = random_rational_point(arng, f0.source_dim(), 9);
      ann = tangent_annihilator(f0, u0);
    } catch (const BasePointError&) {
      ++r.evidence.redraws;
      continue;
    }
    long total = 0;
    for (std::size_t c = 0; c < model.components.size(); ++c)
      total += projected_component_degree(ann, model.components[c], arng.derive(c), cfg, r);
    r.value = total;
    return r;
  }
}

TangentSectionResult tangent_section(const VarietyModel& model, const SolverConfig& cfg) {
  model.validate();
  cfg.validate();
  if (model.kind != ModelKind::Parametrized)
    throw ConfigError("tangent section needs an irreducible parametrized model");
  const PolyMap& f = model.map();
  const int n = model.variety_dim;
  const int nh = model.ambient_dim + 1;
  SplitRng rng = SplitRng(cfg.seed).derive("tangent-section");
  for (int attempt = 0;; ++attempt) {
    if (attempt > 5)
      throw DegenerateDataError("tangent section: singular tangent frames persisted");
    SplitRng arng = rng.derive(static_cast<std::uint64_t>(attempt));
    const RationalVector u0 = random_rational_point(arng, n, 9);
    std::vector<RationalVector> ann;
    try {
      ann = tangent_annihilator(f, u0);
    } catch (const BasePointError&) {
      continue;
    }
    if (static_cast<int>(ann.size()) < n)
      throw ConfigError("tangent section: the tangent space meets the model in a divisor");
    const RationalVector x0 = normalize_exact(f.eval_exact(u0));
    const ComplexVector x0c = ProjectivePoint(to_complex_vector(x0)).coords();
    std::vector<RationalPoly> section;
    for (const RationalVector& a : ann) {
      RationalPoly acc(n);
      for (int j = 0; j < nh; ++j) acc += a[j] * f.components()[j];
      section.push_back(std::move(acc));
    }
    const PolyMap fcopy = f;
    AcceptFn accept = [fcopy, x0c](const ComplexVector& u) {
      const ComplexVector img = fcopy.eval_raw(u);
      if (img.lpNorm<Eigen::Infinity>() < kImageFloor) return false;
      return ProjectivePoint(img).distance_to(ProjectivePoint(x0c)) > kDistinctTol;
    };
    // Count the positive-dimensional part on a hyperplane slice that misses
    // the contact point.  The unsliced section system has a critical zero at
    // u0 — every gradient there is the annihilator applied to a tangent
    // frame column — and its Newton basin swallows nearly all starts.  The
    // slice removes that attractor and cuts each line of the section down
    // to one isolated, regular solution.
    const RationalVector h = [&] {
      SplitRng hrng = arng.derive("slice");
      for (int t = 0; t < 20; ++t) {
        RationalVector cand = random_rational_point(hrng, nh, 9);
        if (dot_exact(cand, x0) != Rational(0)) return cand;
      }
      throw DegenerateDataError("tangent section: could not slice away the contact point");
    }();
    std::vector<ComplexPoly> eqs;
    for (const RationalPoly& g : section) eqs.push_back(to_complex_poly(g));
    RationalPoly hacc(n);
    for (int j = 0; j < nh; ++j) hacc += h[j] * f.components()[j];
    eqs.push_back(to_complex_poly(hacc));
    PolySystem sys{std::move(eqs), n, std::nullopt};
    sys.bezout_bound = bezout_product(sys.equations);
    SolverConfig c2 = cfg.with_seed(arng.derive("solve").next_u64());
    c2.max_batches = std::min(cfg.max_batches, 60);  // positive-dimensional sections saturate the budget
    const SolutionSet set = static_cast<int>(sys.equations.size()) == n
                                ? solve_square(sys, c2, accept)
                                : solve_overdetermined(sys, c2, accept);
    TangentSectionResult out;
    if (set.continuum_suspected) {
      // the sliced section is still positive-dimensional, so the section has
      // a component of dimension >= 2; per-component counts are meaningless
      out.continuum = true;
      return out;
    }

    // cluster slice solutions by collinearity with the contact point: one
    // cluster per line through it (a line meets a general hyperplane once;
    // duplicates are numerical copies)
    std::vector<ComplexVector> imgs;
    for (const Solution& s : set.solutions)
      imgs.push_back(ProjectivePoint(f.eval_raw(s.point)).coords());
    const int count = static_cast<int>(imgs.size());
    std::vector<int> parent(static_cast<std::size_t>(count));
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&parent](int i) {
      while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
      return i;
    };
    for (int i = 0; i < count; ++i) {
      for (int j = i + 1; j < count; ++j) {
        ComplexMatrix m(3, nh);
        m.row(0) = x0c.transpose();
        m.row(1) = imgs[static_cast<std::size_t>(i)].transpose();
        m.row(2) = imgs[static_cast<std::size_t>(j)].transpose();
        if (numeric_rank(m, 1e-6) <= 2) parent[static_cast<std::size_t>(find(j))] = find(i);
      }
    }
    int cluster_idx = 0;
    for (int i = 0; i < count; ++i) {
      if (find(i) != i) continue;  // one representative per cluster
      const ComplexVector mid = x0c + imgs[static_cast<std::size_t>(i)];
      const SolverConfig mcfg = cfg.with_seed(
          arng.derive("member").derive(static_cast<std::uint64_t>(cluster_idx++)).next_u64());
      bool on_line = false;
      try {
        on_line = membership_test(model, ProjectivePoint(mid), mcfg);
      } catch (const BasePointError&) {
      }
      if (on_line) {
        ++out.line_components;
      } else {
        // a slice only meets positive-dimensional components, so a solution
        // whose join with the contact point leaves the model certifies a
        // curve component that is not one of the lines
        out.continuum = true;
      }
    }

    // Isolated section points lie off every generic hyperplane, so hunt them
    // on the unsliced system; survivors of the accept filter that sit on
    // none of the certified lines are the isolated points.
    PolySystem usys{{}, n, std::nullopt};
    for (const RationalPoly& g : section) usys.equations.push_back(to_complex_poly(g));
    usys.bezout_bound = bezout_product(usys.equations);
    SolverConfig c3 = cfg.with_seed(arng.derive("solve-isolated").next_u64());
    c3.max_batches = std::min(cfg.max_batches, 60);
    const SolutionSet uset = static_cast<int>(usys.equations.size()) == n
                                 ? solve_square(usys, c3, accept)
                                 : solve_overdetermined(usys, c3, accept);
    int iso_idx = 0;
    for (const Solution& s : uset.solutions) {
      if (!s.regular()) continue;
      const ComplexVector img = ProjectivePoint(f.eval_raw(s.point)).coords();
      bool on_known_line = false;
      for (int i = 0; i < count && !on_known_line; ++i) {
        ComplexMatrix m(3, nh);
        m.row(0) = x0c.transpose();
        m.row(1) = imgs[static_cast<std::size_t>(i)].transpose();
        m.row(2) = img.transpose();
        on_known_line = numeric_rank(m, 1e-6) <= 2;
      }
      if (on_known_line) continue;
      const ComplexVector mid = x0c + img;
      const SolverConfig mcfg = cfg.with_seed(
          arng.derive("member-isolated").derive(static_cast<std::uint64_t>(iso_idx++)).next_u64());
      bool on_line = false;
      try {
        on_line = membership_test(model, ProjectivePoint(mid), mcfg);
      } catch (const BasePointError&) {
      }
      if (!on_line) ++out.isolated_points;
    }
    return out;
  }
}

}  // namespace oadp
