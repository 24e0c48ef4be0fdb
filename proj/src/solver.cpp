#include "oadp/solver.hpp"

#include "oadp/errors.hpp"
#include "oadp/projective.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <thread>
#include <utility>

namespace oadp {

namespace {

constexpr int kMaxVars = 12;
constexpr int kMaxPow = 24;
constexpr double kHugeCoord = 1e8;   // converged iterates beyond this are escaping junk
constexpr double kDivergence = 1e12; // abort a Newton run that wanders this far out
constexpr int kMaxHalvings = 45;

using MonoKey = std::array<std::uint8_t, kMaxVars>;

struct CTerm {
  Complex coeff;
  int mono;
};

struct CPoly {
  std::vector<CTerm> terms;
};

struct EvalScratch {
  std::vector<Complex> monovals;
};

// Flattened evaluator: every distinct monomial across the equations and their
// partial derivatives is evaluated exactly once per point via shared power
// tables; each polynomial is then an inner product against that table.
class CompiledSystem {
 public:
  CompiledSystem(const std::vector<ComplexPoly>& equations, int nvars) : nvars_(nvars) {
    if (nvars < 1 || nvars > kMaxVars)
      throw ConfigError("compiled solver supports 1.." + std::to_string(kMaxVars) + " unknowns");
    neqs_ = static_cast<int>(equations.size());
    max_pow_.fill(0);

    std::vector<ComplexPoly> scaled;
    scaled.reserve(equations.size());
    for (const ComplexPoly& eq : equations) {
      double norm2 = 0.0;
      for (const auto& [mono, c] : eq.terms()) norm2 += std::norm(c);
      if (norm2 == 0.0) throw ConfigError("identically zero equation in polynomial system");
      scaled.push_back((1.0 / std::sqrt(norm2)) * eq);
    }

    for (const ComplexPoly& eq : scaled) eqs_.push_back(compile(eq));
    eq_mono_count_ = static_cast<int>(monos_.size());
    for (const ComplexPoly& eq : scaled)
      for (int v = 0; v < nvars_; ++v) jac_.push_back(compile(eq.derivative(v)));
  }

  int nvars() const { return nvars_; }
  int neqs() const { return neqs_; }

  void eval(const ComplexVector& x, EvalScratch& ws, ComplexVector& F) const {
    fill_monovals(x, ws, eq_mono_count_);
    for (int i = 0; i < neqs_; ++i) F[i] = sum(eqs_[i], ws);
  }

  void eval_with_jacobian(const ComplexVector& x, EvalScratch& ws, ComplexVector& F,
                          ComplexMatrix& J) const {
    fill_monovals(x, ws, static_cast<int>(monos_.size()));
    for (int i = 0; i < neqs_; ++i) {
      F[i] = sum(eqs_[i], ws);
      for (int v = 0; v < nvars_; ++v) J(i, v) = sum(jac_[i * nvars_ + v], ws);
    }
  }

 private:
  CPoly compile(const ComplexPoly& p) {
    CPoly out;
    for (const auto& [mono, c] : p.terms()) {
      MonoKey key{};
      for (std::size_t v = 0; v < mono.size(); ++v) {
        if (mono[v] == 0) continue;
        if (static_cast<int>(v) >= kMaxVars)
          throw ConfigError("too many variables for compiled system");
        if (mono[v] < 0 || mono[v] > kMaxPow)
          throw ConfigError("monomial degree exceeds compiled power-table range");
        key[v] = static_cast<std::uint8_t>(mono[v]);
        max_pow_[v] = std::max(max_pow_[v], static_cast<int>(mono[v]));
      }
      auto [it, fresh] = mono_index_.emplace(key, static_cast<int>(monos_.size()));
      if (fresh) monos_.push_back(key);
      out.terms.push_back({c, it->second});
    }
    return out;
  }

  void fill_monovals(const ComplexVector& x, EvalScratch& ws, int upto) const {
    Complex pows[kMaxVars][kMaxPow + 1];
    for (int v = 0; v < nvars_; ++v) {
      pows[v][0] = Complex(1.0, 0.0);
      const Complex xv = x[v];
      for (int d = 1; d <= max_pow_[v]; ++d) pows[v][d] = pows[v][d - 1] * xv;
    }
    ws.monovals.resize(monos_.size());
    for (int k = 0; k < upto; ++k) {
      const MonoKey& key = monos_[k];
      Complex m(1.0, 0.0);
      for (int v = 0; v < nvars_; ++v)
        if (key[v] != 0) m *= pows[v][key[v]];
      ws.monovals[k] = m;
    }
  }

  static Complex sum(const CPoly& p, const EvalScratch& ws) {
    Complex acc(0.0, 0.0);
    for (const CTerm& t : p.terms) acc += t.coeff * ws.monovals[t.mono];
    return acc;
  }

  int nvars_;
  int neqs_ = 0;
  int eq_mono_count_ = 0;
  std::vector<CPoly> eqs_;
  std::vector<CPoly> jac_;
  std::vector<MonoKey> monos_;
  std::map<MonoKey, int> mono_index_;
  std::array<int, kMaxVars> max_pow_{};
};

double inf_norm(const ComplexVector& v) { return v.cwiseAbs().maxCoeff(); }

// Start scales cycle over three radii so that roots far outside the unit box
// still get basin hits; a single narrow scale starves them when a strong
// attractor (e.g. a base point of a parametrization) sits near the origin.
ComplexVector gaussian_start(SplitRng rng, int nvars, double scale) {
  ComplexVector x(nvars);
  for (int i = 0; i < nvars; ++i) x[i] = rng.complex_normal(scale);
  return x;
}

// Damped Newton (Gauss-Newton when rectangular): full step first, halved until
// the scaled max-residual strictly decreases.
bool newton_run(const CompiledSystem& cs, ComplexVector x, const SolverConfig& cfg,
                EvalScratch& ws, ComplexVector& out, double& out_res) {
  const int n = cs.nvars();
  const int m = cs.neqs();
  ComplexVector F(m), Ftrial(m), dx(n), xt(n);
  ComplexMatrix J(m, n);
  cs.eval(x, ws, F);
  double res = inf_norm(F);
  if (!std::isfinite(res)) return false;
  int stalled = 0;  // least-squares flows on inconsistent systems plateau above tol
  for (int iter = 0; iter < cfg.newton_max_iters; ++iter) {
    if (res < cfg.residual_tol) {
      out = x;
      out_res = res;
      return true;
    }
    cs.eval_with_jacobian(x, ws, F, J);
    dx = J.colPivHouseholderQr().solve(-F);
    if (!dx.allFinite()) return false;
    double t = 1.0;
    bool moved = false;
    const double prev = res;
    for (int h = 0; h < kMaxHalvings; ++h) {
      xt = x + t * dx;
      cs.eval(xt, ws, Ftrial);
      const double rt = inf_norm(Ftrial);
      if (std::isfinite(rt) && rt < res) {
        x.swap(xt);
        res = rt;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return false;
    if (res > 100.0 * cfg.residual_tol && res > 0.999 * prev) {
      if (++stalled >= 5) return false;
    } else {
      stalled = 0;
    }
    if (x.cwiseAbs().maxCoeff() > kDivergence) return false;
  }
  if (res < cfg.residual_tol) {
    out = x;
    out_res = res;
    return true;
  }
  return false;
}

double round12(double v) { return std::round(v * 1e12) / 1e12; }

bool canonical_less(const ComplexVector& a, const ComplexVector& b) {
  for (int i = 0; i < a.size(); ++i) {
    const double ar = round12(a[i].real()), br = round12(b[i].real());
    if (ar != br) return ar < br;
    const double ai = round12(a[i].imag()), bi = round12(b[i].imag());
    if (ai != bi) return ai < bi;
  }
  return false;
}

// Componentwise relative distance: solutions with large coordinates carry
// proportionally larger Newton termination scatter, so a fixed absolute
// tolerance would split one root into a cloud of copies.
double solution_distance(const ComplexVector& a, const ComplexVector& b) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]) / (1.0 + std::abs(a[i]) + std::abs(b[i])));
  return d;
}

struct Candidate {
  bool converged = false;
  ComplexVector x;
  double residual = 0.0;
};

// Singular solutions lying in a chain (each within 100x dedup_tol of another)
// indicate we are sampling a positive-dimensional component rather than
// isolated multiple roots.
bool chained_singular_cluster(const std::vector<Solution>& sols, double dedup_tol) {
  std::vector<const Solution*> sing;
  for (const Solution& s : sols)
    if (!s.regular()) sing.push_back(&s);
  const int k = static_cast<int>(sing.size());
  if (k < 5) return false;
  const double link = 100.0 * dedup_tol;
  std::vector<int> comp(k, -1);
  int best = 0;
  for (int i = 0; i < k; ++i) {
    if (comp[i] != -1) continue;
    int size = 0;
    std::vector<int> stack{i};
    comp[i] = i;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      ++size;
      for (int j = 0; j < k; ++j)
        if (comp[j] == -1 && solution_distance(sing[c]->point, sing[j]->point) <= link) {
          comp[j] = i;
          stack.push_back(j);
        }
    }
    best = std::max(best, size);
  }
  return best >= 5;
}

SolutionSet run_engine(const PolySystem& sys, const SolverConfig& cfg, const AcceptFn& accept) {
  cfg.validate();
  // a nonzero constant equation makes the system inconsistent: empty and done
  for (const ComplexPoly& e : sys.equations)
    if (!e.is_zero() && e.total_degree() == 0) {
      SolutionSet empty;
      empty.saturated = true;
      return empty;
    }
  CompiledSystem cs(sys.equations, sys.num_vars);
  const int n = cs.nvars();
  const int m = cs.neqs();
  SplitRng base(cfg.seed);
  SplitRng starts = base.derive("starts");

  SolutionSet result;
  std::vector<Solution> found;
  int quiet = 0;
  int growth_streak = 0;  // consecutive batches that each added a new singular solution
  int swell_streak = 0;   // consecutive batches that each added any new solution

  EvalScratch merge_ws;
  ComplexVector Fchk(m);
  ComplexMatrix Jchk(m, n);

  std::vector<Candidate> candidates(cfg.batch_size);

  for (int batch = 0; batch < cfg.max_batches; ++batch) {
    auto run_range = [&](int lo, int hi) {
      EvalScratch ws;
      for (int s = lo; s < hi; ++s) {
        const std::uint64_t global =
            static_cast<std::uint64_t>(batch) * static_cast<std::uint64_t>(cfg.batch_size) + s;
        Candidate& c = candidates[s];
        const double sscale = 2.0 * std::pow(4.0, static_cast<double>(global % 3));
        c.converged = newton_run(cs, gaussian_start(starts.derive(global), n, sscale), cfg, ws,
                                 c.x, c.residual);
      }
    };
    if (cfg.threads <= 1) {
      run_range(0, cfg.batch_size);
    } else {
      // Starts are keyed by global index, so the partition cannot change results.
      std::vector<std::thread> pool;
      const int chunk = (cfg.batch_size + cfg.threads - 1) / cfg.threads;
      for (int t = 0; t < cfg.threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(cfg.batch_size, lo + chunk);
        if (lo < hi) pool.emplace_back(run_range, lo, hi);
      }
      for (std::thread& th : pool) th.join();
    }

    bool any_new = false;
    bool new_singular = false;
    for (int s = 0; s < cfg.batch_size; ++s) {
      Candidate& c = candidates[s];
      if (!c.converged) continue;
      if (c.x.cwiseAbs().maxCoeff() > kHugeCoord) continue;
      if (accept && !accept(c.x)) continue;
      int dup = -1;
      for (std::size_t i = 0; i < found.size(); ++i)
        if (solution_distance(found[i].point, c.x) < cfg.dedup_tol) {
          dup = static_cast<int>(i);
          break;
        }
      if (dup >= 0) {
        if (c.residual < found[dup].residual) {
          found[dup].point = c.x;
          found[dup].residual = c.residual;
        }
        continue;
      }
      Solution sol;
      sol.point = c.x;
      sol.residual = c.residual;
      cs.eval_with_jacobian(sol.point, merge_ws, Fchk, Jchk);
      Eigen::JacobiSVD<ComplexMatrix> svd(Jchk);
      sol.jacobian_smallest_sv = svd.singularValues()(svd.singularValues().size() - 1);
      sol.multiplicity_flag = sol.jacobian_smallest_sv > cfg.singular_tol
                                  ? MultiplicityFlag::regular
                                  : MultiplicityFlag::singular;
      if (!sol.regular()) new_singular = true;
      found.push_back(std::move(sol));
      any_new = true;
    }

    ++result.batches_run;
    quiet = any_new ? 0 : quiet + 1;
    growth_streak = new_singular ? growth_streak + 1 : 0;

    if (chained_singular_cluster(found, cfg.dedup_tol)) {
      result.continuum_suspected = true;
      break;
    }
    const int singular_total =
        static_cast<int>(std::count_if(found.begin(), found.end(),
                                       [](const Solution& s) { return !s.regular(); }));
    if (growth_streak >= 10 && singular_total >= 30) {
      result.continuum_suspected = true;
      break;
    }
    swell_streak = any_new ? swell_streak + 1 : 0;
    // far more deduplicated solutions than any isolated system at this scale
    // can have, and they keep coming: a solution family the singularity
    // heuristics missed
    if (swell_streak >= 10 && static_cast<int>(found.size()) >= 500) {
      result.continuum_suspected = true;
      break;
    }
    if (quiet >= cfg.saturation_batches) {
      result.saturated = true;
      break;
    }
  }

  std::sort(found.begin(), found.end(),
            [](const Solution& a, const Solution& b) { return canonical_less(a.point, b.point); });
  result.solutions = std::move(found);
  return result;
}

}  // namespace

int SolutionSet::singular_count() const {
  return static_cast<int>(
      std::count_if(solutions.begin(), solutions.end(), [](const Solution& s) { return !s.regular(); }));
}

void SolverConfig::validate() const {
  if (residual_tol <= 0 || dedup_tol <= 0 || singular_tol <= 0)
    throw ConfigError("solver tolerances must be positive");
  if (residual_tol >= dedup_tol)
    throw ConfigError("residual_tol must be smaller than dedup_tol");
  if (batch_size < 1 || saturation_batches < 1 || newton_max_iters < 1 || threads < 1)
    throw ConfigError("solver counts must be positive");
  if (max_batches < saturation_batches)
    throw ConfigError("max_batches must be at least saturation_batches");
}

PolySystem PolySystem::from_rational(const std::vector<RationalPoly>& eqs, int num_vars) {
  PolySystem sys;
  sys.num_vars = num_vars;
  sys.equations.reserve(eqs.size());
  long bound = 1;
  for (const RationalPoly& e : eqs) {
    sys.equations.push_back(to_complex_poly(e));
    bound *= std::max(1, e.total_degree());
  }
  if (static_cast<int>(eqs.size()) == num_vars) sys.bezout_bound = bound;
  return sys;
}

SolutionSet solve_square(const PolySystem& sys, const SolverConfig& cfg, const AcceptFn& accept) {
  if (static_cast<int>(sys.equations.size()) != sys.num_vars)
    throw NonSquareError("solve_square requires #equations == #unknowns, got " +
                         std::to_string(sys.equations.size()) + " equations in " +
                         std::to_string(sys.num_vars) + " unknowns");
  return run_engine(sys, cfg, accept);
}

SolutionSet solve_overdetermined(const PolySystem& sys, const SolverConfig& cfg,
                                 const AcceptFn& accept) {
  if (static_cast<int>(sys.equations.size()) < sys.num_vars)
    throw NonSquareError("solve_overdetermined requires #equations >= #unknowns");
  return run_engine(sys, cfg, accept);
}

std::optional<Solution> refine_root(const PolySystem& sys, const ComplexVector& start,
                                    const SolverConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(start.size()) != sys.num_vars)
    throw ConfigError("refine_root start dimension does not match the system");
  if (static_cast<int>(sys.equations.size()) < sys.num_vars)
    throw NonSquareError("refine_root requires #equations >= #unknowns");
  // a vacuous or inconsistent-constant equation: nothing can be certified
  for (const ComplexPoly& e : sys.equations)
    if (e.is_zero() || e.total_degree() == 0) return std::nullopt;
  const CompiledSystem cs(sys.equations, sys.num_vars);
  EvalScratch ws;
  ComplexVector out(cs.nvars());
  double res = 0.0;
  if (!newton_run(cs, start, cfg, ws, out, res)) return std::nullopt;
  Solution sol;
  sol.point = out;
  sol.residual = res;
  ComplexVector F(cs.neqs());
  ComplexMatrix J(cs.neqs(), cs.nvars());
  cs.eval_with_jacobian(out, ws, F, J);
  Eigen::JacobiSVD<ComplexMatrix> svd(J);
  sol.jacobian_smallest_sv = svd.singularValues()(svd.singularValues().size() - 1);
  sol.multiplicity_flag = sol.jacobian_smallest_sv > cfg.singular_tol ? MultiplicityFlag::regular
                                                                      : MultiplicityFlag::singular;
  return sol;
}

}  // namespace oadp
