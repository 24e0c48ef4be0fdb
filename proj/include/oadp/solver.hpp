#pragma once

// Multi-start damped Newton engine for small square (and mildly
// overdetermined) polynomial systems, with a saturation-based completeness
// protocol: seeded batches of complex Gaussian starts are run until many
// consecutive batches stop producing new deduplicated solutions.

#include "oadp/multipoly.hpp"
#include "oadp/polymap.hpp"
#include "oadp/rng.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace oadp {

struct PolySystem {
  std::vector<ComplexPoly> equations;
  int num_vars = 0;
  std::optional<long> bezout_bound;  // product of degrees when square

  static PolySystem from_rational(const std::vector<RationalPoly>& eqs, int num_vars);
};

enum class MultiplicityFlag { regular, singular };

struct Solution {
  ComplexVector point;           // affine coordinates of the unknowns
  double residual = 0.0;         // max |equation| after unit-coefficient scaling
  double jacobian_smallest_sv = 0.0;
  MultiplicityFlag multiplicity_flag = MultiplicityFlag::regular;

  bool regular() const { return multiplicity_flag == MultiplicityFlag::regular; }
};

struct SolutionSet {
  std::vector<Solution> solutions;  // canonically ordered
  int batches_run = 0;
  bool saturated = false;
  bool continuum_suspected = false;

  int count() const { return static_cast<int>(solutions.size()); }
  int singular_count() const;
};

struct SolverConfig {
  double residual_tol = 1e-9;
  double dedup_tol = 1e-6;
  double singular_tol = 1e-7;
  int batch_size = 200;
  int saturation_batches = 20;
  int max_batches = 500;
  int newton_max_iters = 100;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
  SolverConfig with_seed(std::uint64_t s) const {
    SolverConfig c = *this;
    c.seed = s;
    return c;
  }
};

// Optional filter applied to converged points *before* deduplication and
// saturation bookkeeping; lets callers structurally discard known-degenerate
// families (base-locus points, the improper diagonal of secant systems)
// without poisoning the completeness protocol.
using AcceptFn = std::function<bool(const ComplexVector&)>;

// Square systems, plain damped Newton steps.
SolutionSet solve_square(const PolySystem& sys, const SolverConfig& cfg, const AcceptFn& accept = {});

// equations >= num_vars, Gauss-Newton least-squares steps; converged points
// are accepted only when every individual equation residual is small (true
// roots, not mere local minima of the squared norm).
SolutionSet solve_overdetermined(const PolySystem& sys, const SolverConfig& cfg,
                                 const AcceptFn& accept = {});

// Single damped-Newton run from a caller-supplied start; returns the terminal
// point when Newton reaches cfg.residual_tol, classified like the multi-start
// drivers classify their solutions.  Lets callers track a known root under a
// small perturbation of the system instead of paying for (and risking) a
// fresh global multi-start search.
std::optional<Solution> refine_root(const PolySystem& sys, const ComplexVector& start,
                                    const SolverConfig& cfg);

}  // namespace oadp
