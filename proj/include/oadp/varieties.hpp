#pragma once

// Explicit rational models of the varieties in the one-apparent-double-point
// classification: rational normal scrolls, Segre products, Edge divisors on
// P^1 x P^n, curves on a smooth quadric surface, the quintic del Pezzo
// surface, the Veronese surface, the flag threefold P(T_{P^2}), the
// Grassmannian G(1,5), and the degree-8 scroll in P^7.

#include "oadp/polymap.hpp"
#include "oadp/rng.hpp"
#include "oadp/solver.hpp"

#include <string>
#include <vector>

namespace oadp {

enum class ModelKind { Parametrized, Union, ImplicitCurveCI };

struct VarietyModel {
  ModelKind kind = ModelKind::Parametrized;
  std::vector<PolyMap> components;       // 1 map, or >=2 for Union
  std::vector<RationalPoly> quadrics;    // 2 quadrics in 4 homogeneous vars (ImplicitCurveCI)
  int ambient_dim = 0;                   // N, the dimension of the ambient projective space
  int variety_dim = 0;                   // n
  std::string label;

  bool parametrized() const { return kind == ModelKind::Parametrized; }
  const PolyMap& map() const;            // single-component models only
  void validate() const;
};

VarietyModel scroll(const std::vector<int>& a);
VarietyModel segre(const std::vector<int>& m);
VarietyModel edge_variety(int n, int eps, SplitRng rng);
VarietyModel skew_lines();
VarietyModel curve_on_quadric(int a, int b, SplitRng rng);
VarietyModel veronese();
VarietyModel del_pezzo_quintic();
VarietyModel flag_threefold(SplitRng rng);
VarietyModel grassmannian_16();
VarietyModel degree8_scroll(SplitRng rng);

// Applies a random invertible projective transformation of the ambient space
// (same exact rational matrix to every component).
VarietyModel apply_random_coordinate_change(const VarietyModel& model, SplitRng rng);

// Cross-multiple preimage system of a parametrization at a projective target
// point: f_j(u) q_j0 - f_j0(u) q_j = 0 for j != j0, with j0 the pivot of q.
// Its solutions are the source points mapping into the line through q and
// the origin direction, i.e. the fiber of f over q when q is on the image.
PolySystem preimage_system(const PolyMap& f, const ProjectivePoint& q);

// Multi-start Gauss-Newton inversion of the parametrization; true iff some
// converged preimage lands within a relative image distance of q (1e-7 at
// the default residual tolerance).  The Newton residual target escalates
// toward the image tolerance when nothing converges, so targets that carry
// noise from an upstream numeric solve are still recognized.  Union models
// test each component.
bool membership_test(const VarietyModel& model, const ProjectivePoint& q, const SolverConfig& cfg);

}  // namespace oadp
