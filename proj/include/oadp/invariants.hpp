#pragma once

// Projective invariants of a variety model, each reduced to polynomial
// systems solved numerically plus exact rational ranks: degree, number of
// apparent double points (nu), secant-variety dimension, entry locus of a
// general point, lines through a general point, and the degree of the

// tangential projection (delta).

#include "oadp/solver.hpp"
#include "oadp/varieties.hpp"

#include <set>
#include <string>

namespace oadp {

struct InvariantFlags {
  bool defective = false;
  bool unsaturated = false;
  bool chart_disagreement = false;
  bool continuum = false;
};

struct InvariantEvidence {
  std::uint64_t seed = 0;
  int trials = 0;
  int batches_run = 0;        // summed over trials
  int solutions_seen = 0;     // accepted, deduplicated, summed over trials
  int redraws = 0;
};

struct InvariantResult {
  std::string name;
  long value = 0;
  InvariantFlags flags;
  InvariantEvidence evidence;
};

long degree_of(const VarietyModel& model, const SolverConfig& cfg);
InvariantResult adp_count(const VarietyModel& model, const SolverConfig& cfg);
long secant_dimension(const VarietyModel& model, const SolverConfig& cfg);

struct EntryLocusResult {
  std::vector<ProjectivePoint> points;  // deduplicated image points on X
  bool continuum_suspected = false;
};
// p, when absent, is drawn at random from the config seed.
EntryLocusResult entry_locus(const VarietyModel& model, const ProjectivePoint* p,
                             const SolverConfig& cfg);

long lines_through_point(const VarietyModel& model, const SolverConfig& cfg);
InvariantResult tangential_projection_degree(const VarietyModel& model, const SolverConfig& cfg);

struct TangentSectionResult {
  int isolated_points = 0;
  int line_components = 0;
  bool continuum = false;  // residual positive-dimensional part beyond the lines
};
TangentSectionResult tangent_section(const VarietyModel& model, const SolverConfig& cfg);

bool is_defective(const VarietyModel& model, const SolverConfig& cfg);

}  // namespace oadp
