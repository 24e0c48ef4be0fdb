#pragma once

// The catalog: every variety in the classification with its expected integer
// invariants (each carrying a short citation note), plus exact computation of
// the quadrics through a model and a declarative text config format.

#include "oadp/varieties.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oadp {

struct ExpectedValue {
  std::optional<long> value;
  std::string note;  // where the number comes from (classical fact / derivation)
};

struct ExpectedInvariants {
  ExpectedValue degree;
  ExpectedValue nu;
  ExpectedValue secant_dim;
  ExpectedValue lines;  // lines through a general point
  ExpectedValue delta;  // tangential projection degree
  ExpectedValue quadric_count;
};

struct CatalogEntry {
  std::string id;
  std::string constructor;
  std::vector<long> args;
  std::uint64_t seed = 0;  // per-entry model seed
  bool oadp_candidate = false;
  bool run_lines = false;  // lines_through_point is finite and worth running
  VarietyModel model;
  ExpectedInvariants expected;
};

// Rebuilds the model of an entry from its declarative description.
VarietyModel build_model(const std::string& constructor, const std::vector<long>& args,
                         std::uint64_t seed);

std::vector<CatalogEntry> default_catalog(std::uint64_t seed);

const CatalogEntry* find_entry(const std::vector<CatalogEntry>& entries, const std::string& id);

// Exact basis of the quadrics vanishing on the model: rational kernel of the
// evaluation matrix of all degree-2 monomials at `samples` random parameter
// points. Requires samples >= 3 * (number of degree-2 monomials in N+1 vars).
std::vector<RationalPoly> quadrics_through(const VarietyModel& model, int samples,
                                           std::uint64_t seed = 12345);

int default_quadric_samples(const VarietyModel& model);

// Declarative text config: one record per entry (id, constructor, integer
// arguments, seed, flags, expected invariants); rational values as "p/q".
std::string serialize_catalog(const std::vector<CatalogEntry>& entries);
std::vector<CatalogEntry> parse_catalog(const std::string& text);

}  // namespace oadp
