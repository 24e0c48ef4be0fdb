#pragma once

// Reporting layer behind the command-line tool: named single-invariant runs
// with a file-backed cache keyed by (entry, invariant, seed, config hash),
// and the full classification check rendered as deterministic JSON/CSV.

#include "oadp/catalog.hpp"
#include "oadp/invariants.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oadp {

inline constexpr const char* kVersion = "0.1.0";

// Stable hex digest of every solver-config field that can change computed
// values (seed and thread count excluded: the seed is part of the cache key
// and results are thread-invariant by construction).
std::string config_hash(const SolverConfig& cfg);

// Canonical invariant names accepted by run_invariant, with aliases matching
// the library function names (adp_count -> nu, lines_through_point -> k, ...).
std::vector<std::string> invariant_names();
std::string canonical_invariant(const std::string& name);  // throws UnknownInvariantError

struct RunRecord {
  std::string entry_id;
  std::string invariant;  // canonical name
  std::uint64_t seed = 0;
  std::string cfg_hash;
  long value = 0;
  std::vector<std::string> flags;  // defective / unsaturated / continuum / ...
  double wall_seconds = 0.0;
  std::string timestamp;  // UTC, informational; never part of the key
  bool cache_hit = false; // runtime-only, not serialized
};

// Computes one invariant of one entry (no cache involved).
RunRecord run_invariant(const CatalogEntry& entry, const std::string& invariant,
                        const SolverConfig& cfg);

// Append-only JSONL cache of RunRecords.  Lookup requires an exact key match
// on (entry, invariant, seed, config hash).  Corrupt lines are dropped on
// load and the file is rewritten from the surviving records.
class RunCache {
 public:
  explicit RunCache(std::string path);

  std::optional<RunRecord> lookup(const std::string& entry_id, const std::string& invariant,
                                  std::uint64_t seed, const std::string& cfg_hash) const;
  void store(const RunRecord& rec);

  const std::string& path() const { return path_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::string path_;
  std::vector<RunRecord> records_;
};

struct ReportCell {
  std::optional<long> expected;
  std::optional<long> computed;
  std::vector<std::string> flags;
  std::string error;  // empty unless the computation threw

  bool pass() const {
    if (!expected) return true;
    return error.empty() && computed && *computed == *expected;
  }
};

struct ReportRow {
  std::string id;
  int n = 0;
  int N = 0;
  bool oadp_candidate = false;
  ReportCell degree, nu, k, delta, secant_dim;
  bool pass = true;
};

struct ClassificationReport {
  std::uint64_t seed = 0;
  std::string cfg_hash;
  std::vector<ReportRow> rows;  // ordered by entry id
  bool pass = true;
};

// Runs degree / nu / k / delta / secant_dim for every catalog entry that
// carries the corresponding expectation; per-row errors are captured, not
// propagated.  `threads` > 1 computes rows concurrently; assembly stays
// ordered by id and byte-deterministic for a fixed seed.
ClassificationReport classification_check(const std::vector<CatalogEntry>& entries,
                                          const SolverConfig& cfg, int threads = 1);

// Deterministic renderings: no timestamps, fixed key order, fixed row order.
std::string report_json(const ClassificationReport& r);
std::string report_csv(const ClassificationReport& r);

// Catalog listings (optionally filtered to one variety dimension).
std::string catalog_text(const std::vector<CatalogEntry>& entries, std::optional<int> dim);
std::string catalog_json(const std::vector<CatalogEntry>& entries, std::optional<int> dim);

}  // namespace oadp
