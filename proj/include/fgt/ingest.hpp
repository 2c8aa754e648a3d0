#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fgt/extraction.hpp"
#include "fgt/transition.hpp"

namespace fgt {

/// One line of a snapshot log.
///
/// A record is "pre-scored" when `correct` is present and "raw" when it
/// carries the generated text; raw records also need `gold` and `options`
/// and are scored by the extraction policy before joining.
struct SampleRecord {
  std::string model_id;
  std::string benchmark;
  std::string subtask;
  std::string sample_key;
  int k = 0;
  std::string run_id = "0";
  std::optional<Correctness> correct;
  std::optional<std::string> generation;
  std::optional<std::string> gold;
  std::vector<ChoiceOption> options;

  bool is_raw() const noexcept { return !correct.has_value(); }
  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string kind;  // "SchemaError" or "DuplicateKey"
  std::string field;
  std::string message;
};

struct ParseResult {
  std::vector<SampleRecord> records;
  std::vector<ParseIssue> issues;

  bool ok() const noexcept { return issues.empty(); }
  /// Throws SchemaError or DuplicateKey for the first issue, if any.
  void raise_first() const;
};

/// Parses a line-delimited JSON snapshot. Blank lines are skipped; every
/// malformed line is reported with its 1-based line number.
ParseResult parse_snapshot(std::istream& in);
ParseResult parse_snapshot_file(const std::string& path);

std::string serialize_record(const SampleRecord& r);
void write_snapshot(std::ostream& out, const std::vector<SampleRecord>& records);

/// Scores raw records in place via `policy`; pre-scored records are left as
/// they are. The report covers the raw records only.
ExtractionReport score_snapshot(std::vector<SampleRecord>& records, const ExtractionPolicy& policy);

enum class RunPairing : std::uint8_t { Positional, CrossProduct };

RunPairing parse_run_pairing(const std::string& s);
std::string_view to_string(RunPairing p) noexcept;

struct StratumKey {
  std::string benchmark;
  std::string subtask;
  std::string pre_run;
  std::string post_run;
  auto operator<=>(const StratumKey&) const = default;
};

struct JoinReport {
  std::uint64_t matched = 0;
  std::uint64_t pre_only = 0;
  std::uint64_t post_only = 0;
  std::uint64_t k_conflicts = 0;
};

struct JoinOptions {
  RunPairing pairing = RunPairing::Positional;
  /// Throw KConflict on the first item whose k differs; otherwise count and drop.
  bool strict_k = true;
};

struct JoinResult {
  std::map<StratumKey, std::vector<JoinedSample>> strata;
  JoinReport report;
  /// Run-id pairs in the order they were joined.
  std::vector<std::pair<std::string, std::string>> run_pairs;
};

/// Joins two scored snapshots on (benchmark, subtask, sample_key) within each
/// paired run. Runs are paired positionally after sorting run ids
/// lexicographically, or all against all with RunPairing::CrossProduct.
JoinResult join_snapshots(const std::vector<SampleRecord>& pre, const std::vector<SampleRecord>& post,
                          const JoinOptions& options = {});

}  // namespace fgt
