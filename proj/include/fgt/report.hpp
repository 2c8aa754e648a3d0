#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fgt/extraction.hpp"
#include "fgt/ingest.hpp"
#include "fgt/knowsim.hpp"
#include "fgt/taxonomy.hpp"
#include "fgt/uncertainty.hpp"

namespace fgt {

/// Percent with one decimal, rounded half-up.
std::string format_percent(double fraction);

/// One table entry: value, its std, and the ceiling, all fractions.
struct ReportCell {
  double value = 0;
  double std = 0;
  double ceiling = 0;

  /// "V ±S (C)" in percent with one decimal each, e.g. "12.9 ±0.4 (60.4)".
  std::string render() const;
};

struct Comparison {
  std::string name;
  std::vector<std::string> pre_paths;
  std::vector<std::string> post_paths;
  ComparisonContext context;
};

/// Everything one `compute` run needs.
struct RunManifest {
  std::vector<Comparison> comparisons;
  std::optional<std::string> taxonomy_path;
  ExtractionPolicy extraction = ExtractionPolicy::strict();
  UncertaintySpec uncertainty;
  JoinOptions join;
  std::string output_dir = "fgt-out";

  /// Relative paths are resolved against `base_dir`.
  static RunManifest from_json(const std::string& text, const std::string& base_dir = "");
  static RunManifest load(const std::string& path);
  /// Throws ConfigError if a referenced file does not exist or nothing is to be compared.
  void validate() const;
};

struct CategoryResult {
  CategoryMetrics metrics;
  MetricBundle std;
};

struct ComparisonResult {
  std::string name;
  UncertaintyMode uncertainty_mode = UncertaintyMode::Bootstrap;
  JoinReport join;
  ExtractionReport extraction_pre;
  ExtractionReport extraction_post;
  std::vector<std::pair<std::string, std::string>> run_pairs;
  std::vector<StratumInput> strata;
  std::size_t excluded_strata = 0;
  std::vector<CategoryResult> categories;
  CategoryResult total;
};

struct ComputeOutput {
  std::vector<ComparisonResult> comparisons;
  std::string results_json;
  std::string forgetting_table;
  std::string backward_transfer_table;
  std::string radar_csv;
};

/// Runs extract -> ingest -> taxonomy -> metrics -> uncertainty for every
/// comparison and renders all artifacts in memory.
ComputeOutput cmd_compute(const RunManifest& manifest);

/// Writes results.json, forgetting.md, backward_transfer.md and radar.csv.
void write_compute_output(const ComputeOutput& out, const std::string& dir);

struct SimulateOptions {
  PopulationSpec population;
  std::uint64_t runs = 1;
  std::string benchmark = "knowsim";
  std::string subtask = "";
  std::string pre_model = "sim-pre";
  std::string post_model = "sim-post";
};

struct SimulatedLogs {
  std::string pre;
  std::string post;
  std::string expected_json;
};

/// Synthetic pre/post snapshots in the ingest schema, plus the exact expectation.
SimulatedLogs cmd_simulate(const SimulateOptions& options);

/// Default taxonomy config as JSON text.
std::string cmd_taxonomy_export();

struct ExtractAudit {
  ExtractionReport report;
  std::uint64_t correct = 0;
  std::string outcomes_jsonl;
  std::string report_json;
};

/// Extraction audit over the raw records of one or more snapshots.
ExtractAudit cmd_extract(const std::vector<std::string>& paths, const ExtractionPolicy& policy);

std::string results_to_json(const RunManifest& manifest, const TaxonomyConfig& taxonomy,
                            const std::vector<ComparisonResult>& results);

std::string render_table(const std::vector<ComparisonResult>& results, const TaxonomyConfig& taxonomy,
                         bool forgetting);

}  // namespace fgt
