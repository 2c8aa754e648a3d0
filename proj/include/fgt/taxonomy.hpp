#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgt/ingest.hpp"
#include "fgt/transition.hpp"

namespace fgt {

/// Maps (benchmark, subtask) to a category; first matching rule wins.
///
/// Patterns compare case-insensitively on alphanumerics only, so
/// "Social IQa", "social_iqa" and "SocialIQA" are the same name. `*` matches
/// any run of characters.
struct TaxonomyRule {
  std::string benchmark;
  std::string subtask;
  std::string category;
  friend bool operator==(const TaxonomyRule&, const TaxonomyRule&) = default;
};

/// Drops a category from comparisons that involve a base model
/// (`when == "base_model"`) or from every comparison (`when == "always"`).
struct ExclusionRule {
  std::string category;
  std::string when = "base_model";
  friend bool operator==(const ExclusionRule&, const ExclusionRule&) = default;
};

enum class Weighting : std::uint8_t { Samples, Equal };

struct TaxonomyConfig {
  std::vector<std::string> categories;
  std::vector<TaxonomyRule> rules;
  std::vector<ExclusionRule> exclusions;
  std::optional<std::string> default_category;
  Weighting weighting = Weighting::Samples;

  /// Throws ConfigError on undeclared categories or unknown exclusion triggers.
  void validate() const;

  std::string to_json() const;
  static TaxonomyConfig from_json(std::string_view text);
  static TaxonomyConfig load(const std::string& path);

  /// The nine-category benchmark grouping shipped with the tool.
  static TaxonomyConfig default_config();

  friend bool operator==(const TaxonomyConfig&, const TaxonomyConfig&) = default;
};

std::string normalize_name(std::string_view s);
bool pattern_matches(std::string_view pattern, std::string_view name);

/// Throws Unassigned when nothing matches and there is no default category.
std::string assign_category(std::string_view benchmark, std::string_view subtask, const TaxonomyConfig& config);

struct ComparisonContext {
  bool pre_is_base = false;
  bool post_is_base = false;
  bool involves_base() const noexcept { return pre_is_base || post_is_base; }
};

/// Per-stratum sufficient statistics fed into aggregation.
struct StratumInput {
  StratumKey key;
  TransitionCounts counts;
  int k = 0;
};

std::vector<StratumInput> to_stratum_inputs(const JoinResult& joined);

std::vector<StratumInput> apply_exclusions(std::span<const StratumInput> strata, const TaxonomyConfig& config,
                                           const ComparisonContext& context);

struct CategoryMetrics {
  std::string category;
  MetricBundle bundle;
  std::uint64_t n_samples = 0;
  std::size_t n_strata = 0;
  /// Diagnostic: weighted mean of per-stratum clipped F_true / BT_true.
  double f_true_stratum_clipped = 0;
  double bt_true_stratum_clipped = 0;
};

struct Aggregation {
  /// Categories with at least one stratum, in config declaration order.
  std::vector<CategoryMetrics> categories;
  CategoryMetrics total;
};

/// Combines strata into category rows and a "Total" row.
///
/// Raw rates, chance baselines, ceilings and accuracies are weighted means of
/// the per-stratum values; F_true / BT_true are clipped after combining.
Aggregation aggregate(std::span<const StratumInput> strata, const TaxonomyConfig& config);

/// Weighted combination of already-computed stratum bundles.
CategoryMetrics combine_strata(std::string name, std::span<const StratumInput> strata, Weighting weighting);

}  // namespace fgt
