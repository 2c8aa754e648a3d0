#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fgt/taxonomy.hpp"
#include "fgt/transition.hpp"

namespace fgt {

enum class UncertaintyMode : std::uint8_t { Auto, MultiRun, Bootstrap };

UncertaintyMode parse_uncertainty_mode(const std::string& s);
std::string_view to_string(UncertaintyMode m) noexcept;

struct UncertaintySpec {
  UncertaintyMode mode = UncertaintyMode::Auto;
  std::uint64_t resamples = 1000;
  std::uint64_t seed = 0;

  /// Throws ConfigError if Bootstrap is requested with fewer than 100 resamples.
  void validate() const;
  /// Auto picks MultiRun for >= 2 run pairs, Bootstrap otherwise.
  UncertaintyMode resolve(std::size_t run_pairs) const;
};

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_std(std::span<const double> values);

/// Field-wise mean and sample std of per-run bundles. The std bundle reuses
/// MetricBundle as a container: each field holds that metric's std.
MetricBundle mean_bundle(std::span<const MetricBundle> runs);
MetricBundle multirun_std(std::span<const MetricBundle> runs);

/// Field-wise sample std over the bundles of `spec.resamples` bootstrap
/// replicates of one stratum. Deterministic given the seed.
MetricBundle bootstrap_std(std::span<const JoinedSample> samples, const UncertaintySpec& spec);

struct AggregateStd {
  std::map<std::string, MetricBundle> per_category;
  MetricBundle total;
};

/// Stratified bootstrap: every replicate resamples each stratum within
/// itself and re-runs the category aggregation.
AggregateStd bootstrap_aggregate_std(std::span<const StratumInput> strata, const TaxonomyConfig& config,
                                     const UncertaintySpec& spec);

}  // namespace fgt
