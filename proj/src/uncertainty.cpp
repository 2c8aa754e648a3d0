#include "fgt/uncertainty.hpp"

#include <cmath>

#include "fgt/error.hpp"
#include "fgt/kernels.hpp"

namespace fgt {

namespace {

std::vector<Quadrant> expand(const TransitionCounts& c) {
  std::vector<Quadrant> q;
  q.reserve(c.total);
  q.insert(q.end(), c.retention, Quadrant::Retention);
  q.insert(q.end(), c.forgetting, Quadrant::Forgetting);
  q.insert(q.end(), c.backward_transfer, Quadrant::BackwardTransfer);
  q.insert(q.end(), c.non_acquisition, Quadrant::NonAcquisition);
  return q;
}

MetricBundle fieldwise_std(std::span<const MetricBundle> bundles) {
  MetricBundle out;
  std::vector<double> column(bundles.size());
  for (const auto& [name, field] : MetricBundle::fields) {
    for (std::size_t i = 0; i < bundles.size(); ++i) column[i] = bundles[i].*field;
    out.*field = sample_std(column);
  }
  return out;
}

}  // namespace

UncertaintyMode parse_uncertainty_mode(const std::string& s) {
  if (s == "auto") return UncertaintyMode::Auto;
  if (s == "multirun") return UncertaintyMode::MultiRun;
  if (s == "bootstrap") return UncertaintyMode::Bootstrap;
  throw ConfigError("unknown uncertainty mode '" + s + "'");
}

std::string_view to_string(UncertaintyMode m) noexcept {
  switch (m) {
    case UncertaintyMode::Auto: return "auto";
    case UncertaintyMode::MultiRun: return "multirun";
    case UncertaintyMode::Bootstrap: return "bootstrap";
  }
  return "?";
}

void UncertaintySpec::validate() const {
  if (mode != UncertaintyMode::MultiRun && resamples < 100)
    throw ConfigError("bootstrap needs at least 100 resamples, got " + std::to_string(resamples));
}

UncertaintyMode UncertaintySpec::resolve(std::size_t run_pairs) const {
  if (mode != UncertaintyMode::Auto) return mode;
  return run_pairs >= 2 ? UncertaintyMode::MultiRun : UncertaintyMode::Bootstrap;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

MetricBundle mean_bundle(std::span<const MetricBundle> runs) {
  MetricBundle out;
  if (runs.empty()) return out;
  for (const auto& [name, field] : MetricBundle::fields) {
    double s = 0;
    for (const auto& b : runs) s += b.*field;
    out.*field = s / static_cast<double>(runs.size());
  }
  return out;
}

MetricBundle multirun_std(std::span<const MetricBundle> runs) {
  if (runs.size() < 2) throw InsufficientRuns("multi-run std needs >= 2 runs, got " + std::to_string(runs.size()));
  return fieldwise_std(runs);
}

MetricBundle bootstrap_std(std::span<const JoinedSample> samples, const UncertaintySpec& spec) {
  if (samples.empty()) throw EmptyStratum("cannot bootstrap an empty stratum");
  spec.validate();
  tally(samples);  // rejects mixed k
  std::vector<std::vector<Quadrant>> strata(1);
  strata[0].reserve(samples.size());
  for (const auto& s : samples) strata[0].push_back(classify_transition(s.pre, s.post));

  const auto reps = kernels::par::bootstrap_counts(strata, spec.resamples, spec.seed);
  std::vector<MetricBundle> bundles;
  bundles.reserve(reps.size());
  for (const auto& c : reps) bundles.push_back(compute_bundle(c, samples.front().k));
  return fieldwise_std(bundles);
}

AggregateStd bootstrap_aggregate_std(std::span<const StratumInput> strata, const TaxonomyConfig& config,
                                     const UncertaintySpec& spec) {
  spec.validate();
  AggregateStd out;
  if (strata.empty()) return out;

  std::vector<std::vector<Quadrant>> quads;
  quads.reserve(strata.size());
  for (const auto& s : strata) {
    if (s.counts.total == 0) throw EmptyStratum("stratum " + s.key.benchmark + "/" + s.key.subtask + " is empty");
    quads.push_back(expand(s.counts));
  }

  const auto reps = kernels::par::bootstrap_counts(quads, spec.resamples, spec.seed);
  std::map<std::string, std::vector<MetricBundle>> per_category;
  std::vector<MetricBundle> totals;
  std::vector<StratumInput> replicate(strata.begin(), strata.end());
  for (std::uint64_t r = 0; r < spec.resamples; ++r) {
    for (std::size_t s = 0; s < strata.size(); ++s) replicate[s].counts = reps[r * strata.size() + s];
    const Aggregation agg = aggregate(replicate, config);
    for (const auto& c : agg.categories) per_category[c.category].push_back(c.bundle);
    totals.push_back(agg.total.bundle);
  }
  for (const auto& [name, bundles] : per_category) out.per_category[name] = fieldwise_std(bundles);
  out.total = fieldwise_std(totals);
  return out;
}

}  // namespace fgt
