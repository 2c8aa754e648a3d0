#include "fgt/knowsim.hpp"

#include <algorithm>
#include <stdexcept>

#include "fgt/error.hpp"
#include "fgt/kernels.hpp"

namespace fgt {

void PopulationSpec::validate() const {
  if (k < 2) throw BadOptionCount("population k must be >= 2");
  if (n < 1) throw std::invalid_argument("population n must be >= 1");
  for (double p : {p_know_pre, p_retain, p_learn})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("population probabilities must lie in [0,1]");
}

std::vector<JoinedSample> simulate(const PopulationSpec& spec, std::uint64_t run) {
  spec.validate();
  std::vector<JoinedSample> out(spec.n);
  kernels::par::simulate(spec, run, out);
  return out;
}

ExpectedMetrics expected_metrics(const PopulationSpec& spec) {
  spec.validate();
  const double k = spec.k;
  const double lucky = 1.0 / k;
  const double unlucky = 1.0 - lucky;

  // Mass of each know-state transition.
  const double kk = spec.p_know_pre * spec.p_retain;
  const double ku = spec.p_know_pre * (1.0 - spec.p_retain);
  const double uk = (1.0 - spec.p_know_pre) * spec.p_learn;
  const double uu = (1.0 - spec.p_know_pre) * (1.0 - spec.p_learn);

  ExpectedMetrics e;
  e.retention = kk + ku * lucky + uk * lucky + uu * lucky * lucky;
  e.forgetting = ku * unlucky + uu * lucky * unlucky;
  e.backward_transfer = uk * unlucky + uu * unlucky * lucky;
  e.non_acquisition = uu * unlucky * unlucky;
  e.knowledge_loss = ku;
  e.knowledge_gain = uk;

  const double acc_pre = e.retention + e.forgetting;
  const double acc_post = e.retention + e.backward_transfer;
  const RawRates raw{e.forgetting, e.backward_transfer, acc_pre, acc_post};
  const AccuracySummary acc{acc_pre, acc_post, spec.k, 0};
  const ChanceBaselines chance = chance_baselines(acc);
  const AdjustedMetrics adj = adjusted_metrics(raw, chance);
  const Ceilings ceil = ceilings(acc);

  MetricBundle& b = e.bundle;
  b.f_raw = raw.forgetting;
  b.bt_raw = raw.backward_transfer;
  b.f_chance = chance.f_chance;
  b.bt_chance = chance.bt_chance;
  b.f_true = adj.f_true;
  b.bt_true = adj.bt_true;
  b.f_max = ceil.f_max;
  b.bt_max = ceil.bt_max;
  b.f_conventional = conventional_forgetting(acc_pre, acc_post);
  b.acc_pre = acc_pre;
  b.acc_post = acc_post;
  return e;
}

}  // namespace fgt
