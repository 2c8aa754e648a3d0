#include "fgt/transition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fgt/error.hpp"
#include "fgt/kernels.hpp"

namespace fgt {

namespace {

void require_k(int k) {
  if (k < 2) throw BadOptionCount("option count k must be >= 2, got " + std::to_string(k));
}

void require_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

}  // namespace

std::string_view to_string(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::Retention: return "retention";
    case Quadrant::Forgetting: return "forgetting";
    case Quadrant::BackwardTransfer: return "backward_transfer";
    case Quadrant::NonAcquisition: return "non_acquisition";
  }
  return "?";
}

void TransitionCounts::add(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::Retention: ++retention; break;
    case Quadrant::Forgetting: ++forgetting; break;
    case Quadrant::BackwardTransfer: ++backward_transfer; break;
    case Quadrant::NonAcquisition: ++non_acquisition; break;
  }
  ++total;
}

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& o) noexcept {
  retention += o.retention;
  forgetting += o.forgetting;
  backward_transfer += o.backward_transfer;
  non_acquisition += o.non_acquisition;
  total += o.total;
  return *this;
}

AccuracySummary AccuracySummary::from_counts(const TransitionCounts& c, int k) {
  const RawRates r = raw_rates(c);
  return AccuracySummary{r.acc_pre, r.acc_post, k, c.total};
}

void AccuracySummary::validate() const {
  require_k(k);
  require_fraction(acc_pre, "acc_pre");
  require_fraction(acc_post, "acc_post");
  if (n > 0) {
    const double nd = static_cast<double>(n);
    for (double acc : {acc_pre, acc_post}) {
      const double hits = acc * nd;
      if (std::abs(hits - std::round(hits)) > 1e-9 * std::max(1.0, nd))
        throw std::invalid_argument("accuracy times n is not an integer count");
    }
  }
}

Quadrant classify_transition(Correctness pre, Correctness post) noexcept {
  if (is_correct(pre)) return is_correct(post) ? Quadrant::Retention : Quadrant::Forgetting;
  return is_correct(post) ? Quadrant::BackwardTransfer : Quadrant::NonAcquisition;
}

TransitionCounts tally(std::span<const JoinedSample> samples) {
  const kernels::TallyResult t = kernels::par::tally(samples);
  if (t.k_min != t.k_max)
    throw MixedStratum("stratum mixes option counts " + std::to_string(t.k_min) + " and " +
                       std::to_string(t.k_max));
  return t.counts;
}

RawRates raw_rates(const TransitionCounts& c) {
  if (c.total == 0) throw EmptyStratum("cannot compute rates of an empty stratum");
  const double n = static_cast<double>(c.total);
  return RawRates{
      static_cast<double>(c.forgetting) / n,
      static_cast<double>(c.backward_transfer) / n,
      static_cast<double>(c.retention + c.forgetting) / n,
      static_cast<double>(c.retention + c.backward_transfer) / n,
  };
}

double guess_mass(double acc, int k) {
  require_k(k);
  return (1.0 - acc) / static_cast<double>(k - 1);
}

ChanceBaselines chance_baselines(const AccuracySummary& acc) {
  require_k(acc.k);
  return ChanceBaselines{
      guess_mass(acc.acc_pre, acc.k) * (1.0 - acc.acc_post),
      (1.0 - acc.acc_pre) * guess_mass(acc.acc_post, acc.k),
  };
}

AdjustedMetrics adjusted_metrics(const RawRates& raw, const ChanceBaselines& chance) noexcept {
  return AdjustedMetrics{
      std::max(raw.forgetting - chance.f_chance, 0.0),
      std::max(raw.backward_transfer - chance.bt_chance, 0.0),
  };
}

Ceilings ceilings(const AccuracySummary& acc) {
  require_k(acc.k);
  const double k = acc.k;
  return Ceilings{
      std::max((k * acc.acc_pre - 1.0) / (k - 1.0), 0.0),
      std::max((k * acc.acc_post - 1.0) / (k - 1.0), 0.0),
  };
}

double conventional_forgetting(double acc_pre, double acc_post) noexcept {
  return std::max(acc_pre - acc_post, 0.0);
}

MetricBundle compute_bundle(const TransitionCounts& counts, int k) {
  require_k(k);
  const RawRates raw = raw_rates(counts);
  const AccuracySummary acc{raw.acc_pre, raw.acc_post, k, counts.total};
  const ChanceBaselines chance = chance_baselines(acc);
  const AdjustedMetrics adj = adjusted_metrics(raw, chance);
  const Ceilings ceil = ceilings(acc);

  MetricBundle b;
  b.f_raw = raw.forgetting;
  b.bt_raw = raw.backward_transfer;
  b.f_chance = chance.f_chance;
  b.bt_chance = chance.bt_chance;
  b.f_true = adj.f_true;
  b.bt_true = adj.bt_true;
  b.f_max = ceil.f_max;
  b.bt_max = ceil.bt_max;
  b.f_conventional = conventional_forgetting(raw.acc_pre, raw.acc_post);
  b.acc_pre = raw.acc_pre;
  b.acc_post = raw.acc_post;
  return b;
}

}  // namespace fgt
