#include <algorithm>
#include <limits>

#include "fgt/kernels.hpp"

namespace fgt::kernels::ref {

TallyResult tally(std::span<const JoinedSample> samples) {
  TallyResult t;
  t.k_min = std::numeric_limits<int>::max();
  t.k_max = std::numeric_limits<int>::min();
  for (const auto& s : samples) {
    t.counts.add(classify_transition(s.pre, s.post));
    t.k_min = std::min(t.k_min, s.k);
    t.k_max = std::max(t.k_max, s.k);
  }
  if (samples.empty()) t.k_min = t.k_max = 0;
  return t;
}

void simulate(const PopulationSpec& spec, std::uint64_t run, std::span<JoinedSample> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::simulate_item(spec, run, i);
}

std::vector<TransitionCounts> bootstrap_counts(std::span<const std::vector<Quadrant>> strata,
                                               std::uint64_t resamples, std::uint64_t seed) {
  std::vector<TransitionCounts> out(resamples * strata.size());
  for (std::uint64_t r = 0; r < resamples; ++r)
    detail::bootstrap_replicate(strata, seed, r, std::span(out).subspan(r * strata.size(), strata.size()));
  return out;
}

void extract(std::span<const GenerationRecord> records, const ExtractionPolicy& policy,
             std::span<ExtractionOutcome> out) {
  for (std::size_t i = 0; i < records.size(); ++i) out[i] = extract_choice(records[i], policy);
}

void lerp(std::span<const double> a, std::span<const double> b, double alpha, std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + (1.0 - alpha) * b[i];
}

Gram gram(std::span<const double> a, std::span<const double> b) {
  Gram g;
  for (std::size_t i = 0; i < a.size(); ++i) {
    g.aa += a[i] * a[i];
    g.bb += b[i] * b[i];
    g.ab += a[i] * b[i];
  }
  return g;
}

void combine(std::span<const double> a, std::span<const double> b, double ca, double cb, std::span<double> out) {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cb * b[i];
}

}  // namespace fgt::kernels::ref
