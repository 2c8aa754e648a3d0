#include <omp.h>

#include <algorithm>
#include <limits>

#include "fgt/kernels.hpp"

namespace fgt::kernels {

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

namespace par {

namespace {
constexpr std::int64_t kBlock = 4096;
}

TallyResult tally(std::span<const JoinedSample> samples) {
  const auto n = static_cast<std::int64_t>(samples.size());
  std::uint64_t ret = 0, forg = 0, bt = 0, non = 0;
  int k_min = std::numeric_limits<int>::max();
  int k_max = std::numeric_limits<int>::min();
#pragma omp parallel for schedule(static) reduction(+ : ret, forg, bt, non) reduction(min : k_min) \
    reduction(max : k_max)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& s = samples[i];
    switch (classify_transition(s.pre, s.post)) {
      case Quadrant::Retention: ++ret; break;
      case Quadrant::Forgetting: ++forg; break;
      case Quadrant::BackwardTransfer: ++bt; break;
      case Quadrant::NonAcquisition: ++non; break;
    }
    k_min = std::min(k_min, s.k);
    k_max = std::max(k_max, s.k);
  }
  TallyResult t;
  t.counts = TransitionCounts{ret, forg, bt, non, static_cast<std::uint64_t>(n)};
  t.k_min = n ? k_min : 0;
  t.k_max = n ? k_max : 0;
  return t;
}

void simulate(const PopulationSpec& spec, std::uint64_t run, std::span<JoinedSample> out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static, kBlock)
  for (std::int64_t i = 0; i < n; ++i) out[i] = detail::simulate_item(spec, run, static_cast<std::uint64_t>(i));
}

std::vector<TransitionCounts> bootstrap_counts(std::span<const std::vector<Quadrant>> strata,
                                               std::uint64_t resamples, std::uint64_t seed) {
  std::vector<TransitionCounts> out(resamples * strata.size());
  const auto reps = static_cast<std::int64_t>(resamples);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t r = 0; r < reps; ++r) {
    const auto ur = static_cast<std::uint64_t>(r);
    detail::bootstrap_replicate(strata, seed, ur, std::span(out).subspan(ur * strata.size(), strata.size()));
  }
  return out;
}

void extract(std::span<const GenerationRecord> records, const ExtractionPolicy& policy,
             std::span<ExtractionOutcome> out) {
  const auto n = static_cast<std::int64_t>(records.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) out[i] = extract_choice(records[i], policy);
}

void lerp(std::span<const double> a, std::span<const double> b, double alpha, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(a.size());
  const double beta = 1.0 - alpha;
#pragma omp parallel for simd schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = alpha * a[i] + beta * b[i];
}

Gram gram(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<std::int64_t>(a.size());
  const std::int64_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<Gram> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
  for (std::int64_t blk = 0; blk < blocks; ++blk) {
    Gram g;
    const std::int64_t end = std::min(n, (blk + 1) * kBlock);
    for (std::int64_t i = blk * kBlock; i < end; ++i) {
      g.aa += a[i] * a[i];
      g.bb += b[i] * b[i];
      g.ab += a[i] * b[i];
    }
    partial[blk] = g;
  }
  Gram total;
  for (const auto& g : partial) {
    total.aa += g.aa;
    total.bb += g.bb;
    total.ab += g.ab;
  }
  return total;
}

void combine(std::span<const double> a, std::span<const double> b, double ca, double cb, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for simd schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = ca * a[i] + cb * b[i];
}

}  // namespace par
}  // namespace fgt::kernels
