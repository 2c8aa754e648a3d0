#pragma once

// Data-parallel inner loops. `par` is the OpenMP version used by the library;
// `ref` is the serial reference kept for testing and benchmarking. Both call
// the same per-element functions in fgt::kernels::detail, so for every kernel
// except the floating-point reductions (`gram`) they agree bit for bit,
// independent of the thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "fgt/extraction.hpp"
#include "fgt/knowsim.hpp"
#include "fgt/rng.hpp"
#include "fgt/transition.hpp"

namespace fgt::kernels {

struct TallyResult {
  TransitionCounts counts;
  int k_min = 0;
  int k_max = 0;
};

/// Sufficient statistics for the angle between two vectors.
struct Gram {
  double aa = 0;
  double bb = 0;
  double ab = 0;
};

namespace detail {

inline constexpr std::uint64_t kGuessSalt = 0x6775657373000000ULL;  // "guess"

/// Item `i` of run `run`. Knowledge draws come from stream derive(seed, i),
/// guess draws from derive(derive(seed ^ salt, run), i); option 0 is correct.
inline JoinedSample simulate_item(const PopulationSpec& spec, std::uint64_t run, std::uint64_t i) {
  SplitMix64 know(SplitMix64::derive(spec.seed, i));
  const bool known_pre = know.bernoulli(spec.p_know_pre);
  const bool known_post = know.bernoulli(known_pre ? spec.p_retain : spec.p_learn);

  SplitMix64 guess(SplitMix64::derive(SplitMix64::derive(spec.seed ^ kGuessSalt, run), i));
  const auto k = static_cast<std::uint64_t>(spec.k);
  const std::uint64_t g_pre = guess.below(k);
  const std::uint64_t g_post = spec.correlated_guess ? g_pre : guess.below(k);

  JoinedSample s;
  s.sample_key = std::to_string(i);
  s.pre = correctness(known_pre || g_pre == 0);
  s.post = correctness(known_post || g_post == 0);
  s.k = spec.k;
  return s;
}

/// Replicate `r`: each stratum resampled with replacement, strata in order,
/// from one stream keyed derive(seed, r).
inline void bootstrap_replicate(std::span<const std::vector<Quadrant>> strata, std::uint64_t seed,
                                std::uint64_t r, std::span<TransitionCounts> out) {
  SplitMix64 rng(SplitMix64::derive(seed, r));
  for (std::size_t s = 0; s < strata.size(); ++s) {
    const auto& q = strata[s];
    TransitionCounts c;
    for (std::size_t j = 0; j < q.size(); ++j) c.add(q[rng.below(q.size())]);
    out[s] = c;
  }
}

}  // namespace detail

namespace ref {
TallyResult tally(std::span<const JoinedSample> samples);
void simulate(const PopulationSpec& spec, std::uint64_t run, std::span<JoinedSample> out);
/// Flattened [replicate * strata + stratum].
std::vector<TransitionCounts> bootstrap_counts(std::span<const std::vector<Quadrant>> strata,
                                               std::uint64_t resamples, std::uint64_t seed);
void extract(std::span<const GenerationRecord> records, const ExtractionPolicy& policy,
             std::span<ExtractionOutcome> out);
void lerp(std::span<const double> a, std::span<const double> b, double alpha, std::span<double> out);
Gram gram(std::span<const double> a, std::span<const double> b);
/// out = ca * a + cb * b
void combine(std::span<const double> a, std::span<const double> b, double ca, double cb, std::span<double> out);
}  // namespace ref

namespace par {
TallyResult tally(std::span<const JoinedSample> samples);
void simulate(const PopulationSpec& spec, std::uint64_t run, std::span<JoinedSample> out);
std::vector<TransitionCounts> bootstrap_counts(std::span<const std::vector<Quadrant>> strata,
                                               std::uint64_t resamples, std::uint64_t seed);
void extract(std::span<const GenerationRecord> records, const ExtractionPolicy& policy,
             std::span<ExtractionOutcome> out);
void lerp(std::span<const double> a, std::span<const double> b, double alpha, std::span<double> out);
/// Blocked reduction; block partials are summed in order, so the result does
/// not depend on the thread count.
Gram gram(std::span<const double> a, std::span<const double> b);
void combine(std::span<const double> a, std::span<const double> b, double ca, double cb, std::span<double> out);
}  // namespace par

/// Sets the OpenMP thread count; 0 leaves the runtime default.
void set_threads(int n);

}  // namespace fgt::kernels
