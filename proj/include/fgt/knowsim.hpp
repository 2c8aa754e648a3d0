#pragma once

#include <cstdint>
#include <vector>

#include "fgt/transition.hpp"

namespace fgt {

/// Synthetic population under the know/guess response model.
///
/// Each item is known before training with probability `p_know_pre`. A known
/// item stays known with probability `p_retain`; an unknown one becomes known
/// with probability `p_learn`. Unknown items are answered by a uniform draw
/// over `k` options, independently before and after (unless
/// `correlated_guess`, where the post-training guess repeats the pre-training
/// one; this deliberately breaks the independence assumption).
struct PopulationSpec {
  std::uint64_t n = 1000;
  int k = 4;
  double p_know_pre = 0.5;
  double p_retain = 1.0;
  double p_learn = 0.0;
  std::uint64_t seed = 0;
  bool correlated_guess = false;

  void validate() const;
};

/// Draws one evaluation run. Knowledge states depend only on (seed, item);
/// guesses depend on (seed, run, item), so runs share items and knowledge and
/// differ only in guessing.
std::vector<JoinedSample> simulate(const PopulationSpec& spec, std::uint64_t run = 0);

struct ExpectedMetrics {
  double retention = 0;
  double forgetting = 0;
  double backward_transfer = 0;
  double non_acquisition = 0;
  /// Metric functional evaluated at the expected rates.
  MetricBundle bundle;
  /// Planted knowledge loss / gain: p_know_pre·(1 - p_retain), (1 - p_know_pre)·p_learn.
  double knowledge_loss = 0;
  double knowledge_gain = 0;
};

/// Exact expectation under independent guessing, from the four know-state
/// transitions and their guess outcomes.
ExpectedMetrics expected_metrics(const PopulationSpec& spec);

}  // namespace fgt
