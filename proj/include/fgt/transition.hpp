#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fgt {

enum class Correctness : std::uint8_t { Incorrect = 0, Correct = 1 };

constexpr Correctness correctness(bool ok) noexcept { return ok ? Correctness::Correct : Correctness::Incorrect; }
constexpr bool is_correct(Correctness c) noexcept { return c == Correctness::Correct; }

enum class Quadrant : std::uint8_t { Retention, Forgetting, BackwardTransfer, NonAcquisition };

std::string_view to_string(Quadrant q) noexcept;

/// One item observed before and after training, with its option count.
struct JoinedSample {
  std::string sample_key;
  Correctness pre = Correctness::Incorrect;
  Correctness post = Correctness::Incorrect;
  int k = 0;
};

struct TransitionCounts {
  std::uint64_t retention = 0;          // 1 -> 1
  std::uint64_t forgetting = 0;         // 1 -> 0
  std::uint64_t backward_transfer = 0;  // 0 -> 1
  std::uint64_t non_acquisition = 0;    // 0 -> 0
  std::uint64_t total = 0;

  void add(Quadrant q) noexcept;
  TransitionCounts& operator+=(const TransitionCounts& o) noexcept;
  bool consistent() const noexcept {
    return retention + forgetting + backward_transfer + non_acquisition == total;
  }
  friend bool operator==(const TransitionCounts&, const TransitionCounts&) = default;
};

struct RawRates {
  double forgetting = 0;
  double backward_transfer = 0;
  double acc_pre = 0;
  double acc_post = 0;
};

/// Aggregate accuracies of one stratum. Fractions in [0,1], k >= 2.
struct AccuracySummary {
  double acc_pre = 0;
  double acc_post = 0;
  int k = 0;
  std::uint64_t n = 0;

  static AccuracySummary from_counts(const TransitionCounts& c, int k);
  /// Throws BadOptionCount / std::invalid_argument on violated invariants.
  void validate() const;
};

struct ChanceBaselines {
  double f_chance = 0;
  double bt_chance = 0;
};

struct AdjustedMetrics {
  double f_true = 0;
  double bt_true = 0;
};

struct Ceilings {
  double f_max = 0;
  double bt_max = 0;
};

/// Every metric reported for one stratum, category or total.
struct MetricBundle {
  double f_raw = 0;
  double bt_raw = 0;
  double f_chance = 0;
  double bt_chance = 0;
  double f_true = 0;
  double bt_true = 0;
  double f_max = 0;
  double bt_max = 0;
  double f_conventional = 0;
  double acc_pre = 0;
  double acc_post = 0;

  using Field = double MetricBundle::*;
  static constexpr std::array<std::pair<std::string_view, Field>, 11> fields{{
      {"f_raw", &MetricBundle::f_raw},
      {"bt_raw", &MetricBundle::bt_raw},
      {"f_chance", &MetricBundle::f_chance},
      {"bt_chance", &MetricBundle::bt_chance},
      {"f_true", &MetricBundle::f_true},
      {"bt_true", &MetricBundle::bt_true},
      {"f_max", &MetricBundle::f_max},
      {"bt_max", &MetricBundle::bt_max},
      {"f_conventional", &MetricBundle::f_conventional},
      {"acc_pre", &MetricBundle::acc_pre},
      {"acc_post", &MetricBundle::acc_post},
  }};

  /// F_true > F_max or BT_true > BT_max. Not clipped; surfaced in reports.
  bool exceeds_ceiling(double tol = 1e-12) const noexcept {
    return f_true > f_max + tol || bt_true > bt_max + tol;
  }
};

Quadrant classify_transition(Correctness pre, Correctness post) noexcept;

/// Quadrant counts. Throws MixedStratum if the samples carry more than one k.
TransitionCounts tally(std::span<const JoinedSample> samples);

/// Throws EmptyStratum on total == 0.
RawRates raw_rates(const TransitionCounts& counts);

/// Fraction of accuracy attributable to lucky guesses: (1 - acc) / (k - 1).
double guess_mass(double acc, int k);

ChanceBaselines chance_baselines(const AccuracySummary& acc);

AdjustedMetrics adjusted_metrics(const RawRates& raw, const ChanceBaselines& chance) noexcept;

Ceilings ceilings(const AccuracySummary& acc);

/// Task-level accuracy drop, clipped at zero.
double conventional_forgetting(double acc_pre, double acc_post) noexcept;

/// Full bundle for one stratum of constant k.
MetricBundle compute_bundle(const TransitionCounts& counts, int k);

}  // namespace fgt
