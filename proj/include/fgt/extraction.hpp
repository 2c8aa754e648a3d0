#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgt/transition.hpp"

namespace fgt {

struct ChoiceOption {
  std::string label;  // "A", "B", ...
  std::string text;   // choice body
  friend bool operator==(const ChoiceOption&, const ChoiceOption&) = default;
};

/// Raw model output for one multiple-choice item.
struct GenerationRecord {
  std::string sample_key;
  std::string text;
  std::vector<ChoiceOption> options;
  std::string gold;

  /// Throws std::invalid_argument if options are empty or gold is not a label.
  void validate() const;
};

enum class ExtractionTier : std::uint8_t { Strict, Lenient, Fallback };

std::string_view to_string(ExtractionTier t) noexcept;
ExtractionTier parse_tier(std::string_view s);

/// How generated text is turned into a predicted label.
///
/// Tiers are cumulative: Lenient first tries Strict, Fallback first tries
/// Lenient. Strict accepts only a final line `Answer: X` (after trimming
/// trailing whitespace), with X one of the option labels, case-sensitive.
/// Lenient takes the last `answer: X` anywhere in the text that ends its
/// line, tolerating markdown emphasis and brackets. Fallback looks in the
/// trailing `fallback_window` bytes for a numeric answer (an option body
/// equal to the number, else a 1-based option index) and for verbatim option
/// bodies; conflicting candidates fail.
struct ExtractionPolicy {
  ExtractionTier tier = ExtractionTier::Strict;
  bool case_sensitive = true;
  bool allow_numeric_aliases = false;
  bool allow_choice_text_match = false;
  std::size_t fallback_window = 200;

  static ExtractionPolicy strict();
  static ExtractionPolicy lenient();
  static ExtractionPolicy fallback();

  /// Throws ConfigError if Strict is combined with case folding or aliases.
  void validate() const;
};

struct ExtractionOutcome {
  std::optional<std::string> predicted;
  std::optional<ExtractionTier> method_used;

  bool failed() const noexcept { return !predicted.has_value(); }
};

ExtractionOutcome extract_choice(const GenerationRecord& record, const ExtractionPolicy& policy);

/// Unparseable answers score as incorrect.
Correctness score(const ExtractionOutcome& outcome, std::string_view gold) noexcept;

/// Extracts every record (in parallel); outcome i belongs to record i.
std::vector<ExtractionOutcome> extract_all(std::span<const GenerationRecord> records,
                                           const ExtractionPolicy& policy);

struct ExtractionReport {
  std::uint64_t total = 0;
  std::uint64_t failures = 0;
  double failure_rate = 0;
  std::uint64_t strict = 0;
  std::uint64_t lenient = 0;
  std::uint64_t fallback = 0;

  static ExtractionReport from_outcomes(std::span<const ExtractionOutcome> outcomes);
  ExtractionReport& operator+=(const ExtractionReport& o) noexcept;
};

ExtractionReport extraction_report(std::span<const GenerationRecord> records, const ExtractionPolicy& policy);

}  // namespace fgt
