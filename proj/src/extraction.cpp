#include "fgt/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <stdexcept>

#include "fgt/error.hpp"
#include "fgt/kernels.hpp"

namespace fgt {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) {
  s = rtrim(s);
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  return s;
}

bool equals(std::string_view a, std::string_view b, bool case_sensitive) {
  if (a.size() != b.size()) return false;
  if (case_sensitive) return a == b;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (lower(a[i]) != lower(b[i])) return false;
  return true;
}

const ChoiceOption* find_label(const GenerationRecord& r, std::string_view token, bool case_sensitive) {
  for (const auto& o : r.options)
    if (equals(o.label, token, case_sensitive)) return &o;
  return nullptr;
}

/// Positions where the keyword "answer" starts a word.
std::vector<std::size_t> keyword_hits(std::string_view text, bool case_sensitive) {
  static constexpr std::string_view kw = "answer";
  std::vector<std::size_t> hits;
  for (std::size_t p = 0; p + kw.size() <= text.size(); ++p) {
    if (p > 0 && is_alnum(text[p - 1])) continue;
    const std::string_view w = text.substr(p, kw.size());
    const bool ok = case_sensitive ? (w == "Answer" || w == "ANSWER") : equals(w, kw, false);
    if (ok) hits.push_back(p);
  }
  return hits;
}

std::optional<std::string> match_strict(const GenerationRecord& r) {
  const std::string_view text = rtrim(r.text);
  const std::size_t nl = text.find_last_of('\n');
  const std::string_view line = nl == std::string_view::npos ? text : text.substr(nl + 1);
  static constexpr std::string_view prefix = "Answer: ";
  if (!line.starts_with(prefix)) return std::nullopt;
  const ChoiceOption* o = find_label(r, line.substr(prefix.size()), true);
  if (!o) return std::nullopt;
  return o->label;
}

std::optional<std::string> match_lenient(const GenerationRecord& r, bool case_sensitive) {
  const std::string_view text = r.text;
  auto skip = [&](std::size_t j, std::string_view set) {
    while (j < text.size() && (set.find(text[j]) != std::string_view::npos)) ++j;
    return j;
  };
  std::optional<std::string> last;
  for (std::size_t p : keyword_hits(text, case_sensitive)) {
    std::size_t j = skip(p + 6, " \t*_");
    if (j >= text.size() || text[j] != ':') continue;
    j = skip(j + 1, " \t*_([");
    const std::size_t tok = j;
    while (j < text.size() && is_alnum(text[j])) ++j;
    if (j == tok) continue;
    const std::string_view token = text.substr(tok, j - tok);
    j = skip(j, " \t\r*_.)]");
    if (j < text.size() && text[j] != '\n') continue;
    if (const ChoiceOption* o = find_label(r, token, case_sensitive)) last = o->label;
  }
  return last;
}

std::optional<double> as_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::string> match_numeric_alias(const GenerationRecord& r, std::string_view window,
                                               bool case_sensitive) {
  std::optional<std::string> last;
  for (std::size_t p : keyword_hits(window, case_sensitive)) {
    std::size_t j = p + 6;
    std::size_t gap = 0;
    while (j < window.size() && gap < 4 && !is_alnum(window[j]) && window[j] != '\n' && window[j] != '-') {
      ++j;
      ++gap;
    }
    const std::size_t tok = j;
    if (j < window.size() && window[j] == '-') ++j;
    const std::size_t digits = j;
    while (j < window.size() && (std::isdigit(static_cast<unsigned char>(window[j])) || window[j] == '.')) ++j;
    if (j == digits) continue;
    while (j > digits && window[j - 1] == '.') --j;  // sentence period
    if (j < window.size() && is_alnum(window[j])) continue;
    const std::string_view token = window.substr(tok, j - tok);
    const std::optional<double> value = as_number(token);
    if (!value) continue;

    const ChoiceOption* hit = nullptr;
    for (const auto& o : r.options) {
      const std::optional<double> body = as_number(o.text);
      if (body && *body == *value) {
        hit = &o;
        break;
      }
    }
    if (!hit && token.find_first_of(".-") == std::string_view::npos) {
      std::size_t index = 0;
      std::from_chars(token.data(), token.data() + token.size(), index);
      if (index >= 1 && index <= r.options.size()) hit = &r.options[index - 1];
    }
    if (hit) last = hit->label;
  }
  return last;
}

std::optional<std::string> match_choice_text(const GenerationRecord& r, std::string_view window) {
  struct Occurrence {
    std::size_t begin, end, option;
  };
  std::vector<Occurrence> occ;
  for (std::size_t i = 0; i < r.options.size(); ++i) {
    const std::string_view body = trim(r.options[i].text);
    if (body.empty()) continue;
    for (std::size_t p = window.find(body); p != std::string_view::npos; p = window.find(body, p + 1)) {
      const std::size_t e = p + body.size();
      if (is_alnum(body.front()) && p > 0 && is_alnum(window[p - 1])) continue;
      if (is_alnum(body.back()) && e < window.size() && is_alnum(window[e])) continue;
      occ.push_back({p, e, i});
    }
  }
  std::set<std::size_t> options;
  for (const auto& a : occ) {
    const bool nested = std::any_of(occ.begin(), occ.end(), [&](const Occurrence& b) {
      return b.option != a.option && b.begin <= a.begin && a.end <= b.end && (b.end - b.begin) > (a.end - a.begin);
    });
    if (!nested) options.insert(a.option);
  }
  if (options.size() != 1) return std::nullopt;
  return r.options[*options.begin()].label;
}

std::optional<std::string> match_fallback(const GenerationRecord& r, const ExtractionPolicy& policy) {
  std::string_view text = rtrim(r.text);
  if (text.size() > policy.fallback_window) text = text.substr(text.size() - policy.fallback_window);

  std::optional<std::string> numeric;
  std::optional<std::string> body;
  if (policy.allow_numeric_aliases) numeric = match_numeric_alias(r, text, policy.case_sensitive);
  if (policy.allow_choice_text_match) body = match_choice_text(r, text);
  if (numeric && body && *numeric != *body) return std::nullopt;
  return numeric ? numeric : body;
}

}  // namespace

void GenerationRecord::validate() const {
  if (options.empty()) throw std::invalid_argument("record '" + sample_key + "' has no options");
  const bool known = std::any_of(options.begin(), options.end(), [&](const ChoiceOption& o) { return o.label == gold; });
  if (!known) throw std::invalid_argument("record '" + sample_key + "': gold '" + gold + "' is not an option label");
}

std::string_view to_string(ExtractionTier t) noexcept {
  switch (t) {
    case ExtractionTier::Strict: return "strict";
    case ExtractionTier::Lenient: return "lenient";
    case ExtractionTier::Fallback: return "fallback";
  }
  return "?";
}

ExtractionTier parse_tier(std::string_view s) {
  if (equals(s, "strict", false)) return ExtractionTier::Strict;
  if (equals(s, "lenient", false)) return ExtractionTier::Lenient;
  if (equals(s, "fallback", false)) return ExtractionTier::Fallback;
  throw ConfigError("unknown extraction tier '" + std::string(s) + "'");
}

ExtractionPolicy ExtractionPolicy::strict() { return {}; }

ExtractionPolicy ExtractionPolicy::lenient() {
  ExtractionPolicy p;
  p.tier = ExtractionTier::Lenient;
  p.case_sensitive = false;
  return p;
}

ExtractionPolicy ExtractionPolicy::fallback() {
  ExtractionPolicy p;
  p.tier = ExtractionTier::Fallback;
  p.case_sensitive = false;
  p.allow_numeric_aliases = true;
  p.allow_choice_text_match = true;
  return p;
}

void ExtractionPolicy::validate() const {
  if (tier == ExtractionTier::Strict && (!case_sensitive || allow_numeric_aliases || allow_choice_text_match))
    throw ConfigError("strict extraction must be case-sensitive and alias-free");
  if (tier == ExtractionTier::Fallback && fallback_window == 0)
    throw ConfigError("fallback window must be positive");
}

ExtractionOutcome extract_choice(const GenerationRecord& record, const ExtractionPolicy& policy) {
  ExtractionOutcome out;
  if (auto s = match_strict(record)) {
    out.predicted = std::move(s);
    out.method_used = ExtractionTier::Strict;
    return out;
  }
  if (policy.tier == ExtractionTier::Strict) return out;

  if (auto l = match_lenient(record, policy.case_sensitive)) {
    out.predicted = std::move(l);
    out.method_used = ExtractionTier::Lenient;
    return out;
  }
  if (policy.tier == ExtractionTier::Lenient) return out;

  if (auto f = match_fallback(record, policy)) {
    out.predicted = std::move(f);
    out.method_used = ExtractionTier::Fallback;
  }
  return out;
}

Correctness score(const ExtractionOutcome& outcome, std::string_view gold) noexcept {
  return correctness(outcome.predicted && *outcome.predicted == gold);
}

std::vector<ExtractionOutcome> extract_all(std::span<const GenerationRecord> records,
                                           const ExtractionPolicy& policy) {
  policy.validate();
  std::vector<ExtractionOutcome> out(records.size());
  kernels::par::extract(records, policy, out);
  return out;
}

ExtractionReport ExtractionReport::from_outcomes(std::span<const ExtractionOutcome> outcomes) {
  ExtractionReport rep;
  rep.total = outcomes.size();
  for (const auto& o : outcomes) {
    if (o.failed()) {
      ++rep.failures;
      continue;
    }
    switch (*o.method_used) {
      case ExtractionTier::Strict: ++rep.strict; break;
      case ExtractionTier::Lenient: ++rep.lenient; break;
      case ExtractionTier::Fallback: ++rep.fallback; break;
    }
  }
  rep.failure_rate = rep.total ? static_cast<double>(rep.failures) / static_cast<double>(rep.total) : 0.0;
  return rep;
}

ExtractionReport& ExtractionReport::operator+=(const ExtractionReport& o) noexcept {
  total += o.total;
  failures += o.failures;
  strict += o.strict;
  lenient += o.lenient;
  fallback += o.fallback;
  failure_rate = total ? static_cast<double>(failures) / static_cast<double>(total) : 0.0;
  return *this;
}

ExtractionReport extraction_report(std::span<const GenerationRecord> records, const ExtractionPolicy& policy) {
  const auto outcomes = extract_all(records, policy);
  return ExtractionReport::from_outcomes(outcomes);
}

}  // namespace fgt
