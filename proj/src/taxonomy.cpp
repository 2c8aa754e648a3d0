#include "fgt/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fgt/error.hpp"
#include "json.hpp"

namespace fgt {

using nlohmann::json;

std::string normalize_name(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
    else if (c == '*') out.push_back('*');
  }
  return out;
}

namespace {

bool glob(std::string_view p, std::string_view s) {
  std::size_t pi = 0, si = 0, star = std::string_view::npos, mark = 0;
  while (si < s.size()) {
    if (pi < p.size() && p[pi] == '*') {
      star = pi++;
      mark = si;
    } else if (pi < p.size() && p[pi] == s[si]) {
      ++pi;
      ++si;
    } else if (star != std::string_view::npos) {
      pi = star + 1;
      si = ++mark;
    } else {
      return false;
    }
  }
  while (pi < p.size() && p[pi] == '*') ++pi;
  return pi == p.size();
}

}  // namespace

bool pattern_matches(std::string_view pattern, std::string_view name) {
  return glob(normalize_name(pattern), normalize_name(name));
}

void TaxonomyConfig::validate() const {
  const std::set<std::string> declared(categories.begin(), categories.end());
  if (declared.size() != categories.size()) throw ConfigError("duplicate category name");
  for (const auto& r : rules)
    if (!declared.count(r.category))
      throw ConfigError("rule (" + r.benchmark + ", " + r.subtask + ") names undeclared category '" + r.category + "'");
  for (const auto& e : exclusions) {
    if (!declared.count(e.category)) throw ConfigError("exclusion names undeclared category '" + e.category + "'");
    if (e.when != "base_model" && e.when != "always") throw ConfigError("unknown exclusion trigger '" + e.when + "'");
  }
  if (default_category && !declared.count(*default_category))
    throw ConfigError("default category '" + *default_category + "' is not declared");
}

std::string TaxonomyConfig::to_json() const {
  json j;
  j["categories"] = categories;
  json rs = json::array();
  for (const auto& r : rules) rs.push_back({{"benchmark", r.benchmark}, {"subtask", r.subtask}, {"category", r.category}});
  j["rules"] = std::move(rs);
  json ex = json::array();
  for (const auto& e : exclusions) ex.push_back({{"category", e.category}, {"when", e.when}});
  j["exclusions"] = std::move(ex);
  j["default_category"] = default_category ? json(*default_category) : json(nullptr);
  j["weighting"] = weighting == Weighting::Samples ? "samples" : "equal";
  return j.dump(2) + "\n";
}

TaxonomyConfig TaxonomyConfig::from_json(std::string_view text) {
  TaxonomyConfig c;
  try {
    const json j = json::parse(text);
    c.categories = j.at("categories").get<std::vector<std::string>>();
    for (const auto& r : j.at("rules"))
      c.rules.push_back({r.at("benchmark").get<std::string>(), r.value("subtask", std::string("*")),
                         r.at("category").get<std::string>()});
    if (j.contains("exclusions"))
      for (const auto& e : j["exclusions"])
        c.exclusions.push_back({e.at("category").get<std::string>(), e.value("when", std::string("base_model"))});
    if (j.contains("default_category") && !j["default_category"].is_null())
      c.default_category = j["default_category"].get<std::string>();
    const std::string w = j.value("weighting", std::string("samples"));
    if (w == "samples") c.weighting = Weighting::Samples;
    else if (w == "equal") c.weighting = Weighting::Equal;
    else throw ConfigError("unknown weighting '" + w + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("taxonomy config: ") + e.what());
  }
  c.validate();
  return c;
}

TaxonomyConfig TaxonomyConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open taxonomy config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string assign_category(std::string_view benchmark, std::string_view subtask, const TaxonomyConfig& config) {
  const std::string b = normalize_name(benchmark);
  const std::string s = normalize_name(subtask);
  for (const auto& r : config.rules)
    if (glob(normalize_name(r.benchmark), b) && glob(normalize_name(r.subtask), s)) return r.category;
  if (config.default_category) return *config.default_category;
  throw Unassigned("no category for (" + std::string(benchmark) + ", " + std::string(subtask) + ")");
}

std::vector<StratumInput> to_stratum_inputs(const JoinResult& joined) {
  std::vector<StratumInput> out;
  out.reserve(joined.strata.size());
  for (const auto& [key, samples] : joined.strata) {
    StratumInput s;
    s.key = key;
    s.counts = tally(samples);
    s.k = samples.empty() ? 0 : samples.front().k;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<StratumInput> apply_exclusions(std::span<const StratumInput> strata, const TaxonomyConfig& config,
                                           const ComparisonContext& context) {
  std::set<std::string> dropped;
  for (const auto& e : config.exclusions)
    if (e.when == "always" || (e.when == "base_model" && context.involves_base())) dropped.insert(e.category);
  std::vector<StratumInput> out;
  for (const auto& s : strata)
    if (dropped.empty() || !dropped.count(assign_category(s.key.benchmark, s.key.subtask, config))) out.push_back(s);
  return out;
}

CategoryMetrics combine_strata(std::string name, std::span<const StratumInput> strata, Weighting weighting) {
  CategoryMetrics out;
  out.category = std::move(name);
  out.n_strata = strata.size();
  if (strata.empty()) throw EmptyStratum("category '" + out.category + "' has no strata");

  double wsum = 0;
  for (const auto& s : strata) {
    if (s.counts.total == 0)
      throw EmptyStratum("stratum " + s.key.benchmark + "/" + s.key.subtask + " is empty");
    out.n_samples += s.counts.total;
    wsum += weighting == Weighting::Samples ? static_cast<double>(s.counts.total) : 1.0;
  }

  MetricBundle& m = out.bundle;
  for (const auto& s : strata) {
    const double w = (weighting == Weighting::Samples ? static_cast<double>(s.counts.total) : 1.0) / wsum;
    const MetricBundle b = compute_bundle(s.counts, s.k);
    m.f_raw += w * b.f_raw;
    m.bt_raw += w * b.bt_raw;
    m.f_chance += w * b.f_chance;
    m.bt_chance += w * b.bt_chance;
    m.f_max += w * b.f_max;
    m.bt_max += w * b.bt_max;
    m.acc_pre += w * b.acc_pre;
    m.acc_post += w * b.acc_post;
    out.f_true_stratum_clipped += w * b.f_true;
    out.bt_true_stratum_clipped += w * b.bt_true;
  }
  m.f_true = std::max(m.f_raw - m.f_chance, 0.0);
  m.bt_true = std::max(m.bt_raw - m.bt_chance, 0.0);
  m.f_conventional = conventional_forgetting(m.acc_pre, m.acc_post);
  return out;
}

Aggregation aggregate(std::span<const StratumInput> strata, const TaxonomyConfig& config) {
  std::map<std::string, std::vector<StratumInput>> by_category;
  for (const auto& s : strata) by_category[assign_category(s.key.benchmark, s.key.subtask, config)].push_back(s);

  Aggregation out;
  for (const auto& name : config.categories) {
    const auto it = by_category.find(name);
    if (it == by_category.end()) continue;
    out.categories.push_back(combine_strata(name, it->second, config.weighting));
  }
  if (strata.empty()) {
    out.total.category = "Total";
    return out;
  }
  out.total = combine_strata("Total", strata, config.weighting);
  return out;
}

}  // namespace fgt
