#include "fgt/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fgt/error.hpp"
#include "fgt/rng.hpp"
#include "json.hpp"

namespace fgt {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_percent(double fraction) {
  // Half-up at one decimal; the epsilon absorbs binary representation error
  // (0.1295 * 1000 = 129.49999...).
  const double tenths = std::floor(fraction * 1000.0 + 0.5 + 1e-7);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", tenths / 10.0);
  return buf;
}

std::string ReportCell::render() const {
  return format_percent(value) + " ±" + format_percent(std) + " (" + format_percent(ceiling) + ")";
}

namespace {

json policy_to_json(const ExtractionPolicy& p) {
  return {{"tier", std::string(to_string(p.tier))},
          {"case_sensitive", p.case_sensitive},
          {"numeric_aliases", p.allow_numeric_aliases},
          {"choice_text", p.allow_choice_text_match},
          {"window", p.fallback_window}};
}

ExtractionPolicy policy_from_json(const json& j) {
  ExtractionPolicy p;
  const ExtractionTier tier = parse_tier(j.value("tier", std::string("strict")));
  if (tier == ExtractionTier::Lenient) p = ExtractionPolicy::lenient();
  if (tier == ExtractionTier::Fallback) p = ExtractionPolicy::fallback();
  p.case_sensitive = j.value("case_sensitive", p.case_sensitive);
  p.allow_numeric_aliases = j.value("numeric_aliases", p.allow_numeric_aliases);
  p.allow_choice_text_match = j.value("choice_text", p.allow_choice_text_match);
  p.fallback_window = j.value("window", p.fallback_window);
  p.validate();
  return p;
}

json bundle_to_json(const MetricBundle& b) {
  json j = json::object();
  for (const auto& [name, field] : MetricBundle::fields) j[std::string(name)] = b.*field;
  return j;
}

json counts_to_json(const TransitionCounts& c) {
  return {{"retention", c.retention},
          {"forgetting", c.forgetting},
          {"backward_transfer", c.backward_transfer},
          {"non_acquisition", c.non_acquisition},
          {"total", c.total}};
}

json extraction_to_json(const ExtractionReport& r) {
  return {{"total", r.total},     {"failures", r.failures}, {"failure_rate", r.failure_rate},
          {"strict", r.strict},   {"lenient", r.lenient},   {"fallback", r.fallback}};
}

ReportCell forgetting_cell(const CategoryResult& c) {
  return {c.metrics.bundle.f_true, c.std.f_true, c.metrics.bundle.f_max};
}

ReportCell backward_cell(const CategoryResult& c) {
  return {c.metrics.bundle.bt_true, c.std.bt_true, c.metrics.bundle.bt_max};
}

json category_to_json(const CategoryResult& c) {
  return {{"category", c.metrics.category},
          {"n_samples", c.metrics.n_samples},
          {"n_strata", c.metrics.n_strata},
          {"bundle", bundle_to_json(c.metrics.bundle)},
          {"std", bundle_to_json(c.std)},
          {"f_true_stratum_clipped", c.metrics.f_true_stratum_clipped},
          {"bt_true_stratum_clipped", c.metrics.bt_true_stratum_clipped},
          {"exceeds_ceiling", c.metrics.bundle.exceeds_ceiling()},
          {"cells", {{"forgetting", forgetting_cell(c).render()}, {"backward_transfer", backward_cell(c).render()}}}};
}

std::string resolve(const std::string& path, const std::string& base) {
  if (base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

std::vector<SampleRecord> load_snapshot(const std::vector<std::string>& paths) {
  std::vector<SampleRecord> all;
  std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
  for (const auto& p : paths) {
    ParseResult r = parse_snapshot_file(p);
    try {
      r.raise_first();
    } catch (const Error& e) {
      throw SchemaError(r.issues.front().line, r.issues.front().field, p + ": " + r.issues.front().message);
    }
    for (auto& rec : r.records) {
      if (!seen.emplace(rec.benchmark, rec.subtask, rec.sample_key, rec.run_id).second)
        throw DuplicateKey(p + ": (" + rec.benchmark + ", " + rec.subtask + ", " + rec.sample_key + ", " +
                           rec.run_id + ") already seen in an earlier file");
      all.push_back(std::move(rec));
    }
  }
  return all;
}

ComparisonResult compute_comparison(const Comparison& comp, std::size_t index, const RunManifest& manifest,
                                    const TaxonomyConfig& taxonomy) {
  ComparisonResult out;
  out.name = comp.name;

  std::vector<SampleRecord> pre = load_snapshot(comp.pre_paths);
  std::vector<SampleRecord> post = load_snapshot(comp.post_paths);
  out.extraction_pre = score_snapshot(pre, manifest.extraction);
  out.extraction_post = score_snapshot(post, manifest.extraction);

  const JoinResult joined = join_snapshots(pre, post, manifest.join);
  out.join = joined.report;
  out.run_pairs = joined.run_pairs;

  const std::vector<StratumInput> all = to_stratum_inputs(joined);
  out.strata = apply_exclusions(all, taxonomy, comp.context);
  out.excluded_strata = all.size() - out.strata.size();
  if (out.strata.empty()) throw EmptyStratum("comparison '" + comp.name + "' has no joined strata");

  out.uncertainty_mode = manifest.uncertainty.resolve(joined.run_pairs.size());
  const Aggregation pooled = aggregate(out.strata, taxonomy);

  if (out.uncertainty_mode == UncertaintyMode::MultiRun) {
    if (joined.run_pairs.size() < 2)
      throw InsufficientRuns("comparison '" + comp.name + "' has " + std::to_string(joined.run_pairs.size()) +
                             " run pair(s); multi-run std needs >= 2");
    std::map<std::pair<std::string, std::string>, std::vector<StratumInput>> by_run;
    for (const auto& s : out.strata) by_run[{s.key.pre_run, s.key.post_run}].push_back(s);
    std::map<std::string, std::vector<MetricBundle>> runs_per_category;
    std::vector<MetricBundle> run_totals;
    for (const auto& [pair, strata] : by_run) {
      const Aggregation agg = aggregate(strata, taxonomy);
      for (const auto& c : agg.categories) runs_per_category[c.category].push_back(c.bundle);
      run_totals.push_back(agg.total.bundle);
    }
    for (const auto& c : pooled.categories) {
      const auto& runs = runs_per_category.at(c.category);
      CategoryResult r{c, multirun_std(runs)};
      r.metrics.bundle = mean_bundle(runs);
      out.categories.push_back(std::move(r));
    }
    out.total = CategoryResult{pooled.total, multirun_std(run_totals)};
    out.total.metrics.bundle = mean_bundle(run_totals);
  } else {
    UncertaintySpec spec = manifest.uncertainty;
    spec.seed = SplitMix64::derive(manifest.uncertainty.seed, index);
    const AggregateStd sd = bootstrap_aggregate_std(out.strata, taxonomy, spec);
    for (const auto& c : pooled.categories) out.categories.push_back(CategoryResult{c, sd.per_category.at(c.category)});
    out.total = CategoryResult{pooled.total, sd.total};
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

RunManifest RunManifest::from_json(const std::string& text, const std::string& base_dir) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    for (const auto& c : j.at("comparisons")) {
      Comparison comp;
      comp.name = c.at("name").get<std::string>();
      for (const auto& p : c.at("pre")) comp.pre_paths.push_back(resolve(p.get<std::string>(), base_dir));
      for (const auto& p : c.at("post")) comp.post_paths.push_back(resolve(p.get<std::string>(), base_dir));
      comp.context.pre_is_base = c.value("pre_is_base", false);
      comp.context.post_is_base = c.value("post_is_base", false);
      m.comparisons.push_back(std::move(comp));
    }
    if (j.contains("taxonomy") && !j["taxonomy"].is_null())
      m.taxonomy_path = resolve(j["taxonomy"].get<std::string>(), base_dir);
    if (j.contains("extraction")) m.extraction = policy_from_json(j["extraction"]);
    if (j.contains("uncertainty")) {
      const json& u = j["uncertainty"];
      m.uncertainty.mode = parse_uncertainty_mode(u.value("mode", std::string("auto")));
      m.uncertainty.resamples = u.value("resamples", m.uncertainty.resamples);
      m.uncertainty.seed = u.value("seed", m.uncertainty.seed);
    }
    if (j.contains("run_pairing")) m.join.pairing = parse_run_pairing(j["run_pairing"].get<std::string>());
    m.output_dir = resolve(j.value("output_dir", m.output_dir), base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return m;
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), fs::path(path).parent_path().string());
}

void RunManifest::validate() const {
  if (comparisons.empty()) throw ConfigError("manifest lists no comparisons");
  for (const auto& c : comparisons) {
    if (c.pre_paths.empty() || c.post_paths.empty())
      throw ConfigError("comparison '" + c.name + "' needs pre and post snapshots");
    for (const auto* paths : {&c.pre_paths, &c.post_paths})
      for (const auto& p : *paths)
        if (!fs::exists(p)) throw ConfigError("snapshot '" + p + "' does not exist");
  }
  if (taxonomy_path && !fs::exists(*taxonomy_path))
    throw ConfigError("taxonomy config '" + *taxonomy_path + "' does not exist");
  extraction.validate();
  uncertainty.validate();
}

std::string results_to_json(const RunManifest& manifest, const TaxonomyConfig& taxonomy,
                            const std::vector<ComparisonResult>& results) {
  json doc;
  doc["format_version"] = 1;
  doc["config"] = {
      {"taxonomy", json::parse(taxonomy.to_json())},
      {"taxonomy_path", manifest.taxonomy_path ? json(*manifest.taxonomy_path) : json(nullptr)},
      {"extraction", policy_to_json(manifest.extraction)},
      {"uncertainty",
       {{"mode", std::string(to_string(manifest.uncertainty.mode))},
        {"resamples", manifest.uncertainty.resamples},
        {"seed", manifest.uncertainty.seed},
        {"rng", "splitmix64-counter"}}},
      {"run_pairing", std::string(to_string(manifest.join.pairing))},
  };
  json comps = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const ComparisonResult& r = results[i];
    const Comparison& c = manifest.comparisons[i];
    json strata = json::array();
    for (const auto& s : r.strata) {
      const MetricBundle b = compute_bundle(s.counts, s.k);
      strata.push_back({{"benchmark", s.key.benchmark},
                        {"subtask", s.key.subtask},
                        {"pre_run", s.key.pre_run},
                        {"post_run", s.key.post_run},
                        {"k", s.k},
                        {"category", assign_category(s.key.benchmark, s.key.subtask, taxonomy)},
                        {"counts", counts_to_json(s.counts)},
                        {"bundle", bundle_to_json(b)},
                        {"exceeds_ceiling", b.exceeds_ceiling()}});
    }
    json cats = json::array();
    for (const auto& cr : r.categories) cats.push_back(category_to_json(cr));
    json pairs = json::array();
    for (const auto& [p, q] : r.run_pairs) pairs.push_back({p, q});
    comps.push_back({{"name", r.name},
                     {"pre_paths", c.pre_paths},
                     {"post_paths", c.post_paths},
                     {"pre_is_base", c.context.pre_is_base},
                     {"post_is_base", c.context.post_is_base},
                     {"join_report",
                      {{"matched", r.join.matched},
                       {"pre_only", r.join.pre_only},
                       {"post_only", r.join.post_only},
                       {"k_conflicts", r.join.k_conflicts}}},
                     {"extraction", {{"pre", extraction_to_json(r.extraction_pre)}, {"post", extraction_to_json(r.extraction_post)}}},
                     {"uncertainty_mode", std::string(to_string(r.uncertainty_mode))},
                     {"run_pairs", pairs},
                     {"excluded_strata", r.excluded_strata},
                     {"strata", strata},
                     {"categories", cats},
                     {"total", category_to_json(r.total)}});
  }
  doc["comparisons"] = std::move(comps);
  return doc.dump(2) + "\n";
}

std::string render_table(const std::vector<ComparisonResult>& results, const TaxonomyConfig& taxonomy,
                         bool forgetting) {
  std::ostringstream out;
  out << "| Category |";
  for (const auto& r : results) out << ' ' << r.name << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < results.size(); ++i) out << "---:|";
  out << '\n';

  auto cell = [&](const CategoryResult& c) { return (forgetting ? forgetting_cell(c) : backward_cell(c)).render(); };
  for (const auto& name : taxonomy.categories) {
    bool present = false;
    for (const auto& r : results)
      for (const auto& c : r.categories) present |= c.metrics.category == name;
    if (!present) continue;
    out << "| " << name << " |";
    for (const auto& r : results) {
      std::string v = "n/a";
      for (const auto& c : r.categories)
        if (c.metrics.category == name) v = cell(c);
      out << ' ' << v << " |";
    }
    out << '\n';
  }
  out << "| **Total** |";
  for (const auto& r : results) out << ' ' << cell(r.total) << " |";
  out << '\n';
  return out.str();
}

ComputeOutput cmd_compute(const RunManifest& manifest) {
  manifest.validate();
  const TaxonomyConfig taxonomy =
      manifest.taxonomy_path ? TaxonomyConfig::load(*manifest.taxonomy_path) : TaxonomyConfig::default_config();

  ComputeOutput out;
  for (std::size_t i = 0; i < manifest.comparisons.size(); ++i)
    out.comparisons.push_back(compute_comparison(manifest.comparisons[i], i, manifest, taxonomy));

  out.results_json = results_to_json(manifest, taxonomy, out.comparisons);
  out.forgetting_table = render_table(out.comparisons, taxonomy, true);
  out.backward_transfer_table = render_table(out.comparisons, taxonomy, false);

  std::ostringstream radar;
  radar << "comparison,category,f_true,bt_true\n";
  for (const auto& r : out.comparisons)
    for (const auto& c : r.categories)
      radar << csv_field(r.name) << ',' << csv_field(c.metrics.category) << ',' << json(c.metrics.bundle.f_true).dump()
            << ',' << json(c.metrics.bundle.bt_true).dump() << '\n';
  out.radar_csv = radar.str();
  return out;
}

void write_compute_output(const ComputeOutput& out, const std::string& dir) {
  fs::create_directories(dir);
  const std::pair<const char*, const std::string*> files[] = {
      {"results.json", &out.results_json},
      {"forgetting.md", &out.forgetting_table},
      {"backward_transfer.md", &out.backward_transfer_table},
      {"radar.csv", &out.radar_csv},
  };
  for (const auto& [name, content] : files) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error(std::string("cannot write ") + name);
    f << *content;
  }
}

SimulatedLogs cmd_simulate(const SimulateOptions& options) {
  const PopulationSpec& pop = options.population;
  pop.validate();
  if (options.runs < 1) throw ConfigError("runs must be >= 1");

  SimulatedLogs out;
  std::ostringstream pre, post;
  for (std::uint64_t run = 0; run < options.runs; ++run) {
    char run_id[32];
    std::snprintf(run_id, sizeof(run_id), "run-%03llu", static_cast<unsigned long long>(run));
    for (const JoinedSample& s : simulate(pop, run)) {
      SampleRecord r;
      r.benchmark = options.benchmark;
      r.subtask = options.subtask;
      r.sample_key = s.sample_key;
      r.k = s.k;
      r.run_id = run_id;
      r.model_id = options.pre_model;
      r.correct = s.pre;
      pre << serialize_record(r) << '\n';
      r.model_id = options.post_model;
      r.correct = s.post;
      post << serialize_record(r) << '\n';
    }
  }
  out.pre = pre.str();
  out.post = post.str();

  const ExpectedMetrics e = expected_metrics(pop);
  json j;
  j["spec"] = {{"n", pop.n},
               {"k", pop.k},
               {"p_know_pre", pop.p_know_pre},
               {"p_retain", pop.p_retain},
               {"p_learn", pop.p_learn},
               {"seed", pop.seed},
               {"correlated_guess", pop.correlated_guess},
               {"runs", options.runs}};
  j["expected"] = {{"retention", e.retention},
                   {"forgetting", e.forgetting},
                   {"backward_transfer", e.backward_transfer},
                   {"non_acquisition", e.non_acquisition},
                   {"knowledge_loss", e.knowledge_loss},
                   {"knowledge_gain", e.knowledge_gain},
                   {"bundle", bundle_to_json(e.bundle)}};
  out.expected_json = j.dump(2) + "\n";
  return out;
}

std::string cmd_taxonomy_export() { return TaxonomyConfig::default_config().to_json(); }

ExtractAudit cmd_extract(const std::vector<std::string>& paths, const ExtractionPolicy& policy) {
  policy.validate();
  const std::vector<SampleRecord> records = load_snapshot(paths);
  std::vector<const SampleRecord*> raw;
  std::vector<GenerationRecord> gens;
  for (const auto& r : records) {
    if (!r.generation || !r.gold) continue;
    raw.push_back(&r);
    gens.push_back({r.sample_key, *r.generation, r.options, *r.gold});
  }
  const auto outcomes = extract_all(gens, policy);

  ExtractAudit audit;
  audit.report = ExtractionReport::from_outcomes(outcomes);
  std::ostringstream lines;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const bool ok = is_correct(score(outcomes[i], gens[i].gold));
    audit.correct += ok ? 1 : 0;
    json j{{"benchmark", raw[i]->benchmark},
           {"subtask", raw[i]->subtask},
           {"sample_key", raw[i]->sample_key},
           {"run_id", raw[i]->run_id},
           {"gold", gens[i].gold},
           {"predicted", outcomes[i].predicted ? json(*outcomes[i].predicted) : json(nullptr)},
           {"method", outcomes[i].method_used ? json(std::string(to_string(*outcomes[i].method_used))) : json(nullptr)},
           {"correct", ok ? 1 : 0}};
    lines << j.dump() << '\n';
  }
  audit.outcomes_jsonl = lines.str();
  json rep = extraction_to_json(audit.report);
  rep["correct"] = audit.correct;
  rep["accuracy"] = audit.report.total ? static_cast<double>(audit.correct) / static_cast<double>(audit.report.total) : 0.0;
  rep["policy"] = policy_to_json(policy);
  audit.report_json = rep.dump(2) + "\n";
  return audit;
}

}  // namespace fgt
