#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fgt/error.hpp"
#include "fgt/report.hpp"
#include "json.hpp"

using namespace fgt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path / name, std::ios::binary) << content;
    return (path / name).string();
  }
};

std::string log_line(const std::string& model, const std::string& bench, int key, int k, int correct,
                     const std::string& subtask = "") {
  return json{{"model_id", model}, {"benchmark", bench}, {"subtask", subtask}, {"sample_key", key},
              {"k", k},            {"correct", correct}}
             .dump() +
         "\n";
}

RunManifest manifest_for(const std::string& pre, const std::string& post, std::uint64_t seed = 0) {
  RunManifest m;
  m.comparisons.push_back({"A->B", {pre}, {post}, {}});
  m.uncertainty.seed = seed;
  m.uncertainty.resamples = 200;
  return m;
}

}  // namespace

TEST_CASE("cell rendering") {
  CHECK(ReportCell{0.129, 0.004, 0.604}.render() == "12.9 ±0.4 (60.4)");
  CHECK(format_percent(0.0625) == "6.3");
  CHECK(format_percent(0.12345) == "12.3");
  CHECK(format_percent(0.1235) == "12.4");
  CHECK(format_percent(0.0) == "0.0");
  CHECK(format_percent(1.0) == "100.0");
  CHECK(format_percent(0.00049) == "0.0");
}

TEST_CASE("eight-sample log against hand arithmetic") {
  TempDir dir("fgt_report_hand");
  // pre 1 1 1 1 1 0 0 0, post 1 1 1 0 0 1 0 0 -> ret 3, forg 2, bt 1, non 2
  const int pre[] = {1, 1, 1, 1, 1, 0, 0, 0};
  const int post[] = {1, 1, 1, 0, 0, 1, 0, 0};
  std::string a, b;
  for (int i = 0; i < 8; ++i) {
    a += log_line("pre", "PIQA", i, 2, pre[i]);
    b += log_line("post", "PIQA", i, 2, post[i]);
  }
  const auto out = cmd_compute(manifest_for(dir.write("pre.jsonl", a), dir.write("post.jsonl", b)));
  REQUIRE(out.comparisons.size() == 1);
  const auto& r = out.comparisons[0];
  CHECK(r.join.matched == 8);
  CHECK(r.uncertainty_mode == UncertaintyMode::Bootstrap);
  REQUIRE(r.categories.size() == 1);
  const auto& m = r.categories[0].metrics;
  CHECK(m.category == "Commonsense");
  CHECK(m.bundle.f_raw == doctest::Approx(0.25));
  CHECK(m.bundle.bt_raw == doctest::Approx(0.125));
  CHECK(m.bundle.f_chance == doctest::Approx(0.1875));
  CHECK(m.bundle.f_true == doctest::Approx(0.0625));
  CHECK(m.bundle.bt_true == 0.0);
  CHECK(m.bundle.f_max == doctest::Approx(0.25));
  CHECK(m.bundle.bt_max == doctest::Approx(0.0));
  CHECK(m.bundle.f_conventional == doctest::Approx(0.125));

  CHECK(out.forgetting_table.find("| Commonsense | 6.3 ±") != std::string::npos);
  CHECK(out.forgetting_table.find("(25.0) |") != std::string::npos);
  CHECK(out.forgetting_table.find("| **Total** | 6.3 ±") != std::string::npos);
  CHECK(out.radar_csv.rfind("comparison,category,f_true,bt_true\n", 0) == 0);
  CHECK(out.radar_csv.find("A->B,Commonsense,0.0625,0.0") != std::string::npos);
}

TEST_CASE("results json agrees with the rendered tables and is deterministic") {
  TempDir dir("fgt_report_consistency");
  SimulateOptions sim;
  sim.population.n = 3000;
  sim.population.p_know_pre = 0.6;
  sim.population.p_retain = 0.85;
  sim.population.p_learn = 0.1;
  sim.population.seed = 17;
  sim.benchmark = "MMLU";
  sim.subtask = "astronomy";
  const auto logs = cmd_simulate(sim);
  const auto m = manifest_for(dir.write("pre.jsonl", logs.pre), dir.write("post.jsonl", logs.post), 4);
  const auto out = cmd_compute(m);
  const auto again = cmd_compute(m);
  CHECK(out.results_json == again.results_json);
  CHECK(out.forgetting_table == again.forgetting_table);

  const json doc = json::parse(out.results_json);
  CHECK(doc["format_version"] == 1);
  const auto& comp = doc["comparisons"][0];
  CHECK(comp["join_report"]["matched"] == 3000);
  for (const auto& cat : comp["categories"]) {
    const std::string cell = cat["cells"]["forgetting"];
    const std::string row = "| " + cat["category"].get<std::string>() + " | " + cell + " |";
    CHECK(out.forgetting_table.find(row) != std::string::npos);
    CHECK(cell == ReportCell{cat["bundle"]["f_true"], cat["std"]["f_true"], cat["bundle"]["f_max"]}.render());
    CHECK(out.backward_transfer_table.find(cat["cells"]["backward_transfer"].get<std::string>()) != std::string::npos);
  }
  CHECK(comp["categories"][0]["category"] == "Science & Tech");
}

TEST_CASE("simulate output is byte-identical for the same seed") {
  SimulateOptions sim;
  sim.population.n = 500;
  sim.population.seed = 99;
  sim.runs = 2;
  const auto a = cmd_simulate(sim);
  const auto b = cmd_simulate(sim);
  CHECK(a.pre == b.pre);
  CHECK(a.post == b.post);
  CHECK(a.expected_json == b.expected_json);
  sim.population.seed = 100;
  CHECK(cmd_simulate(sim).pre != a.pre);
}

TEST_CASE("simulate then compute: nothing forgettable gives zero forgetting") {
  TempDir dir("fgt_report_sim_zero");
  SimulateOptions sim;
  sim.population.n = 1000;
  sim.population.p_know_pre = 1.0;
  sim.population.p_retain = 1.0;
  sim.population.p_learn = 0.0;
  sim.benchmark = "ARC";
  sim.subtask = "easy";
  const auto logs = cmd_simulate(sim);
  const auto out = cmd_compute(manifest_for(dir.write("pre.jsonl", logs.pre), dir.write("post.jsonl", logs.post)));
  CHECK(out.comparisons[0].total.metrics.bundle.f_true == 0.0);
  CHECK(out.comparisons[0].total.metrics.bundle.f_raw == 0.0);
}

TEST_CASE("multiple runs switch to multi-run uncertainty") {
  TempDir dir("fgt_report_multirun");
  SimulateOptions sim;
  sim.population.n = 400;
  sim.population.seed = 2;
  sim.runs = 3;
  sim.benchmark = "GPQA";
  sim.subtask = "diamond";
  const auto logs = cmd_simulate(sim);
  const auto out = cmd_compute(manifest_for(dir.write("pre.jsonl", logs.pre), dir.write("post.jsonl", logs.post)));
  const auto& r = out.comparisons[0];
  CHECK(r.uncertainty_mode == UncertaintyMode::MultiRun);
  CHECK(r.run_pairs.size() == 3);
  CHECK(r.total.std.f_raw > 0.0);
}

TEST_CASE("base-model comparisons drop safety strata") {
  TempDir dir("fgt_report_exclusion");
  std::string a, b;
  for (int i = 0; i < 10; ++i) {
    a += log_line("pre", "TruthfulQA", i, 4, i % 2, "mc1") + log_line("pre", "PIQA", i, 2, 1);
    b += log_line("post", "TruthfulQA", i, 4, 0, "mc1") + log_line("post", "PIQA", i, 2, i % 3 == 0);
  }
  auto m = manifest_for(dir.write("pre.jsonl", a), dir.write("post.jsonl", b));
  CHECK(cmd_compute(m).comparisons[0].categories.size() == 2);
  m.comparisons[0].context.pre_is_base = true;
  const auto out = cmd_compute(m);
  CHECK(out.comparisons[0].excluded_strata == 1);
  REQUIRE(out.comparisons[0].categories.size() == 1);
  CHECK(out.forgetting_table.find("Safety") == std::string::npos);
}

TEST_CASE("manifest parsing") {
  TempDir dir("fgt_report_manifest");
  dir.write("p.jsonl", log_line("m", "PIQA", 0, 2, 1));
  const auto m = RunManifest::from_json(R"({
    "comparisons": [{"name": "x", "pre": ["p.jsonl"], "post": ["p.jsonl"], "post_is_base": true}],
    "extraction": {"tier": "fallback", "window": 64},
    "uncertainty": {"mode": "bootstrap", "resamples": 300, "seed": 7},
    "run_pairing": "cross",
    "output_dir": "out"})",
                                        dir.path.string());
  CHECK(m.comparisons[0].pre_paths[0] == (dir.path / "p.jsonl").string());
  CHECK(m.comparisons[0].context.post_is_base);
  CHECK(m.extraction.tier == ExtractionTier::Fallback);
  CHECK(m.extraction.fallback_window == 64);
  CHECK(m.uncertainty.resamples == 300);
  CHECK(m.join.pairing == RunPairing::CrossProduct);
  CHECK(m.output_dir == (dir.path / "out").string());
  CHECK_NOTHROW(m.validate());
  CHECK_THROWS_AS(RunManifest::from_json("{}"), ConfigError);
  const auto missing = RunManifest::from_json(R"({"comparisons": [{"name": "x", "pre": ["nope"], "post": ["nope"]}]})",
                                              dir.path.string());
  CHECK_THROWS_AS(missing.validate(), ConfigError);
}

TEST_CASE("exported taxonomy drives assignment") {
  const auto c = TaxonomyConfig::from_json(cmd_taxonomy_export());
  CHECK(assign_category("BBH", "object counting", c) == "Knowledge");
  CHECK(assign_category("GPQA", "diamond", c) == "Science & Tech");
}

TEST_CASE("extract audit over the annotated corpus") {
  const auto audit = cmd_extract({std::string(FGT_FIXTURES) + "/extraction_corpus.jsonl"}, ExtractionPolicy::fallback());
  CHECK(audit.report.total == 50);
  std::size_t lines = 0;
  for (char ch : audit.outcomes_jsonl) lines += ch == '\n';
  CHECK(lines == 50);
  const json rep = json::parse(audit.report_json);
  CHECK(rep["total"] == 50);
  CHECK(rep["correct"] == audit.correct);
}
