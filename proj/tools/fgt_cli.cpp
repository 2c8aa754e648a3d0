// fgt: sample-wise forgetting and backward transfer between two evaluation
// snapshots.
//
//   fgt compute   --pre pre.jsonl --post post.jsonl --out report/
//   fgt simulate  --n 1000 --k 4 --out-pre pre.jsonl --out-post post.jsonl
//   fgt merge     --method slerp --alpha 0.3 a.bin b.bin out.bin
//   fgt taxonomy export [--out taxonomy.json]
//   fgt extract   --tier fallback raw.jsonl

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "fgt/error.hpp"
#include "fgt/kernels.hpp"
#include "fgt/mergelab.hpp"
#include "fgt/report.hpp"

namespace {

struct PolicyFlags {
  std::string tier = "strict";
  bool case_sensitive = false;
  bool numeric_aliases = false;
  bool choice_text = false;
  std::size_t window = 200;

  void attach(CLI::App* app) {
    app->add_option("--tier", tier, "Extraction tier: strict, lenient or fallback")
        ->check(CLI::IsMember({"strict", "lenient", "fallback"}));
    app->add_flag("--case-sensitive", case_sensitive, "Lenient/fallback: match labels case-sensitively");
    app->add_flag("--numeric-aliases", numeric_aliases, "Fallback: accept numeric answers");
    app->add_flag("--choice-text", choice_text, "Fallback: accept verbatim option bodies");
    app->add_option("--window", window, "Fallback search window in bytes");
  }

  fgt::ExtractionPolicy policy() const {
    fgt::ExtractionPolicy p;
    switch (fgt::parse_tier(tier)) {
      case fgt::ExtractionTier::Strict: p = fgt::ExtractionPolicy::strict(); break;
      case fgt::ExtractionTier::Lenient: p = fgt::ExtractionPolicy::lenient(); break;
      case fgt::ExtractionTier::Fallback:
        p = fgt::ExtractionPolicy::fallback();
        p.allow_numeric_aliases = numeric_aliases;
        p.allow_choice_text_match = choice_text;
        if (!numeric_aliases && !choice_text) p.allow_numeric_aliases = p.allow_choice_text_match = true;
        break;
    }
    if (case_sensitive) p.case_sensitive = true;
    p.fallback_window = window;
    p.validate();
    return p;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-wise forgetting and backward transfer analysis"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string config;
  app.add_option("--seed", seed, "Seed for simulation and bootstrap");
  app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");
  app.add_option("--config", config, "Run manifest (JSON) for compute");

  // compute
  auto* compute = app.add_subcommand("compute", "Compute metrics and reports for pre/post snapshots");
  std::vector<std::string> pre_paths, post_paths;
  std::string name = "post", taxonomy_path, out_dir, uncertainty = "auto", pairing = "positional";
  std::uint64_t resamples = 1000;
  bool pre_base = false, post_base = false;
  PolicyFlags compute_policy;
  compute->add_option("--pre", pre_paths, "Pre-training snapshot file(s)");
  compute->add_option("--post", post_paths, "Post-training snapshot file(s)");
  compute->add_option("--name", name, "Column name of this comparison");
  compute->add_option("--taxonomy", taxonomy_path, "Taxonomy config (default: built-in)");
  compute->add_option("--out", out_dir, "Output directory");
  compute->add_option("--uncertainty", uncertainty, "auto, multirun or bootstrap")
      ->check(CLI::IsMember({"auto", "multirun", "bootstrap"}));
  compute->add_option("--resamples", resamples, "Bootstrap resamples");
  compute->add_option("--run-pairing", pairing, "positional or cross")
      ->check(CLI::IsMember({"positional", "cross"}));
  compute->add_flag("--pre-base", pre_base, "Pre snapshot is a base model");
  compute->add_flag("--post-base", post_base, "Post snapshot is a base model");
  compute_policy.attach(compute);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write synthetic snapshots from the know/guess model");
  fgt::SimulateOptions sim_opts;
  std::string out_pre = "pre.jsonl", out_post = "post.jsonl", out_expected;
  sim->add_option("--n", sim_opts.population.n, "Items per run");
  sim->add_option("--k", sim_opts.population.k, "Options per item");
  sim->add_option("--p-know-pre", sim_opts.population.p_know_pre, "Probability an item is known before");
  sim->add_option("--p-retain", sim_opts.population.p_retain, "Probability known knowledge is kept");
  sim->add_option("--p-learn", sim_opts.population.p_learn, "Probability unknown knowledge is acquired");
  sim->add_flag("--correlated-guess", sim_opts.population.correlated_guess, "Repeat the pre guess after training");
  sim->add_option("--runs", sim_opts.runs, "Evaluation runs");
  sim->add_option("--benchmark", sim_opts.benchmark, "Benchmark name in the records");
  sim->add_option("--subtask", sim_opts.subtask, "Subtask name in the records");
  sim->add_option("--out-pre", out_pre, "Pre snapshot output");
  sim->add_option("--out-post", out_post, "Post snapshot output");
  sim->add_option("--expected", out_expected, "Write exact expected metrics (JSON)");

  // merge
  auto* merge = app.add_subcommand("merge", "Interpolate two parameter files");
  std::string method = "lerp", in_a, in_b, out_merged;
  double alpha = 0.5;
  merge->add_option("--method", method, "lerp or slerp")->check(CLI::IsMember({"lerp", "slerp"}));
  merge->add_option("--alpha", alpha, "Weight on the first (pre) checkpoint")->check(CLI::Range(0.0, 1.0));
  merge->add_option("in_a", in_a, "Pre checkpoint")->required();
  merge->add_option("in_b", in_b, "Post checkpoint")->required();
  merge->add_option("out", out_merged, "Output (.txt for the text container)")->required();

  // taxonomy export
  auto* taxonomy = app.add_subcommand("taxonomy", "Taxonomy config utilities");
  taxonomy->require_subcommand(1);
  auto* tax_export = taxonomy->add_subcommand("export", "Print the built-in taxonomy config");
  std::string tax_out;
  tax_export->add_option("--out", tax_out, "Write to file instead of stdout");

  // extract
  auto* extract = app.add_subcommand("extract", "Audit answer extraction on raw snapshots");
  std::vector<std::string> extract_paths;
  std::string outcomes_out, report_out;
  PolicyFlags extract_policy;
  extract->add_option("files", extract_paths, "Snapshot file(s) with raw generations")->required();
  extract->add_option("--outcomes", outcomes_out, "Per-record outcomes (JSONL)");
  extract->add_option("--report", report_out, "Report (JSON); stdout if omitted");
  extract_policy.attach(extract);

  CLI11_PARSE(app, argc, argv);

  try {
    fgt::kernels::set_threads(threads);

    if (*compute) {
      fgt::RunManifest m;
      if (!config.empty()) {
        m = fgt::RunManifest::load(config);
      } else {
        fgt::Comparison c;
        c.name = name;
        c.pre_paths = pre_paths;
        c.post_paths = post_paths;
        c.context = {pre_base, post_base};
        m.comparisons.push_back(c);
        if (!taxonomy_path.empty()) m.taxonomy_path = taxonomy_path;
        m.extraction = compute_policy.policy();
        m.uncertainty.mode = fgt::parse_uncertainty_mode(uncertainty);
        m.uncertainty.resamples = resamples;
        m.join.pairing = fgt::parse_run_pairing(pairing);
      }
      if (seed) m.uncertainty.seed = *seed;
      if (!out_dir.empty()) m.output_dir = out_dir;
      const fgt::ComputeOutput out = fgt::cmd_compute(m);
      fgt::write_compute_output(out, m.output_dir);
      std::cout << "## Forgetting\n\n" << out.forgetting_table << "\n## Backward transfer\n\n"
                << out.backward_transfer_table;
    } else if (*sim) {
      if (seed) sim_opts.population.seed = *seed;
      const fgt::SimulatedLogs logs = fgt::cmd_simulate(sim_opts);
      write_file(out_pre, logs.pre);
      write_file(out_post, logs.post);
      if (!out_expected.empty()) write_file(out_expected, logs.expected_json);
    } else if (*merge) {
      const fgt::MergeSpec spec{fgt::parse_merge_method(method), alpha};
      fgt::save_params(out_merged, fgt::merge(fgt::load_params(in_a), fgt::load_params(in_b), spec));
    } else if (*taxonomy) {
      const std::string text = fgt::cmd_taxonomy_export();
      if (tax_out.empty()) std::cout << text;
      else write_file(tax_out, text);
    } else if (*extract) {
      const fgt::ExtractAudit audit = fgt::cmd_extract(extract_paths, extract_policy.policy());
      if (!outcomes_out.empty()) write_file(outcomes_out, audit.outcomes_jsonl);
      if (report_out.empty()) std::cout << audit.report_json;
      else write_file(report_out, audit.report_json);
    }
  } catch (const fgt::Error& e) {
    std::cerr << "error [" << e.kind() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
