#include "fgt/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "fgt/error.hpp"
#include "json.hpp"

namespace fgt {

using nlohmann::json;

namespace {

struct LineError {
  std::string field;
  std::string message;
};

std::string require_string(const json& obj, const char* field, bool allow_number = false) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw LineError{field, "missing"};
  if (it->is_string()) return it->get<std::string>();
  if (allow_number && it->is_number_integer()) return std::to_string(it->get<long long>());
  throw LineError{field, "expected a string"};
}

std::string optional_string(const json& obj, const char* field, std::string fallback) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return fallback;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw LineError{field, "expected a string"};
}

std::string default_label(std::size_t i) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('A' + i % 26));
    i = i / 26;
  } while (i-- > 0);
  return s;
}

SampleRecord decode(const json& obj) {
  if (!obj.is_object()) throw LineError{"<record>", "expected a JSON object"};
  SampleRecord r;
  r.model_id = require_string(obj, "model_id");
  r.benchmark = require_string(obj, "benchmark");
  r.subtask = optional_string(obj, "subtask", "");
  r.sample_key = require_string(obj, "sample_key", true);
  r.run_id = optional_string(obj, "run_id", "0");

  const auto k = obj.find("k");
  if (k == obj.end()) throw LineError{"k", "missing"};
  if (!k->is_number_integer()) throw LineError{"k", "expected an integer"};
  const long long kv = k->get<long long>();
  if (kv < 2 || kv > 1000000) throw LineError{"k", "option count must be >= 2, got " + std::to_string(kv)};
  r.k = static_cast<int>(kv);

  if (const auto c = obj.find("correct"); c != obj.end() && !c->is_null()) {
    if (c->is_boolean()) {
      r.correct = correctness(c->get<bool>());
    } else if (c->is_number_integer() && (c->get<long long>() == 0 || c->get<long long>() == 1)) {
      r.correct = correctness(c->get<long long>() == 1);
    } else {
      throw LineError{"correct", "expected 0, 1, true or false"};
    }
  }
  if (const auto g = obj.find("generation"); g != obj.end() && !g->is_null()) {
    if (!g->is_string()) throw LineError{"generation", "expected a string"};
    r.generation = g->get<std::string>();
  }
  if (const auto g = obj.find("gold"); g != obj.end() && !g->is_null()) {
    if (!g->is_string()) throw LineError{"gold", "expected a string"};
    r.gold = g->get<std::string>();
  }
  if (const auto o = obj.find("options"); o != obj.end() && !o->is_null()) {
    if (!o->is_array()) throw LineError{"options", "expected an array"};
    for (std::size_t i = 0; i < o->size(); ++i) {
      const json& e = (*o)[i];
      if (e.is_string()) {
        r.options.push_back({default_label(i), e.get<std::string>()});
      } else if (e.is_object() && e.contains("label") && e["label"].is_string()) {
        r.options.push_back({e["label"].get<std::string>(), e.value("text", std::string{})});
      } else {
        throw LineError{"options", "entries must be strings or {label, text} objects"};
      }
    }
  }

  if (!r.correct && !r.generation) throw LineError{"correct", "record needs 'correct' or 'generation'"};
  if (r.is_raw()) {
    if (!r.gold) throw LineError{"gold", "raw records need a gold label"};
    if (r.options.empty()) throw LineError{"options", "raw records need options"};
    if (static_cast<int>(r.options.size()) != r.k)
      throw LineError{"options", "option count " + std::to_string(r.options.size()) + " disagrees with k"};
    const bool known = std::any_of(r.options.begin(), r.options.end(), [&](const auto& op) { return op.label == *r.gold; });
    if (!known) throw LineError{"gold", "'" + *r.gold + "' is not an option label"};
  }
  return r;
}

}  // namespace

void ParseResult::raise_first() const {
  if (issues.empty()) return;
  const ParseIssue& i = issues.front();
  if (i.kind == "DuplicateKey") throw DuplicateKey("line " + std::to_string(i.line) + ": " + i.message);
  throw SchemaError(i.line, i.field, i.message);
}

ParseResult parse_snapshot(std::istream& in) {
  ParseResult out;
  std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
  std::map<std::pair<std::string, std::string>, int> k_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw LineError{"<json>", e.what()};
      }
      SampleRecord r = decode(obj);

      const auto [kit, fresh] = k_of.emplace(std::pair{r.benchmark, r.subtask}, r.k);
      if (!fresh && kit->second != r.k)
        throw LineError{"k", "k=" + std::to_string(r.k) + " differs from k=" + std::to_string(kit->second) +
                                  " seen earlier for " + r.benchmark + "/" + r.subtask};

      if (!seen.emplace(r.benchmark, r.subtask, r.sample_key, r.run_id).second) {
        out.issues.push_back({lineno, "DuplicateKey", "sample_key",
                              "duplicate (benchmark, subtask, sample_key, run_id) = (" + r.benchmark + ", " +
                                  r.subtask + ", " + r.sample_key + ", " + r.run_id + ")"});
        continue;
      }
      out.records.push_back(std::move(r));
    } catch (const LineError& e) {
      out.issues.push_back({lineno, "SchemaError", e.field, e.message});
    }
  }
  return out;
}

ParseResult parse_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  return parse_snapshot(in);
}

std::string serialize_record(const SampleRecord& r) {
  json j;
  j["model_id"] = r.model_id;
  j["benchmark"] = r.benchmark;
  j["subtask"] = r.subtask;
  j["sample_key"] = r.sample_key;
  j["k"] = r.k;
  j["run_id"] = r.run_id;
  if (r.correct) j["correct"] = is_correct(*r.correct) ? 1 : 0;
  if (r.generation) j["generation"] = *r.generation;
  if (r.gold) j["gold"] = *r.gold;
  if (!r.options.empty()) {
    json opts = json::array();
    for (const auto& o : r.options) opts.push_back({{"label", o.label}, {"text", o.text}});
    j["options"] = std::move(opts);
  }
  return j.dump();
}

void write_snapshot(std::ostream& out, const std::vector<SampleRecord>& records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

ExtractionReport score_snapshot(std::vector<SampleRecord>& records, const ExtractionPolicy& policy) {
  std::vector<std::size_t> raw;
  std::vector<GenerationRecord> gens;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SampleRecord& r = records[i];
    if (!r.is_raw()) continue;
    raw.push_back(i);
    gens.push_back({r.sample_key, r.generation.value_or(""), r.options, r.gold.value_or("")});
  }
  const auto outcomes = extract_all(gens, policy);
  for (std::size_t j = 0; j < raw.size(); ++j) records[raw[j]].correct = score(outcomes[j], gens[j].gold);
  return ExtractionReport::from_outcomes(outcomes);
}

RunPairing parse_run_pairing(const std::string& s) {
  if (s == "positional") return RunPairing::Positional;
  if (s == "cross" || s == "cross-product") return RunPairing::CrossProduct;
  throw ConfigError("unknown run pairing '" + s + "'");
}

std::string_view to_string(RunPairing p) noexcept {
  return p == RunPairing::Positional ? "positional" : "cross-product";
}

JoinResult join_snapshots(const std::vector<SampleRecord>& pre, const std::vector<SampleRecord>& post,
                          const JoinOptions& options) {
  using ItemKey = std::tuple<std::string, std::string, std::string>;
  std::map<std::string, std::vector<const SampleRecord*>> pre_runs, post_runs;
  for (const auto& r : pre) {
    if (!r.correct) throw std::logic_error("join requires scored records");
    pre_runs[r.run_id].push_back(&r);
  }
  for (const auto& r : post) {
    if (!r.correct) throw std::logic_error("join requires scored records");
    post_runs[r.run_id].push_back(&r);
  }

  JoinResult out;
  std::vector<std::string> pre_ids, post_ids;
  for (const auto& [id, _] : pre_runs) pre_ids.push_back(id);
  for (const auto& [id, _] : post_runs) post_ids.push_back(id);

  if (options.pairing == RunPairing::Positional) {
    for (std::size_t i = 0; i < std::min(pre_ids.size(), post_ids.size()); ++i)
      out.run_pairs.emplace_back(pre_ids[i], post_ids[i]);
    for (std::size_t i = post_ids.size(); i < pre_ids.size(); ++i) out.report.pre_only += pre_runs[pre_ids[i]].size();
    for (std::size_t i = pre_ids.size(); i < post_ids.size(); ++i) out.report.post_only += post_runs[post_ids[i]].size();
  } else {
    for (const auto& p : pre_ids)
      for (const auto& q : post_ids) out.run_pairs.emplace_back(p, q);
  }

  for (const auto& [pre_id, post_id] : out.run_pairs) {
    const auto& pre_recs = pre_runs[pre_id];
    const auto& post_recs = post_runs[post_id];
    std::map<ItemKey, const SampleRecord*> index;
    for (const SampleRecord* r : post_recs) index.emplace(ItemKey{r->benchmark, r->subtask, r->sample_key}, r);

    std::uint64_t used = 0;
    for (const SampleRecord* a : pre_recs) {
      const auto it = index.find(ItemKey{a->benchmark, a->subtask, a->sample_key});
      if (it == index.end()) {
        ++out.report.pre_only;
        continue;
      }
      const SampleRecord* b = it->second;
      ++used;
      if (a->k != b->k) {
        if (options.strict_k)
          throw KConflict("item (" + a->benchmark + ", " + a->subtask + ", " + a->sample_key + ") has k=" +
                          std::to_string(a->k) + " before and k=" + std::to_string(b->k) + " after");
        ++out.report.k_conflicts;
        continue;
      }
      ++out.report.matched;
      out.strata[StratumKey{a->benchmark, a->subtask, pre_id, post_id}].push_back(
          JoinedSample{a->sample_key, *a->correct, *b->correct, a->k});
    }
    out.report.post_only += post_recs.size() - used;
  }
  return out;
}

}  // namespace fgt
