#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fgt/error.hpp"
#include "fgt/mergelab.hpp"

using namespace fgt;

namespace {

ParamMap single(std::vector<double> v) {
  ParamMap m;
  m.entries["w"] = {{v.size()}, std::move(v)};
  return m;
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ParamMap random_map(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  ParamMap m;
  for (const auto& [name, shape] : std::vector<std::pair<std::string, std::vector<std::size_t>>>{
           {"layer.0.weight", {3, 4}}, {"layer.0.bias", {4}}, {"head", {2, 2, 2}}}) {
    ParamEntry e{shape, {}};
    for (std::size_t i = 0; i < e.numel(); ++i) e.values.push_back(d(rng));
    m.entries[name] = e;
  }
  return m;
}

}  // namespace

TEST_CASE("lerp endpoints and midpoint") {
  const auto a = single({2, 0});
  const auto b = single({0, 2});
  CHECK(lerp(a, b, 1.0) == a);
  CHECK(lerp(a, b, 0.0) == b);
  CHECK(lerp(a, b, 0.5).entries.at("w").values == std::vector<double>{1, 1});
  CHECK(lerp(a, b, 0.25).entries.at("w").values == std::vector<double>{0.5, 1.5});
}

TEST_CASE("lerp is affine in alpha") {
  std::mt19937_64 rng(1);
  const auto a = random_map(rng);
  const auto b = random_map(rng);
  const auto m1 = lerp(a, b, 0.2);
  const auto m2 = lerp(a, b, 0.6);
  const auto mid = lerp(a, b, 0.4);
  for (const auto& [name, e] : mid.entries)
    for (std::size_t i = 0; i < e.values.size(); ++i)
      CHECK(e.values[i] ==
            doctest::Approx(0.5 * (m1.entries.at(name).values[i] + m2.entries.at(name).values[i])).epsilon(1e-12));
}

TEST_CASE("slerp of orthogonal unit vectors") {
  const auto m = slerp(single({1, 0}), single({0, 1}), 0.5);
  const auto& v = m.entries.at("w").values;
  CHECK(v[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  const auto q = slerp(single({1, 0}), single({0, 1}), 1.0 / 3.0);
  CHECK(q.entries.at("w").values[0] == doctest::Approx(std::cos(std::numbers::pi / 3)).epsilon(1e-12));
}

TEST_CASE("slerp endpoints and norm preservation") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    auto a = random_map(rng);
    auto b = random_map(rng);
    // Rescale b so every entry has the norm of the matching entry of a.
    for (auto& [name, e] : b.entries) {
      const double s = norm(a.entries.at(name).values) / norm(e.values);
      for (double& x : e.values) x *= s;
    }
    for (double alpha : {0.0, 0.3, 0.5, 0.9, 1.0}) {
      const auto m = slerp(a, b, alpha);
      for (const auto& [name, e] : m.entries)
        CHECK(norm(e.values) == doctest::Approx(norm(a.entries.at(name).values)).epsilon(1e-9));
    }
    const auto at_a = slerp(a, b, 1.0);
    for (const auto& [name, e] : at_a.entries)
      for (std::size_t i = 0; i < e.values.size(); ++i)
        CHECK(e.values[i] == doctest::Approx(a.entries.at(name).values[i]).epsilon(1e-9));
  }
}

TEST_CASE("slerp of nearly parallel vectors falls back to lerp") {
  const auto a = single({1, 1e-9});
  const auto b = single({1, 0});
  const auto s = slerp(a, b, 0.5);
  const auto l = lerp(a, b, 0.5);
  CHECK(s.entries.at("w").values[0] == doctest::Approx(l.entries.at("w").values[0]).epsilon(1e-12));
  CHECK(std::isfinite(s.entries.at("w").values[1]));
}

TEST_CASE("merge errors") {
  CHECK_THROWS_AS(slerp(single({0, 0}), single({1, 0}), 0.5), ZeroVector);
  CHECK_THROWS_AS(slerp(single({1, 0}), single({-1, 0}), 0.5), DegenerateAngle);
  CHECK_THROWS_AS(lerp(single({1, 0}), single({1, 0, 0}), 0.5), ShapeMismatch);
  ParamMap other = single({1, 0});
  other.entries["extra"] = {{1}, {1}};
  CHECK_THROWS_AS(lerp(single({1, 0}), other, 0.5), ShapeMismatch);
  CHECK_THROWS_AS((MergeSpec{MergeMethod::Lerp, 1.5}.validate()), ConfigError);
  CHECK_THROWS_AS(parse_merge_method("ties"), ConfigError);
  CHECK(parse_merge_method("slerp") == MergeMethod::Slerp);
}

TEST_CASE("binary container round trip is exact for float values") {
  std::mt19937_64 rng(3);
  ParamMap m = random_map(rng);
  for (auto& [name, e] : m.entries)
    for (double& x : e.values) x = static_cast<float>(x);
  std::stringstream ss;
  write_params_binary(ss, m);
  CHECK(ss.str().substr(0, 8) == "FGTPARAM");
  CHECK(read_params_binary(ss) == m);

  std::stringstream bad("FGTPARAX");
  CHECK_THROWS_AS(read_params_binary(bad), FormatError);
  std::string truncated = ss.str().substr(0, ss.str().size() - 3);
  std::stringstream tr(truncated);
  CHECK_THROWS_AS(read_params_binary(tr), FormatError);
}

TEST_CASE("text container round trip") {
  std::mt19937_64 rng(4);
  const ParamMap m = random_map(rng);
  std::stringstream ss;
  write_params_text(ss, m);
  CHECK(read_params_text(ss) == m);

  std::stringstream bad("# fgt-params v1\nw 2x2 1 2 3\n");
  CHECK_THROWS_AS(read_params_text(bad), FormatError);
}

TEST_CASE("load and save pick the container by path") {
  std::mt19937_64 rng(5);
  ParamMap m = random_map(rng);
  for (auto& [name, e] : m.entries)
    for (double& x : e.values) x = static_cast<float>(x);
  const auto dir = std::filesystem::temp_directory_path() / "fgt_mergelab_test";
  std::filesystem::create_directories(dir);
  save_params((dir / "p.bin").string(), m);
  save_params((dir / "p.txt").string(), m);
  CHECK(load_params((dir / "p.bin").string()) == m);
  CHECK(load_params((dir / "p.txt").string()) == m);
  std::filesystem::remove_all(dir);
}
