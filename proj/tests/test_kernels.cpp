#include <omp.h>

#include <random>

#include "doctest.h"
#include "fgt/kernels.hpp"

using namespace fgt;

namespace {

bool same(const std::vector<JoinedSample>& a, const std::vector<JoinedSample>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].sample_key != b[i].sample_key || a[i].pre != b[i].pre || a[i].post != b[i].post || a[i].k != b[i].k)
      return false;
  return true;
}

}  // namespace

TEST_CASE("SplitMix64 is counter based") {
  SplitMix64 seq(42);
  for (std::uint64_t i = 0; i < 100; ++i) CHECK(seq.next() == SplitMix64(42).at(i));
  // Reference output of SplitMix64 seeded with 0 (first draw).
  CHECK(SplitMix64(0).at(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("SplitMix64 uniform integer draws are unbiased enough") {
  SplitMix64 rng(9);
  std::vector<int> hist(10);
  for (int i = 0; i < 100000; ++i) ++hist[rng.below(10)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("simulate: serial and OpenMP kernels agree bit for bit") {
  PopulationSpec spec;
  spec.n = 50000;
  spec.k = 5;
  spec.p_know_pre = 0.4;
  spec.p_retain = 0.7;
  spec.p_learn = 0.2;
  spec.seed = 99;
  std::vector<JoinedSample> a(spec.n), b(spec.n), c(spec.n);
  kernels::ref::simulate(spec, 3, a);
  kernels::par::simulate(spec, 3, b);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  kernels::par::simulate(spec, 3, c);
  omp_set_num_threads(saved);
  CHECK(same(a, b));
  CHECK(same(a, c));
}

TEST_CASE("tally: serial and OpenMP kernels agree") {
  std::mt19937_64 rng(5);
  std::vector<JoinedSample> s(12345);
  for (auto& x : s) {
    x.pre = correctness(rng() & 1);
    x.post = correctness(rng() & 1);
    x.k = 4;
  }
  const auto r = kernels::ref::tally(s);
  const auto p = kernels::par::tally(s);
  CHECK(r.counts == p.counts);
  CHECK(r.k_min == p.k_min);
  CHECK(r.k_max == p.k_max);
  s[777].k = 9;
  CHECK(kernels::par::tally(s).k_max == 9);
  CHECK(kernels::ref::tally(s).k_max == 9);
}

TEST_CASE("bootstrap_counts: serial and OpenMP kernels agree") {
  std::vector<std::vector<Quadrant>> strata(3);
  std::mt19937_64 rng(1);
  for (std::size_t s = 0; s < strata.size(); ++s)
    for (std::size_t i = 0; i < 200 + 50 * s; ++i) strata[s].push_back(static_cast<Quadrant>(rng() % 4));
  const auto a = kernels::ref::bootstrap_counts(strata, 150, 77);
  const auto b = kernels::par::bootstrap_counts(strata, 150, 77);
  REQUIRE(a.size() == 450);
  CHECK(a == b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].total == strata[i % 3].size());
}

TEST_CASE("lerp, combine and gram: serial and OpenMP kernels agree") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> a(100003), b(a.size()), r1(a.size()), r2(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = nd(rng), b[i] = nd(rng);

  kernels::ref::lerp(a, b, 0.37, r1);
  kernels::par::lerp(a, b, 0.37, r2);
  CHECK(r1 == r2);

  kernels::ref::combine(a, b, 0.2, -1.3, r1);
  kernels::par::combine(a, b, 0.2, -1.3, r2);
  CHECK(r1 == r2);

  const auto g1 = kernels::ref::gram(a, b);
  const auto g2 = kernels::par::gram(a, b);
  CHECK(g1.aa == doctest::Approx(g2.aa).epsilon(1e-12));
  CHECK(g1.bb == doctest::Approx(g2.bb).epsilon(1e-12));
  CHECK(g1.ab == doctest::Approx(g2.ab).epsilon(1e-9));
}

TEST_CASE("extract: serial and OpenMP kernels agree") {
  std::vector<GenerationRecord> recs;
  const char* tails[] = {"Answer: A", "answer: b", "answer = 3", "so it is Paris", "nothing"};
  for (int i = 0; i < 500; ++i)
    recs.push_back({std::to_string(i), std::string("reasoning...\n") + tails[i % 5],
                    {{"A", "Rome"}, {"B", "Paris"}, {"C", "Oslo"}, {"D", "Bern"}}, "B"});
  std::vector<ExtractionOutcome> a(recs.size()), b(recs.size());
  kernels::ref::extract(recs, ExtractionPolicy::fallback(), a);
  kernels::par::extract(recs, ExtractionPolicy::fallback(), b);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(a[i].predicted == b[i].predicted);
    CHECK(a[i].method_used == b[i].method_used);
  }
}
