#include "doctest.h"
#include "fgt/error.hpp"
#include "fgt/knowsim.hpp"
#include "support.hpp"

using namespace fgt;
using test::Rational;
using test::enumerate;

namespace {

PopulationSpec spec(double know, double retain, double learn, int k, std::uint64_t n = 1000) {
  PopulationSpec s;
  s.n = n;
  s.k = k;
  s.p_know_pre = know;
  s.p_retain = retain;
  s.p_learn = learn;
  return s;
}

}  // namespace

TEST_CASE("expected rates agree with exhaustive enumeration") {
  const int ks[] = {2, 3, 4, 5, 10};
  const int tenths[] = {0, 1, 3, 5, 6, 9, 10};
  for (int k : ks)
    for (int a : tenths)
      for (int b : tenths)
        for (int c : tenths) {
          const auto exact = enumerate(Rational(a, 10), Rational(b, 10), Rational(c, 10), k);
          const auto e = expected_metrics(spec(a / 10.0, b / 10.0, c / 10.0, k));
          INFO("k=" << k << " K=" << a << " r=" << b << " l=" << c);
          CHECK(e.retention == doctest::Approx(exact.ret.to_double()).epsilon(1e-12));
          CHECK(e.forgetting == doctest::Approx(exact.forg.to_double()).epsilon(1e-12));
          CHECK(e.backward_transfer == doctest::Approx(exact.bt.to_double()).epsilon(1e-12));
          CHECK(e.non_acquisition == doctest::Approx(exact.non.to_double()).epsilon(1e-12));

          const Rational acc_pre = exact.ret + exact.forg;
          const Rational acc_post = exact.ret + exact.bt;
          const Rational f_chance = (Rational(1) - acc_pre) / Rational(k - 1) * (Rational(1) - acc_post);
          CHECK(e.bundle.f_true == doctest::Approx(test::max0(exact.forg - f_chance).to_double()).epsilon(1e-12));
        }
}

TEST_CASE("golden expectation for K=0.6, r=0.9, l=0, k=4") {
  const auto exact = enumerate(Rational(6, 10), Rational(9, 10), Rational(0), 4);
  CHECK(exact.forg == Rational(3, 25));
  CHECK(exact.bt == Rational(3, 40));
  const auto e = expected_metrics(spec(0.6, 0.9, 0.0, 4));
  CHECK(e.bundle.acc_pre == doctest::Approx(0.7));
  CHECK(e.bundle.acc_post == doctest::Approx(0.655));
  CHECK(e.bundle.f_chance == doctest::Approx(0.0345));
  CHECK(e.bundle.f_true == doctest::Approx(0.0855).epsilon(1e-12));
  CHECK(e.knowledge_loss == doctest::Approx(0.06));
  CHECK(e.knowledge_gain == doctest::Approx(0.0));
}

TEST_CASE("without knowledge change, adjusted forgetting vanishes only for pure populations") {
  for (int k : {2, 4, 10}) {
    CHECK(expected_metrics(spec(1.0, 1.0, 0.0, k)).bundle.f_true == 0.0);
    const auto guess = expected_metrics(spec(0.0, 1.0, 0.0, k));
    CHECK(guess.bundle.f_true == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(guess.bundle.f_raw == doctest::Approx((k - 1.0) / (k * k)));
  }
  // A known/unknown mix leaves a residue: the pooled chance baseline spreads
  // guess mass over items that were answered from knowledge.
  const auto mixed = expected_metrics(spec(0.5, 1.0, 0.0, 4));
  CHECK(mixed.knowledge_loss == 0.0);
  CHECK(mixed.bundle.f_true == doctest::Approx(3.0 / 64.0));
}

TEST_CASE("simulation matches the expectation") {
  auto s = spec(0.6, 0.8, 0.2, 4, 200000);
  s.seed = 11;
  const auto e = expected_metrics(s);
  const auto samples = simulate(s);
  REQUIRE(samples.size() == s.n);
  const auto c = tally(samples);
  const double n = static_cast<double>(c.total);
  CHECK(c.retention / n == doctest::Approx(e.retention).epsilon(0.02));
  CHECK(c.forgetting / n == doctest::Approx(e.forgetting).epsilon(0.03));
  CHECK(c.backward_transfer / n == doctest::Approx(e.backward_transfer).epsilon(0.03));
  CHECK(c.non_acquisition / n == doctest::Approx(e.non_acquisition).epsilon(0.03));
}

TEST_CASE("simulation determinism and run structure") {
  auto s = spec(0.5, 0.9, 0.1, 4, 2000);
  s.seed = 3;
  const auto a = simulate(s, 0);
  const auto b = simulate(s, 0);
  const auto c = simulate(s, 1);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pre == b[i].pre);
    CHECK(a[i].post == b[i].post);
    CHECK(a[i].sample_key == c[i].sample_key);
    differ += a[i].pre != c[i].pre;
  }
  CHECK(differ > 0);
}

TEST_CASE("correlated guessing breaks the chance correction") {
  auto s = spec(0.5, 1.0, 0.0, 4, 100000);
  s.seed = 5;
  s.correlated_guess = true;
  const auto c = tally(simulate(s));
  // Repeated guesses never flip, so nothing is forgotten.
  CHECK(c.forgetting == 0);
  const auto b = compute_bundle(c, 4);
  CHECK(b.f_true == 0.0);
  // Independent guesses would show raw forgetting of 0.5 * 1/4 * 3/4.
  CHECK(expected_metrics(s).forgetting == doctest::Approx(0.09375));
}

TEST_CASE("population validation") {
  CHECK_THROWS_AS(spec(0.5, 1, 0, 1).validate(), BadOptionCount);
  CHECK_THROWS(spec(1.5, 1, 0, 4).validate());
  CHECK_THROWS(spec(0.5, 1, 0, 4, 0).validate());
}
