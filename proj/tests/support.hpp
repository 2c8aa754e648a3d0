#pragma once

// Test-only oracles. Nothing here calls into the library's metric code.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fgt/transition.hpp"

namespace fgt::test {

/// Exact rational with 128-bit intermediates; enough for count arithmetic
/// and small enumerations.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}  // NOLINT
  Rational(__int128 n, __int128 d) : num(n), den(d) { normalize(); }

  static __int128 gcd(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  void normalize() {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const __int128 g = gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Rational max0(Rational r) { return r.num < 0 ? Rational(0) : r; }

/// Exact metrics from quadrant counts, written straight from the definitions.
struct ExactMetrics {
  Rational f, bt, acc_pre, acc_post, f_chance, bt_chance, f_true, bt_true, f_max, bt_max, f_conv;
};

inline ExactMetrics exact_metrics(long long ret, long long forg, long long bt, long long non, long long k) {
  const long long n = ret + forg + bt + non;
  ExactMetrics m;
  m.f = Rational(forg, n);
  m.bt = Rational(bt, n);
  m.acc_pre = Rational(ret + forg, n);
  m.acc_post = Rational(ret + bt, n);
  const Rational one(1), km1(k - 1), kk(k);
  m.f_chance = (one - m.acc_pre) / km1 * (one - m.acc_post);
  m.bt_chance = (one - m.acc_pre) * ((one - m.acc_post) / km1);
  m.f_true = max0(m.f - m.f_chance);
  m.bt_true = max0(m.bt - m.bt_chance);
  m.f_max = max0((kk * m.acc_pre - one) / km1);
  m.bt_max = max0((kk * m.acc_post - one) / km1);
  m.f_conv = max0(m.acc_pre - m.acc_post);
  return m;
}

/// Brute-force quadrant count straight from 0/1 vectors.
inline TransitionCounts brute_tally(const std::vector<int>& pre, const std::vector<int>& post) {
  TransitionCounts c;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    if (pre[i] == 1 && post[i] == 1) ++c.retention;
    if (pre[i] == 1 && post[i] == 0) ++c.forgetting;
    if (pre[i] == 0 && post[i] == 1) ++c.backward_transfer;
    if (pre[i] == 0 && post[i] == 0) ++c.non_acquisition;
    ++c.total;
  }
  return c;
}

inline std::vector<JoinedSample> samples_from(const std::vector<int>& pre, const std::vector<int>& post, int k) {
  std::vector<JoinedSample> s;
  for (std::size_t i = 0; i < pre.size(); ++i)
    s.push_back({std::to_string(i), correctness(pre[i] == 1), correctness(post[i] == 1), k});
  return s;
}

inline std::vector<JoinedSample> samples_from_counts(const TransitionCounts& c, int k) {
  std::vector<int> pre, post;
  auto push = [&](std::uint64_t n, int a, int b) {
    for (std::uint64_t i = 0; i < n; ++i) {
      pre.push_back(a);
      post.push_back(b);
    }
  };
  push(c.retention, 1, 1);
  push(c.forgetting, 1, 0);
  push(c.backward_transfer, 0, 1);
  push(c.non_acquisition, 0, 0);
  return samples_from(pre, post, k);
}

struct ExactRates {
  Rational ret, forg, bt, non;
};

// Enumerates know-state transitions and every (pre guess, post guess) pair;
// option 0 is the correct one.
inline ExactRates enumerate(Rational know, Rational retain, Rational learn, int k) {
  ExactRates out;
  const Rational one(1);
  const Rational g = Rational(1, k);
  struct State {
    bool pre, post;
    Rational p;
  };
  const State states[] = {{true, true, know * retain},
                          {true, false, know * (one - retain)},
                          {false, true, (one - know) * learn},
                          {false, false, (one - know) * (one - learn)}};
  for (const auto& s : states) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const bool pre_ok = s.pre || a == 0;
        const bool post_ok = s.post || b == 0;
        const Rational p = s.p * g * g;
        if (pre_ok && post_ok) out.ret = out.ret + p;
        if (pre_ok && !post_ok) out.forg = out.forg + p;
        if (!pre_ok && post_ok) out.bt = out.bt + p;
        if (!pre_ok && !post_ok) out.non = out.non + p;
      }
    }
  }
  return out;
}

}  // namespace fgt::test
