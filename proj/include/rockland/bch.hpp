#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "rockland/liealg.hpp"

namespace rockland {

/// Largest nilpotency step with a precomputed Dynkin coefficient table.
inline constexpr int kMaxBchStep = 6;

/// Coefficient of the right-nested bracket [w1,[w2,...,wk]] in log(exp X exp Y); letter 0 = X, 1 = Y.
struct DynkinTerm {
  std::vector<std::uint8_t> word;
  Rational coeff;
};

namespace detail {

inline Rational dynkin_coefficient(const std::vector<std::uint8_t>& w) {
  std::size_t k = w.size();
  Rational total = 0;
  // Sum over cuts of w into consecutive blocks X^r Y^s with r + s >= 1.
  std::function<void(std::size_t, int, Rational)> rec = [&](std::size_t pos, int blocks, Rational weight) {
    if (pos == k) {
      Rational sign = (blocks % 2 == 1) ? 1 : -1;
      total += sign * weight / (blocks * static_cast<long>(k));
      return;
    }
    std::size_t r = 0;
    while (pos + r < k && w[pos + r] == 0) ++r;
    // a block takes rr leading X's (rr <= r) then ss Y's, where Y's may only follow all r X's
    for (std::size_t rr = 0; rr <= r; ++rr) {
      if (rr < r) {
        if (rr == 0) continue;
        rec(pos + rr, blocks + 1, weight / factorial(static_cast<unsigned>(rr)));
        continue;
      }
      std::size_t s_max = 0;
      while (pos + rr + s_max < k && w[pos + rr + s_max] == 1) ++s_max;
      for (std::size_t ss = 0; ss <= s_max; ++ss) {
        if (rr + ss == 0) continue;
        rec(pos + rr + ss, blocks + 1,
            weight / (factorial(static_cast<unsigned>(rr)) * factorial(static_cast<unsigned>(ss))));
      }
    }
  };
  rec(0, 0, Rational(1));
  return total;
}

}  // namespace detail

/// All nonzero Dynkin terms with word length <= step.
inline std::vector<DynkinTerm> dynkin_table(int step) {
  if (step < 1) throw DimensionError("step must be positive");
  if (step > kMaxBchStep)
    throw HypothesisError("nilpotency step " + std::to_string(step) + " exceeds the supported BCH table (step <= " +
                          std::to_string(kMaxBchStep) + ")");
  std::vector<DynkinTerm> out;
  for (int k = 1; k <= step; ++k) {
    for (std::uint32_t bits = 0; bits < (1u << k); ++bits) {
      std::vector<std::uint8_t> w(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) w[static_cast<std::size_t>(i)] = (bits >> (k - 1 - i)) & 1u;
      if (k >= 2 && w[static_cast<std::size_t>(k - 1)] == w[static_cast<std::size_t>(k - 2)]) continue;
      Rational c = detail::dynkin_coefficient(w);
      if (c != 0) out.push_back({std::move(w), c});
    }
  }
  return out;
}

/// BCH product in exponential coordinates, exact for a nilpotent algebra of the given step.
template <class T>
std::vector<T> bch_product(const StructureConstants& sc, int step, const std::vector<T>& a, const std::vector<T>& b,
                           const T& zero) {
  std::size_t N = sc.dim();
  if (a.size() != N || b.size() != N) throw DimensionError("BCH operands have wrong length");
  const auto table = dynkin_table(step);
  std::vector<T> out(N, zero);
  if (sc.is_abelian()) {
    for (std::size_t k = 0; k < N; ++k) out[k] = a[k] + b[k];
    return out;
  }
  std::map<std::vector<std::uint8_t>, std::vector<T>> suffix;
  auto is_zero_vec = [&](const std::vector<T>& v) {
    for (const auto& x : v)
      if (!(x == zero)) return false;
    return true;
  };
  std::function<const std::vector<T>&(const std::vector<std::uint8_t>&)> value =
      [&](const std::vector<std::uint8_t>& w) -> const std::vector<T>& {
    auto it = suffix.find(w);
    if (it != suffix.end()) return it->second;
    std::vector<T> v;
    if (w.size() == 1) {
      v = w[0] == 0 ? a : b;
    } else {
      std::vector<std::uint8_t> tail(w.begin() + 1, w.end());
      const std::vector<T>& inner = value(tail);
      if (is_zero_vec(inner))
        v = inner;
      else
        v = sc.bracket(w[0] == 0 ? a : b, inner, zero);
    }
    return suffix.emplace(w, std::move(v)).first->second;
  };
  for (const auto& term : table) {
    const auto& v = value(term.word);
    for (std::size_t k = 0; k < N; ++k)
      if (!(v[k] == zero)) out[k] = out[k] + scale(term.coeff, v[k]);
  }
  return out;
}

inline std::vector<Rational> bch_product(const StructureConstants& sc, int step, const std::vector<Rational>& a,
                                         const std::vector<Rational>& b) {
  return bch_product<Rational>(sc, step, a, b, Rational(0));
}

}  // namespace rockland
