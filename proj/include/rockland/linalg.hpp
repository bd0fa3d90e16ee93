#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rockland/errors.hpp"
#include "rockland/rational.hpp"

namespace rockland {

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Row-reduces m in place; returns pivot columns.
inline std::vector<std::size_t> row_reduce(RationalMatrix& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  std::size_t rows = m.size(), cols = m.front().size(), r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    Rational inv = 1 / m[r][c];
    for (auto& v : m[r]) v *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(RationalMatrix m) { return row_reduce(m).size(); }

inline Rational determinant(RationalMatrix m) {
  std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[c].size() != n) throw DimensionError("determinant of a non-square matrix");
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

inline std::optional<RationalMatrix> inverse(const RationalMatrix& m) {
  std::size_t n = m.size();
  RationalMatrix aug(n, std::vector<Rational>(2 * n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw DimensionError("inverse of a non-square matrix");
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
    aug[i][n + i] = 1;
  }
  auto piv = row_reduce(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  RationalMatrix out(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = aug[i][n + j];
  return out;
}

/// Determinant over any commutative ring by Laplace expansion, memoized on column subsets.
template <class T>
T laplace_determinant(const std::vector<std::vector<T>>& M, const T& zero, const T& one) {
  std::size_t n = M.size();
  if (n == 0) return one;
  if (n > 24) throw DimensionError("symbolic determinant limited to 24x24");
  std::unordered_map<std::uint32_t, T> memo;
  std::function<T(std::uint32_t)> rec = [&](std::uint32_t mask) -> T {
    std::size_t row = n - static_cast<std::size_t>(std::popcount(mask));
    if (row == n) return one;
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    T acc = zero;
    int pos = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(mask & (1u << c))) continue;
      if (!(M[row][c] == zero)) {
        T sub = rec(mask & ~(1u << c));
        T term = M[row][c] * sub;
        acc = (pos % 2 == 0) ? acc + term : acc - term;
      }
      ++pos;
    }
    memo.emplace(mask, acc);
    return acc;
  };
  return rec(n == 32 ? 0xffffffffu : ((1u << n) - 1));
}

/// Incrementally built span of sparse rational vectors, with exact coordinates of
/// any member in terms of the inserted generators.
template <class Key, class Compare = std::less<Key>>
class RationalSpan {
 public:
  using Vector = std::map<Key, Rational, Compare>;

  std::size_t dim() const { return count_; }

  /// Inserts v if independent of the current span; returns whether it was inserted.
  bool insert(const Vector& v) {
    auto [rest, combo] = reduce(v);
    if (rest.empty()) return false;
    for (auto& c : combo) c = -c;
    combo.resize(count_ + 1, 0);
    combo[count_] = 1;
    Key pivot = rest.begin()->first;
    rows_.emplace(pivot, Row{std::move(rest), std::move(combo)});
    ++count_;
    return true;
  }

  bool contains(const Vector& v) const { return reduce(v).first.empty(); }

  /// Coefficients c with v = sum_k c_k g_k over inserted generators g_k, if v lies in the span.
  std::optional<std::vector<Rational>> express(const Vector& v) const {
    auto [rest, combo] = reduce(v);
    if (!rest.empty()) return std::nullopt;
    combo.resize(count_, 0);
    return combo;
  }

 private:
  struct Row {
    Vector v;
    std::vector<Rational> combo;
  };

  std::pair<Vector, std::vector<Rational>> reduce(Vector v) const {
    std::vector<Rational> combo(count_, 0);
    for (const auto& [pivot, row] : rows_) {
      auto it = v.find(pivot);
      if (it == v.end()) continue;
      Rational f = it->second / row.v.at(pivot);
      for (const auto& [k, c] : row.v) {
        auto [jt, inserted] = v.emplace(k, -f * c);
        if (!inserted) {
          jt->second -= f * c;
          if (jt->second == 0) v.erase(jt);
        }
      }
      for (std::size_t k = 0; k < row.combo.size(); ++k)
        if (row.combo[k] != 0) combo[k] += f * row.combo[k];
    }
    return {std::move(v), std::move(combo)};
  }

  std::map<Key, Row, Compare> rows_;
  std::size_t count_ = 0;
};

}  // namespace rockland
