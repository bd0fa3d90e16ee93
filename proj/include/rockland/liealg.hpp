#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "rockland/fields.hpp"
#include "rockland/linalg.hpp"

namespace rockland {

/// Coordinate of a vector field viewed as a rational vector: (component, monomial).
using FieldKey = std::pair<std::size_t, Monomial>;

struct FieldKeyLess {
  bool operator()(const FieldKey& a, const FieldKey& b) const {
    if (a.first != b.first) return a.first < b.first;
    return GrlexOrder{}(a.second, b.second);
  }
};

using FieldSpan = RationalSpan<FieldKey, FieldKeyLess>;

inline FieldSpan::Vector field_vector(const PolyVectorField& X) {
  FieldSpan::Vector v;
  for (std::size_t i = 0; i < X.nvars(); ++i)
    for (const auto& [m, c] : X[i].terms()) v.emplace(FieldKey{i, m}, c);
  return v;
}

/// Graded basis of Lie(X), generators first within their degrees.
struct LieBasis {
  std::vector<PolyVectorField> W;
  std::vector<int> degrees;
  std::vector<std::size_t> generator_indices;

  std::size_t size() const { return W.size(); }
  std::size_t nvars() const { return W.empty() ? 0 : W.front().nvars(); }
};

/// Structure constants [W_i, W_j] = sum_k c_ij^k W_k, stored sparsely for i < j.
class StructureConstants {
 public:
  struct Entry {
    std::size_t i, j, k;
    Rational c;
  };

  StructureConstants() = default;
  explicit StructureConstants(std::size_t N) : N_(N) {}

  std::size_t dim() const { return N_; }
  const std::vector<Entry>& entries() const { return entries_; }

  void set(std::size_t i, std::size_t j, std::size_t k, const Rational& c) {
    if (i >= N_ || j >= N_ || k >= N_) throw DimensionError("structure constant index out of range");
    if (i == j) throw DimensionError("diagonal structure constants are zero by antisymmetry");
    if (c == 0) return;
    if (i < j)
      entries_.push_back({i, j, k, c});
    else
      entries_.push_back({j, i, k, Rational(-c)});
  }

  Rational operator()(std::size_t i, std::size_t j, std::size_t k) const {
    Rational s = 0;
    for (const auto& e : entries_) {
      if (e.k != k) continue;
      if (e.i == i && e.j == j) s += e.c;
      if (e.i == j && e.j == i) s -= e.c;
    }
    return s;
  }

  bool is_abelian() const { return entries_.empty(); }

  /// Bracket of coordinate vectors over any commutative ring T.
  template <class T>
  std::vector<T> bracket(const std::vector<T>& a, const std::vector<T>& b, const T& zero) const {
    if (a.size() != N_ || b.size() != N_) throw DimensionError("bracket of vectors of wrong length");
    std::vector<T> out(N_, zero);
    for (const auto& e : entries_) {
      T w = a[e.i] * b[e.j] - a[e.j] * b[e.i];
      out[e.k] = out[e.k] + scale(e.c, w);
    }
    return out;
  }

 private:
  std::size_t N_ = 0;
  std::vector<Entry> entries_;
};

struct LieAlgebra {
  LieBasis basis;
  StructureConstants sc;
};

/// Breadth-first bracket closure by degree, with exact independence tests.
inline LieAlgebra generate_lie_algebra(const std::vector<PolyVectorField>& fields, const DilationFamily& delta) {
  if (fields.empty()) throw HypothesisError("at least one vector field is required");
  std::vector<int> nu = certify_system(fields, delta);
  LieAlgebra out;
  LieBasis& B = out.basis;
  FieldSpan span;
  int top = delta.max_exponent();
  for (int d = 1; d <= top; ++d) {
    for (std::size_t g = 0; g < fields.size(); ++g) {
      if (nu[g] != d) continue;
      if (!span.insert(field_vector(fields[g])))
        throw HypothesisError("input field " + std::to_string(g + 1) + " is linearly dependent on the others");
      B.generator_indices.push_back(B.W.size());
      B.W.push_back(fields[g].with_degree(d));
      B.degrees.push_back(d);
    }
    std::size_t existing = B.W.size();
    for (std::size_t g = 0; g < fields.size(); ++g) {
      int want = d - nu[g];
      if (want < 1) continue;
      for (std::size_t b = 0; b < existing; ++b) {
        if (B.degrees[b] != want) continue;
        PolyVectorField cand = commutator(fields[g], B.W[b]);
        if (cand.is_zero()) continue;
        auto deg = certify_homogeneity(cand, delta);
        if (!deg || *deg != d)
          throw ConstructionError("bracket failed homogeneity certification at degree " + std::to_string(d));
        if (span.insert(field_vector(cand))) {
          B.W.push_back(cand.with_degree(d));
          B.degrees.push_back(d);
        }
      }
    }
  }
  // Generators were recorded in degree order; map them back to input order.
  std::vector<std::size_t> gen(fields.size());
  {
    std::size_t pos = 0;
    std::vector<std::size_t> order;
    for (int d = 1; d <= top; ++d)
      for (std::size_t g = 0; g < fields.size(); ++g)
        if (nu[g] == d) order.push_back(g);
    for (std::size_t g : order) gen[g] = B.generator_indices[pos++];
    B.generator_indices = gen;
  }
  std::size_t N = B.W.size();
  out.sc = StructureConstants(N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      PolyVectorField br = commutator(B.W[i], B.W[j]);
      if (br.is_zero()) continue;
      auto coeffs = span.express(field_vector(br));
      if (!coeffs) throw ConstructionError("bracket closure incomplete: [W_i, W_j] outside the computed span");
      for (std::size_t k = 0; k < N; ++k)
        if ((*coeffs)[k] != 0) out.sc.set(i, j, k, (*coeffs)[k]);
    }
  return out;
}

/// Field sum_k a_k W_k.
inline PolyVectorField combine(const LieBasis& B, const std::vector<Rational>& a) {
  PolyVectorField out(B.nvars());
  for (std::size_t k = 0; k < B.size(); ++k)
    if (a[k] != 0) out += a[k] * B.W[k];
  return out;
}

inline std::size_t hormander_rank(const LieBasis& B, const std::vector<Rational>& point) {
  RationalMatrix M;
  for (const auto& W : B.W) M.push_back(W.evaluate_at(point));
  return M.empty() ? 0 : rank(M);
}

/// Smallest r such that all (r+1)-fold brackets vanish.
inline int nilpotency_step(const StructureConstants& sc, const std::vector<int>& degrees) {
  std::size_t N = sc.dim();
  if (degrees.size() != N) throw DimensionError("one degree per basis element required");
  if (N == 0) return 0;
  std::vector<std::vector<Rational>> layer;
  for (std::size_t k = 0; k < N; ++k) {
    std::vector<Rational> e(N, 0);
    e[k] = 1;
    layer.push_back(e);
  }
  int step = 0;
  while (!layer.empty()) {
    ++step;
    RationalSpan<std::size_t> next_span;
    std::vector<std::vector<Rational>> next;
    for (std::size_t i = 0; i < N; ++i) {
      std::vector<Rational> e(N, 0);
      e[i] = 1;
      for (const auto& v : layer) {
        auto br = sc.bracket(e, v, Rational(0));
        RationalSpan<std::size_t>::Vector sv;
        for (std::size_t k = 0; k < N; ++k)
          if (br[k] != 0) sv.emplace(k, br[k]);
        if (!sv.empty() && next_span.insert(sv)) next.push_back(br);
      }
    }
    layer = std::move(next);
    if (step > static_cast<int>(N) + 1) throw ConstructionError("algebra is not nilpotent");
  }
  return step;
}

}  // namespace rockland
