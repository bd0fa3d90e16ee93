#pragma once

#include <string>
#include <vector>

#include "rockland/bch.hpp"
#include "rockland/compiled.hpp"
#include "rockland/linalg.hpp"

namespace rockland {

/// Polynomial group law on R^N with dilation weights making it a homogeneous group.
struct GroupLaw {
  std::size_t N = 0;
  std::vector<Polynomial> mult;     ///< N polynomials in 2N variables (a, b)
  std::vector<Polynomial> inverse;  ///< N polynomials in N variables
  std::vector<int> weights;         ///< dilation exponent of each coordinate

  /// mult composed with polynomial arguments a, b living in a common ambient space.
  std::vector<Polynomial> multiply(const std::vector<Polynomial>& a, const std::vector<Polynomial>& b) const {
    std::vector<Polynomial> subs = a;
    subs.insert(subs.end(), b.begin(), b.end());
    return compose(mult, subs);
  }
  std::vector<Polynomial> invert(const std::vector<Polynomial>& a) const { return compose(inverse, a); }

  std::vector<Rational> multiply(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    std::vector<Rational> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    std::vector<Rational> out;
    for (const auto& p : mult) out.push_back(poly_eval(p, ab));
    return out;
  }
  std::vector<Rational> invert(const std::vector<Rational>& a) const {
    std::vector<Rational> out;
    for (const auto& p : inverse) out.push_back(poly_eval(p, a));
    return out;
  }
};

/// Floating-point evaluation of a group law.
class CompiledGroup {
 public:
  CompiledGroup() = default;
  explicit CompiledGroup(const GroupLaw& g) : N_(g.N), mult_(g.mult), inverse_(g.inverse) {}
  std::size_t dim() const { return N_; }
  std::vector<double> multiply(std::span<const double> a, std::span<const double> b) const {
    std::vector<double> ab(a.begin(), a.end());
    ab.insert(ab.end(), b.begin(), b.end());
    return mult_(ab);
  }
  std::vector<double> invert(std::span<const double> a) const { return inverse_(a); }

 private:
  std::size_t N_ = 0;
  CompiledMap mult_, inverse_;
};

/// Group in exponential coordinates together with its left-invariant basis fields.
struct ExponentialGroup {
  GroupLaw law;
  std::vector<PolyVectorField> left_invariant;  ///< one per basis element, on R^N
};

/// Left-invariant fields Z_k(g) = d/ds mult(g, s e_k) at s = 0.
inline std::vector<PolyVectorField> left_invariant_fields(const GroupLaw& law) {
  std::size_t N = law.N;
  std::vector<Polynomial> zero_b;
  for (std::size_t i = 0; i < N; ++i) zero_b.push_back(Polynomial::variable(N, i));
  for (std::size_t i = 0; i < N; ++i) zero_b.push_back(Polynomial(N));
  std::vector<PolyVectorField> out;
  for (std::size_t k = 0; k < N; ++k) {
    std::vector<Polynomial> c;
    for (std::size_t i = 0; i < N; ++i) c.push_back(compose(law.mult[i].diff(N + k), zero_b));
    out.emplace_back(std::move(c), law.weights[k]);
  }
  return out;
}

inline ExponentialGroup build_group(const LieBasis& basis, const StructureConstants& sc, int step) {
  std::size_t N = basis.size();
  if (sc.dim() != N) throw DimensionError("structure constants and basis disagree");
  for (const auto& e : sc.entries())
    if (basis.degrees[e.k] != basis.degrees[e.i] + basis.degrees[e.j])
      throw ConstructionError("structure constants violate the grading");
  std::vector<Polynomial> a, b;
  for (std::size_t k = 0; k < N; ++k) {
    a.push_back(Polynomial::variable(2 * N, k));
    b.push_back(Polynomial::variable(2 * N, N + k));
  }
  ExponentialGroup g;
  g.law.N = N;
  g.law.weights = basis.degrees;
  g.law.mult = bch_product<Polynomial>(sc, step, a, b, Polynomial(2 * N));
  for (std::size_t k = 0; k < N; ++k) g.law.inverse.push_back(-Polynomial::variable(N, k));
  for (std::size_t k = 0; k < N; ++k)
    if (!is_graded_homogeneous(g.law.mult[k], [&] {
          std::vector<int> w = basis.degrees;
          w.insert(w.end(), basis.degrees.begin(), basis.degrees.end());
          return w;
        }(), basis.degrees[k]))
      throw ConstructionError("dilations fail to be automorphisms of the BCH law");
  g.left_invariant = left_invariant_fields(g.law);
  return g;
}

/// Exact structural facts about a group law.
struct GroupAxioms {
  bool associative = false;
  bool identity = false;
  bool inverse = false;
  bool dilation_automorphism = false;
  bool unimodular_translation = false;  ///< det of left-translation Jacobian is 1
  bool all() const { return associative && identity && inverse && dilation_automorphism && unimodular_translation; }
};

inline GroupAxioms check_group_axioms(const GroupLaw& g) {
  std::size_t N = g.N;
  GroupAxioms r;
  auto vars = [&](std::size_t total, std::size_t offset) {
    std::vector<Polynomial> v;
    for (std::size_t k = 0; k < N; ++k) v.push_back(Polynomial::variable(total, offset + k));
    return v;
  };
  auto zeros = [&](std::size_t total) { return std::vector<Polynomial>(N, Polynomial(total)); };
  {
    auto a = vars(3 * N, 0), b = vars(3 * N, N), c = vars(3 * N, 2 * N);
    r.associative = g.multiply(g.multiply(a, b), c) == g.multiply(a, g.multiply(b, c));
  }
  {
    auto a = vars(N, 0);
    r.identity = g.multiply(a, zeros(N)) == a && g.multiply(zeros(N), a) == a;
    r.inverse = g.multiply(a, g.invert(a)) == zeros(N) && g.multiply(g.invert(a), a) == zeros(N);
  }
  {
    std::vector<int> w2 = g.weights;
    w2.insert(w2.end(), g.weights.begin(), g.weights.end());
    bool ok = true;
    for (std::size_t k = 0; k < N; ++k) {
      ok = ok && is_graded_homogeneous(g.mult[k], w2, g.weights[k]);
      ok = ok && is_graded_homogeneous(g.inverse[k], g.weights, g.weights[k]);
    }
    r.dilation_automorphism = ok;
  }
  {
    // Jacobian of b -> a * b
    std::vector<std::vector<Polynomial>> J(N, std::vector<Polynomial>(N));
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) J[i][j] = g.mult[i].diff(N + j);
    Polynomial det = laplace_determinant(J, Polynomial(2 * N), Polynomial::constant(2 * N, 1));
    r.unimodular_translation = det == Polynomial::constant(2 * N, 1);
  }
  return r;
}

}  // namespace rockland
