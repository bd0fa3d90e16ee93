#pragma once

#include <string>
#include <vector>

#include "rockland/fields.hpp"

namespace rockland {

/// A list of vector fields on R^n together with the dilations they are homogeneous for.
struct VectorSystem {
  std::vector<PolyVectorField> fields;
  DilationFamily dilation;
  std::vector<std::string> names;

  std::size_t nvars() const { return dilation.dim(); }
};

namespace systems {

inline Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }

/// X1 = d1, X2 = x1^k d2 on R^2 with dilations (1, k+h); degrees (1, h).
inline VectorSystem monomial_shear(unsigned k, unsigned h) {
  std::vector<Polynomial> x2(2, Polynomial(2));
  x2[1] = var(2, 0).pow(k);
  return {{PolyVectorField::coordinate(2, 0), PolyVectorField(x2)},
          DilationFamily::normalized({1, static_cast<int>(k + h)}),
          {"X1", "X2"}};
}

/// The Grushin plane: X1 = d1, X2 = x1 d2, dilations (1, 2).
inline VectorSystem grushin() { return monomial_shear(1, 1); }

/// X1 = d1, X2 = x1 d2 + x2 d3 + ... + x_{n-1} dn with dilations (1, 2, ..., n).
inline VectorSystem chain(std::size_t n) {
  std::vector<Polynomial> x2(n, Polynomial(n));
  for (std::size_t i = 1; i < n; ++i) x2[i] = var(n, i - 1);
  std::vector<int> sigma;
  for (std::size_t i = 1; i <= n; ++i) sigma.push_back(static_cast<int>(i));
  return {{PolyVectorField::coordinate(n, 0), PolyVectorField(x2)}, DilationFamily::normalized(sigma), {"X1", "X2"}};
}

/// X1 = d1, X2 = x1 d2 + x2^2 d3 on R^3 with dilations (1, 1+k, 2+3k); degrees (1, k).
inline VectorSystem quadratic_chain(unsigned k) {
  std::vector<Polynomial> x2(3, Polynomial(3));
  x2[1] = var(3, 0);
  x2[2] = var(3, 1).pow(2);
  int kk = static_cast<int>(k);
  return {{PolyVectorField::coordinate(3, 0), PolyVectorField(x2)},
          DilationFamily::normalized({1, 1 + kk, 2 + 3 * kk}),
          {"X1", "X2"}};
}

/// Kolmogorov-type pair X1 = d1 (degree 1), X0 = x1 d2 (degree 2) with dilations (1, 3).
inline VectorSystem kolmogorov() {
  std::vector<Polynomial> x0(2, Polynomial(2));
  x0[1] = var(2, 0);
  return {{PolyVectorField::coordinate(2, 0), PolyVectorField(x0)}, DilationFamily::normalized({1, 3}), {"X1", "X0"}};
}

}  // namespace systems
}  // namespace rockland
