#pragma once

#include <vector>

#include "rockland/fields.hpp"

namespace rockland {

/// sum_i coeffs[i] * d u / d z_i, differentiating only the first coeffs.size() variables.
inline Polynomial apply_partial(const std::vector<Polynomial>& coeffs, const Polynomial& u) {
  Polynomial out(u.nvars());
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (!coeffs[i].is_zero()) out += coeffs[i] * u.diff(i);
  return out;
}

/// Time-one flow of Y = sum_i coeffs[i] d/dz_i (i < n) as polynomials z_j o exp(Y), by the
/// terminating Lie series sum_k Y^k(z_j)/k!. Coefficients may depend on extra parameter
/// variables beyond the first n. `sigma` bounds the number of nonzero series terms.
inline std::vector<Polynomial> lie_series_flow(const std::vector<Polynomial>& coeffs, const std::vector<int>& sigma) {
  std::size_t n = coeffs.size();
  if (sigma.size() != n) throw DimensionError("one weight per flowed coordinate required");
  std::size_t M = n == 0 ? 0 : coeffs.front().nvars();
  std::vector<Polynomial> out;
  for (std::size_t j = 0; j < n; ++j) {
    Polynomial term = Polynomial::variable(M, j);
    Polynomial acc = term;
    int k = 0;
    while (true) {
      term = apply_partial(coeffs, term);
      ++k;
      if (term.is_zero()) break;
      if (k > sigma[j])
        throw ConstructionError("Lie series does not terminate; the field is not graded of positive degree");
      acc += Rational(1) / factorial(static_cast<unsigned>(k)) * term;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

/// Exact flow of a field from a rational start point for a rational time.
inline std::vector<Rational> exp_flow(const PolyVectorField& X, const std::vector<Rational>& start,
                                      const Rational& time, const DilationFamily& delta) {
  if (start.size() != X.nvars() || delta.dim() != X.nvars()) throw DimensionError("flow start point has wrong dimension");
  std::vector<Polynomial> c;
  for (const auto& p : X.coeffs()) c.push_back(time * p);
  auto flow = lie_series_flow(c, delta.exponents());
  std::vector<Rational> out;
  for (const auto& f : flow) out.push_back(poly_eval(f, start));
  return out;
}

}  // namespace rockland
