#pragma once

#include <map>
#include <set>
#include <vector>

#include "rockland/linalg.hpp"
#include "rockland/polynomial.hpp"

namespace rockland {

/// Inverts u = f(z, s) for the unknowns z, where f is graded: with weights on all variables,
/// each f_j is homogeneous of weight out_weights[j], and the part of f linear in unknowns of
/// that same weight has constant coefficients. The result expresses z_j in the same variable
/// layout, with the slot of unknown j now holding u_j and parameters left in place.
inline std::vector<Polynomial> invert_graded_map(const std::vector<Polynomial>& f,
                                                 const std::vector<std::size_t>& unknowns,
                                                 const std::vector<int>& var_weights,
                                                 const std::vector<int>& out_weights) {
  std::size_t k = unknowns.size();
  if (f.size() != k || out_weights.size() != k) throw DimensionError("graded inversion needs a square system");
  std::size_t M = f.empty() ? 0 : f.front().nvars();
  if (var_weights.size() != M) throw DimensionError("one weight per variable required");
  for (std::size_t j = 0; j < k; ++j)
    if (!is_graded_homogeneous(f[j], var_weights, out_weights[j]))
      throw ConstructionError("graded inversion: component " + std::to_string(j + 1) + " is not homogeneous");

  std::set<int> levels;
  for (std::size_t i : unknowns) levels.insert(var_weights[i]);
  std::vector<Polynomial> solution(k, Polynomial(M));
  std::vector<Polynomial> subs;
  for (std::size_t v = 0; v < M; ++v) subs.push_back(Polynomial::variable(M, v));
  std::vector<bool> is_unknown(M, false);
  for (std::size_t i : unknowns) is_unknown[i] = true;
  std::vector<bool> solved(k, false);

  for (int e : levels) {
    std::vector<std::size_t> rows, cols;
    for (std::size_t j = 0; j < k; ++j)
      if (out_weights[j] == e) rows.push_back(j);
    for (std::size_t j = 0; j < k; ++j)
      if (var_weights[unknowns[j]] == e) cols.push_back(j);
    if (rows.size() != cols.size())
      throw ConstructionError("graded inversion: weight level " + std::to_string(e) + " is not square");
    RationalMatrix A(rows.size(), std::vector<Rational>(cols.size(), 0));
    std::vector<Polynomial> rest;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Polynomial rem = f[rows[r]];
      for (std::size_t c = 0; c < cols.size(); ++c) {
        Monomial lin = Monomial::unit(M, unknowns[cols[c]]);
        A[r][c] = rem.coefficient(lin);
        rem.add_term(lin, -A[r][c]);
      }
      for (const auto& [m, coef] : rem.terms())
        for (std::size_t c : cols)
          if (m[unknowns[c]] > 0)
            throw ConstructionError("graded inversion: nonlinear dependence on same-weight unknowns");
      // unknowns of this level are absent from rem; substitute lower levels
      std::vector<Polynomial> s = subs;
      for (std::size_t j = 0; j < k; ++j)
        if (!solved[j] && var_weights[unknowns[j]] != e) s[unknowns[j]] = Polynomial(M);
      rest.push_back(compose(rem, s));
    }
    auto Ainv = inverse(A);
    if (!Ainv) throw ConstructionError("graded inversion: singular block at weight " + std::to_string(e));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      Polynomial z(M);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const Rational& a = (*Ainv)[c][r];
        if (a == 0) continue;
        z += a * (Polynomial::variable(M, unknowns[rows[r]]) - rest[r]);
      }
      solution[cols[c]] = z;
    }
    for (std::size_t c : cols) {
      solved[c] = true;
      subs[unknowns[c]] = solution[c];
    }
  }
  return solution;
}

}  // namespace rockland
