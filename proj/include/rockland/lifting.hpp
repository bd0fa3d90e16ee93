#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rockland/flows.hpp"
#include "rockland/graded_map.hpp"
#include "rockland/group.hpp"
#include "rockland/operators.hpp"

namespace rockland {

/// xi_j gets w_slot^power added, keeping it homogeneous of degree tau_j.
struct Shear {
  std::size_t slot = 0;
  unsigned power = 1;
};

/// Homogeneous group (R^N, *, D_lambda) in coordinates (x, xi) with the lifted fields.
struct LiftedSystem {
  std::size_t n = 0, N = 0, p = 0;
  DilationFamily base_dilation;  ///< sigma on R^n
  std::vector<int> tau;          ///< exponents of the xi coordinates
  DilationFamily D;              ///< (sigma, tau) on R^N
  std::vector<int> nu;           ///< degrees of the generators
  LieAlgebra algebra;
  int step = 0;
  ExponentialGroup exp_group;         ///< group law in exponential coordinates w
  std::vector<Polynomial> F;          ///< evaluation map w -> x = exp(sum w_k W_k)(0)
  std::vector<Polynomial> theta;      ///< w -> (x, xi)
  std::vector<Polynomial> theta_inv;  ///< (x, xi) -> w
  std::vector<std::size_t> complement;                ///< basis slots used as xi coordinates
  std::vector<std::optional<Shear>> shear;            ///< generator term added to a xi coordinate, if any
  GroupLaw group;                                     ///< law in (x, xi) coordinates
  std::vector<PolyVectorField> lifted_fields;         ///< one per generator, on R^N
  int q = 0, E = 0, Q = 0;

  /// The residual R_i = lifted_i - X_i, which differentiates only in xi.
  PolyVectorField residual(std::size_t i, const std::vector<PolyVectorField>& base_fields) const {
    return lifted_fields.at(i) - embed_field(base_fields.at(i), N);
  }
};

namespace detail {

inline std::vector<Polynomial> theta_from(const std::vector<Polynomial>& F, std::size_t N,
                                          const std::vector<std::size_t>& comp,
                                          const std::vector<std::optional<Shear>>& shear) {
  std::vector<Polynomial> th = F;
  for (std::size_t j = 0; j < comp.size(); ++j) {
    Polynomial xi = Polynomial::variable(N, comp[j]);
    if (shear[j]) xi += Polynomial::variable(N, shear[j]->slot).pow(shear[j]->power);
    th.push_back(std::move(xi));
  }
  return th;
}

/// Linear part of theta restricted to one degree block is invertible.
inline bool block_invertible(const std::vector<Polynomial>& th, const std::vector<int>& row_weights,
                             const std::vector<int>& degrees, int e) {
  std::size_t N = degrees.size();
  std::vector<std::size_t> rows, cols;
  for (std::size_t r = 0; r < th.size(); ++r)
    if (row_weights[r] == e) rows.push_back(r);
  for (std::size_t c = 0; c < N; ++c)
    if (degrees[c] == e) cols.push_back(c);
  if (rows.size() != cols.size()) return false;
  RationalMatrix A(rows.size(), std::vector<Rational>(cols.size(), 0));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) A[r][c] = th[rows[r]].coefficient(Monomial::unit(N, cols[c]));
  return rank(A) == rows.size();
}

}  // namespace detail

/// Builds the lifting from a Lie algebra of homogeneous fields on R^n.
inline LiftedSystem build_lifting(const LieAlgebra& alg, const DilationFamily& delta) {
  const LieBasis& B = alg.basis;
  LiftedSystem L;
  L.n = delta.dim();
  L.N = B.size();
  L.algebra = alg;
  L.base_dilation = delta;
  std::size_t n = L.n, N = L.N;
  if (B.nvars() != n) throw DimensionError("Lie basis and dilations live in different dimensions");
  if (hormander_rank(B, std::vector<Rational>(n, 0)) != n)
    throw HypothesisError("Hormander's condition fails at the origin; no lifting exists");
  if (N <= n)
    throw HypothesisError("p = N - n = 0: the fields are already left invariant on a group, nothing to lift");
  L.p = N - n;
  for (std::size_t g : B.generator_indices) L.nu.push_back(B.degrees[g]);
  L.step = nilpotency_step(alg.sc, B.degrees);
  L.exp_group = build_group(B, alg.sc, L.step);

  // Evaluation map F(w) = exp(sum w_k W_k)(0).
  {
    std::vector<Polynomial> coeffs(n, Polynomial(n + N));
    for (std::size_t k = 0; k < N; ++k) {
      Polynomial wk = Polynomial::variable(n + N, n + k);
      for (std::size_t i = 0; i < n; ++i)
        if (!B.W[k][i].is_zero()) coeffs[i] += wk * embed(B.W[k][i], n + N);
    }
    auto flow = lie_series_flow(coeffs, delta.exponents());
    std::vector<Polynomial> subs(n, Polynomial(N));
    for (std::size_t k = 0; k < N; ++k) subs.push_back(Polynomial::variable(N, k));
    L.F = compose(flow, subs);
  }

  // Complementary coordinates: per degree block, the first subset making the block invertible.
  std::vector<int> row_weights = delta.exponents();
  std::map<int, std::vector<std::size_t>> by_degree;
  for (std::size_t k = 0; k < N; ++k) by_degree[B.degrees[k]].push_back(k);
  for (std::size_t i = 0; i < n; ++i)
    if (!by_degree.count(delta[i]))
      throw ConstructionError("no basis element of degree " + std::to_string(delta[i]) +
                              " matches coordinate x" + std::to_string(i + 1));
  std::vector<std::size_t> comp;
  for (const auto& [e, slots] : by_degree) {
    std::size_t rows = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (delta[i] == e) ++rows;
    if (rows > slots.size())
      throw ConstructionError("degree " + std::to_string(e) + " has more coordinates than basis elements");
    std::size_t need = slots.size() - rows;
    std::vector<std::size_t> pick(need);
    for (std::size_t t = 0; t < need; ++t) pick[t] = t;
    bool found = false;
    while (true) {
      std::vector<std::size_t> c;
      for (std::size_t t : pick) c.push_back(slots[t]);
      std::vector<std::optional<Shear>> none(c.size());
      auto th = detail::theta_from(L.F, N, c, none);
      std::vector<int> rw = row_weights;
      for (std::size_t s : c) rw.push_back(B.degrees[s]);
      if (detail::block_invertible(th, rw, B.degrees, e)) {
        comp.insert(comp.end(), c.begin(), c.end());
        found = true;
        break;
      }
      // next combination in lexicographic order
      std::size_t t = need;
      while (t > 0 && pick[t - 1] == slots.size() - need + t - 1) --t;
      if (t == 0) break;
      ++pick[t - 1];
      for (std::size_t u = t; u < need; ++u) pick[u] = pick[u - 1] + 1;
    }
    if (!found)
      throw ConstructionError("no choice of complementary coordinates of degree " + std::to_string(e) +
                              " gives an invertible coordinate change (search exhausted)");
  }
  L.complement = comp;
  L.shear.assign(comp.size(), std::nullopt);
  for (std::size_t s : comp) L.tau.push_back(B.degrees[s]);
  std::vector<int> D = delta.exponents();
  D.insert(D.end(), L.tau.begin(), L.tau.end());
  L.D = DilationFamily(D);

  auto finish = [&]() {
    L.theta = detail::theta_from(L.F, N, L.complement, L.shear);
    std::vector<std::size_t> unk;
    for (std::size_t k = 0; k < N; ++k) unk.push_back(k);
    L.theta_inv = invert_graded_map(L.theta, unk, B.degrees, L.D.exponents());
    L.lifted_fields.clear();
    for (std::size_t g = 0; g < B.generator_indices.size(); ++g) {
      const auto& Z = L.exp_group.left_invariant[B.generator_indices[g]];
      std::vector<Polynomial> c;
      for (std::size_t r = 0; r < N; ++r) c.push_back(compose(Z.apply(L.theta[r]), L.theta_inv));
      L.lifted_fields.emplace_back(std::move(c), L.nu[g]);
    }
  };
  finish();

  // A generator whose residual vanishes gets w_g^r added to a xi coordinate of degree r * nu_g.
  for (std::size_t g = 0; g < L.lifted_fields.size(); ++g) {
    auto zero_residual = [&]() {
      for (std::size_t j = 0; j < L.p; ++j)
        if (!L.lifted_fields[g][n + j].is_zero()) return false;
      return true;
    };
    if (!zero_residual()) continue;
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < L.p; ++j)
      if (!L.shear[j] && L.tau[j] % L.nu[g] == 0) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return L.tau[a] < L.tau[b]; });
    bool fixed = false;
    for (std::size_t j : order) {
      L.shear[j] = Shear{B.generator_indices[g], static_cast<unsigned>(L.tau[j] / L.nu[g])};
      auto th = detail::theta_from(L.F, N, L.complement, L.shear);
      if (detail::block_invertible(th, L.D.exponents(), B.degrees, L.tau[j])) {
        finish();
        if (!zero_residual()) {
          fixed = true;
          break;
        }
      }
      L.shear[j].reset();
      finish();
    }
    if (!fixed)
      throw ConstructionError("lifted field " + std::to_string(g + 1) +
                              " has zero residual for every admissible complementary coordinate choice");
  }

  // Exactness checks of the coordinate change and of the lift.
  {
    auto id = identity_map(N);
    if (compose(L.theta, L.theta_inv) != id || compose(L.theta_inv, L.theta) != id)
      throw ConstructionError("coordinate change and its inverse do not compose to the identity");
    std::vector<std::vector<Polynomial>> J = jacobian(L.theta);
    Polynomial det = laplace_determinant(J, Polynomial(N), Polynomial::constant(N, 1));
    if (!det.is_constant() || det.is_zero())
      throw ConstructionError("coordinate change has non-constant Jacobian determinant");
  }
  for (std::size_t g = 0; g < L.lifted_fields.size(); ++g) {
    const auto& X = B.W[B.generator_indices[g]];
    for (std::size_t i = 0; i < n; ++i)
      if (L.lifted_fields[g][i] != embed(X[i], N))
        throw ConstructionError("lift residual of field " + std::to_string(g + 1) + " acts in the x variables");
  }

  // Group law transported to (x, xi).
  {
    std::vector<Polynomial> u, v;
    for (std::size_t k = 0; k < N; ++k) {
      u.push_back(Polynomial::variable(2 * N, k));
      v.push_back(Polynomial::variable(2 * N, N + k));
    }
    auto wu = compose(L.theta_inv, u), wv = compose(L.theta_inv, v);
    L.group.N = N;
    L.group.weights = L.D.exponents();
    L.group.mult = compose(L.theta, L.exp_group.law.multiply(wu, wv));
    L.group.inverse = compose(L.theta, L.exp_group.law.invert(L.theta_inv));
  }
  L.q = delta.homogeneous_dimension();
  L.E = 0;
  for (int t : L.tau) L.E += t;
  L.Q = L.q + L.E;
  return L;
}

inline LiftedSystem build_lifting(const std::vector<PolyVectorField>& fields, const DilationFamily& delta) {
  return build_lifting(generate_lie_algebra(fields, delta), delta);
}

/// Embeds a canonical-form operator on R^n into R^N acting on the first n coordinates.
inline DiffOperator embed_operator(const DiffOperator& D, std::size_t N) {
  DiffOperator out(N);
  for (const auto& [al, a] : D.terms()) {
    std::vector<unsigned> e(N, 0);
    for (std::size_t i = 0; i < al.nvars(); ++i) e[i] = al[i];
    out.add(Monomial(e), embed(a, N));
  }
  return out;
}

inline OperatorSpec lift_operator(const OperatorSpec& L, const LiftedSystem& lifted) {
  return L.with_fields(lifted.lifted_fields);
}

/// Checks lifted(u o pi_n) == (L u) o pi_n exactly.
inline bool lift_identity_check(const OperatorSpec& L, const LiftedSystem& lifted, const Polynomial& u) {
  if (u.nvars() != lifted.n) throw DimensionError("test polynomial must live on R^n");
  Polynomial lhs = expand(lift_operator(L, lifted)).apply(embed(u, lifted.N));
  Polynomial rhs = embed(expand(L).apply(u), lifted.N);
  return lhs == rhs;
}

/// Exact structural checks of a lifting; each entry is (name, passed).
struct LiftChecks {
  GroupAxioms axioms;
  bool fields_homogeneous = false;
  bool residuals_xi_only = false;
  bool residuals_nonzero = false;
  bool full_rank = false;
  std::vector<std::pair<std::string, bool>> list() const {
    return {{"group_associativity", axioms.associative},
            {"group_identity", axioms.identity},
            {"group_inverse", axioms.inverse},
            {"dilations_are_automorphisms", axioms.dilation_automorphism},
            {"left_translation_jacobian_one", axioms.unimodular_translation},
            {"lifted_fields_homogeneous", fields_homogeneous},
            {"residuals_act_in_xi_only", residuals_xi_only},
            {"residuals_nonzero", residuals_nonzero},
            {"lifted_algebra_full_rank", full_rank}};
  }
};

inline LiftChecks lifting_checks(const LiftedSystem& L) {
  LiftChecks c;
  c.axioms = check_group_axioms(L.group);
  const auto& B = L.algebra.basis;
  bool hom = true, xi_only = true, nonzero = true;
  for (std::size_t g = 0; g < L.lifted_fields.size(); ++g) {
    hom = hom && certify_homogeneity(L.lifted_fields[g], L.D) == std::optional<int>(L.nu[g]);
    const auto& X = B.W[B.generator_indices[g]];
    PolyVectorField res = L.lifted_fields[g] - embed_field(X, L.N);
    for (std::size_t i = 0; i < L.n; ++i) xi_only = xi_only && res[i].is_zero();
    nonzero = nonzero && !res.is_zero();
  }
  c.fields_homogeneous = hom;
  c.residuals_xi_only = xi_only;
  c.residuals_nonzero = nonzero;
  // Bracket closure of the lifted fields has dimension N and full rank at the origin and sampled points.
  auto lifted_alg = generate_lie_algebra(L.lifted_fields, L.D);
  bool rk = lifted_alg.basis.size() == L.N;
  std::vector<std::vector<Rational>> pts{std::vector<Rational>(L.N, 0)};
  for (int s = 1; s <= 3; ++s) {
    std::vector<Rational> pt;
    for (std::size_t k = 0; k < L.N; ++k) pt.push_back(Rational(static_cast<long>((k + 1) * s * 7 % 11) - 5, 3));
    pts.push_back(pt);
  }
  for (const auto& pt : pts) rk = rk && hormander_rank(lifted_alg.basis, pt) == L.N;
  c.full_rank = rk;
  return c;
}

/// Slice maps Psi_{x,y}(xi) = pi_p((y,0)^-1 * (x,xi)) and Phi_{x,y}(xi) = pi_p((y,0) * (y,xi)^-1 * (x,0)),
/// symbolic in (x, y, xi) (2n + p variables).
struct SliceMaps {
  std::vector<Polynomial> psi, phi, psi_inverse;
  Polynomial det_psi, det_phi;
  bool phi_identity = false;  ///< (y,0)^-1 * (x, Phi(z)) == (y,z)^-1 * (x,0)
  std::vector<Polynomial> chart;  ///< S(x,y,z) = (y,0)^-1 * (x, Psi^-1(z)), whose xi-part is z
};

inline SliceMaps slice_diffeos(const LiftedSystem& L) {
  std::size_t n = L.n, p = L.p, M = 2 * n + p;
  auto var = [&](std::size_t i) { return Polynomial::variable(M, i); };
  std::vector<Polynomial> y0, x_xi, x0, y_xi;
  for (std::size_t i = 0; i < n; ++i) {
    y0.push_back(var(n + i));
    x_xi.push_back(var(i));
    x0.push_back(var(i));
    y_xi.push_back(var(n + i));
  }
  for (std::size_t j = 0; j < p; ++j) {
    y0.push_back(Polynomial(M));
    x_xi.push_back(var(2 * n + j));
    x0.push_back(Polynomial(M));
    y_xi.push_back(var(2 * n + j));
  }
  SliceMaps S;
  auto y0_inv = L.group.invert(y0);
  auto full_psi = L.group.multiply(y0_inv, x_xi);
  auto full_phi = L.group.multiply(L.group.multiply(y0, L.group.invert(y_xi)), x0);
  S.psi.assign(full_psi.begin() + static_cast<long>(n), full_psi.end());
  S.phi.assign(full_phi.begin() + static_cast<long>(n), full_phi.end());
  auto det_of = [&](const std::vector<Polynomial>& m) {
    std::vector<std::vector<Polynomial>> J(p, std::vector<Polynomial>(p));
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) J[a][b] = m[a].diff(2 * n + b);
    return laplace_determinant(J, Polynomial(M), Polynomial::constant(M, 1));
  };
  S.det_psi = det_of(S.psi);
  S.det_phi = det_of(S.phi);
  {
    std::vector<Polynomial> x_phi = x0;
    for (std::size_t j = 0; j < p; ++j) x_phi[n + j] = S.phi[j];
    S.phi_identity = L.group.multiply(y0_inv, x_phi) == L.group.multiply(L.group.invert(y_xi), x0);
  }
  {
    std::vector<int> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(L.D[i]);
    for (std::size_t i = 0; i < n; ++i) w.push_back(L.D[i]);
    for (std::size_t j = 0; j < p; ++j) w.push_back(L.tau[j]);
    std::vector<std::size_t> unk;
    for (std::size_t j = 0; j < p; ++j) unk.push_back(2 * n + j);
    S.psi_inverse = invert_graded_map(S.psi, unk, w, L.tau);
    std::vector<Polynomial> x_pinv = x0;
    for (std::size_t j = 0; j < p; ++j) x_pinv[n + j] = S.psi_inverse[j];
    S.chart = L.group.multiply(y0_inv, x_pinv);
  }
  return S;
}

/// Evaluates a slice-map polynomial at concrete x, y, keeping xi symbolic (p variables).
inline std::vector<Polynomial> specialize_slice(const std::vector<Polynomial>& m, const std::vector<Rational>& x,
                                                const std::vector<Rational>& y) {
  std::size_t n = x.size();
  std::size_t p = m.empty() ? 0 : m.front().nvars() - 2 * n;
  std::vector<Polynomial> subs;
  for (const auto& v : x) subs.push_back(Polynomial::constant(p, v));
  for (const auto& v : y) subs.push_back(Polynomial::constant(p, v));
  for (std::size_t j = 0; j < p; ++j) subs.push_back(Polynomial::variable(p, j));
  return compose(m, subs);
}

/// One row of the expansion of R* = (lifted L)* - L*.
struct SaturableTerm {
  std::vector<unsigned> alpha;  ///< x-derivative orders
  std::vector<unsigned> beta;   ///< xi-derivative orders
  std::string coefficient;
  long xi_degree = 0;           ///< max E-weighted xi-degree of the coefficient
  long bound = 0;               ///< H_E(beta) - 1
  bool differentiates_in_xi = false;
  bool within_bound = false;
};

struct SaturableReport {
  std::vector<SaturableTerm> terms;
  bool s1 = false;            ///< every summand differentiates in xi
  bool degree_bound = false;  ///< every coefficient respects the xi-degree bound
  bool passed() const { return s1 && degree_bound; }
};

inline SaturableReport saturable_check(const OperatorSpec& Lop, const LiftedSystem& L) {
  DiffOperator lifted_t = expand(operator_transpose(lift_operator(Lop, L)));
  DiffOperator base_t = embed_operator(expand(operator_transpose(Lop)), L.N);
  DiffOperator R = lifted_t - base_t;
  SaturableReport rep;
  rep.s1 = true;
  rep.degree_bound = true;
  for (const auto& [al, a] : R.terms()) {
    SaturableTerm t;
    for (std::size_t i = 0; i < L.n; ++i) t.alpha.push_back(al[i]);
    long hb = 0;
    bool any = false;
    for (std::size_t j = 0; j < L.p; ++j) {
      t.beta.push_back(al[L.n + j]);
      hb += static_cast<long>(al[L.n + j]) * L.tau[j];
      any = any || al[L.n + j] > 0;
    }
    t.differentiates_in_xi = any;
    t.bound = hb - 1;
    long xd = 0;
    for (const auto& [m, c] : a.terms()) {
      long d = 0;
      for (std::size_t j = 0; j < L.p; ++j) d += static_cast<long>(m[L.n + j]) * L.tau[j];
      xd = std::max(xd, d);
    }
    t.xi_degree = xd;
    t.within_bound = xd <= t.bound;
    t.coefficient = a.to_string();
    rep.s1 = rep.s1 && t.differentiates_in_xi;
    rep.degree_bound = rep.degree_bound && t.within_bound;
    rep.terms.push_back(std::move(t));
  }
  return rep;
}

/// rho(v) = sum_i |v_i|^(1/eps_i).
struct HomNorm {
  std::vector<int> exponents;
  double operator()(std::span<const double> v) const {
    if (v.size() != exponents.size()) throw DimensionError("norm evaluated at point of wrong dimension");
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += exponents[i] == 1 ? std::abs(v[i]) : std::pow(std::abs(v[i]), 1.0 / exponents[i]);
    return s;
  }
};

inline double hom_norm_eval(const HomNorm& norm, std::span<const double> v) { return norm(v); }

/// rho(x^-1 * y) on a group.
inline double quasidistance(const CompiledGroup& g, const HomNorm& norm, std::span<const double> x,
                            std::span<const double> y) {
  auto xi = g.invert(x);
  return norm(g.multiply(xi, y));
}

}  // namespace rockland
