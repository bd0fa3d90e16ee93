#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "rockland/jets.hpp"
#include "rockland/lifting.hpp"
#include "rockland/quadrature.hpp"
#include "rockland/testfun.hpp"

namespace rockland {

/// Fundamental solution of a lifted operator on R^N, homogeneous of degree nu - Q.
struct KernelSpec {
  std::function<double(std::span<const double>)> value;
  std::function<Jet(std::span<const double>, unsigned)> jet;  ///< Taylor jet of the kernel at a point
  unsigned max_jet_order = 4;
  int homogeneity_degree = 0;
  double calibration_constant = 1.0;
  std::size_t dim = 0;

  double operator()(std::span<const double> z) const { return calibration_constant * value(z); }
  Jet jet_at(std::span<const double> z, unsigned order) const {
    if (order > max_jet_order) throw DimensionError("kernel sensitivities are not available to this order");
    return jet(z, order) * calibration_constant;
  }
  KernelSpec scaled(double s) const {
    KernelSpec k = *this;
    k.calibration_constant *= s;
    return k;
  }
};

/// Homogeneous gauge P (degree 4) with P^alpha annihilated by the sublaplacian of the lifted group.
struct GaugeShape {
  Polynomial P_exp;   ///< in exponential coordinates
  Polynomial P;       ///< in (x, xi) coordinates
  Rational alpha;     ///< (2 - Q) / 4
  Rational kappa;     ///< P = |a_h|^4 + kappa * |a_c|^2
  bool certified = false;
};

/// True when L is exactly the sum of squares of all generators.
inline bool is_plain_sublaplacian(const OperatorSpec& L) {
  WordSum want;
  for (std::size_t j = 0; j < L.fields().size(); ++j) want += WordSum::word(MultiIndex(2, j));
  return L.terms() == want;
}

/// Gauge of an H-type (step two, one-dimensional center) lifted group; exact certificate included.
inline GaugeShape h_type_gauge(const LiftedSystem& L) {
  const auto& B = L.algebra.basis;
  std::size_t N = L.N, m = B.generator_indices.size();
  if (L.step != 2) throw ConstructionError("the gauge kernel family needs a step-two lifted group");
  for (int nu : L.nu)
    if (nu != 1) throw ConstructionError("the gauge kernel family needs generators of degree one");
  if (N != m + 1) throw ConstructionError("the gauge kernel family needs a one-dimensional center");
  std::size_t c = 0;
  while (c < N && B.degrees[c] != 2) ++c;
  Rational jsq = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Rational v = L.algebra.sc(B.generator_indices[i], B.generator_indices[j], c);
      jsq += v * v;
    }
  jsq = canonical(Rational(jsq / static_cast<long>(m)));
  if (jsq == 0) throw ConstructionError("generators commute; no gauge kernel");
  GaugeShape g;
  Polynomial h(N);
  for (std::size_t gi : B.generator_indices) h += Polynomial::variable(N, gi).pow(2);
  g.kappa = canonical(Rational(Rational(16) / jsq));
  g.P_exp = h.pow(2) + g.kappa * Polynomial::variable(N, c).pow(2);
  g.alpha = canonical(Rational(2 - L.Q, 4));
  // (alpha - 1) sum (Z_i P)^2 + P sum Z_i^2 P == 0 is L(P^alpha) == 0 away from the origin.
  Polynomial first(N), second(N);
  for (std::size_t gi : B.generator_indices) {
    const auto& Z = L.exp_group.left_invariant[gi];
    Polynomial zp = Z.apply(g.P_exp);
    first += zp * zp;
    second += Z.apply(zp);
  }
  g.certified = ((g.alpha - 1) * first + g.P_exp * second).is_zero();
  if (!g.certified) throw ConstructionError("gauge power is not annihilated by the sublaplacian; kernel shape wrong");
  g.P = compose(g.P_exp, L.theta_inv);
  return g;
}

/// Uncalibrated kernel P^alpha in (x, xi) coordinates.
inline KernelSpec gauge_kernel(const LiftedSystem& L, const GaugeShape& g) {
  auto P = std::make_shared<CompiledPoly>(g.P);
  auto Ppoly = std::make_shared<Polynomial>(g.P);
  double alpha = g.alpha.get_d();
  KernelSpec k;
  k.dim = L.N;
  k.homogeneity_degree = 2 - L.Q;
  k.value = [P, alpha](std::span<const double> z) { return std::pow((*P)(z), alpha); };
  k.jet = [Ppoly, alpha](std::span<const double> z, unsigned order) {
    auto vars = coordinate_jets(z, order);
    Jet one = Jet::constant(JetLayout::get(z.size(), order), 1.0);
    return pow(evaluate<Jet>(*Ppoly, vars, one), alpha);
  };
  return k;
}

/// Gamma*(z) = Gamma(z^-1).
inline KernelSpec transposed_kernel(const KernelSpec& k, const GroupLaw& group) {
  auto inv = std::make_shared<CompiledMap>(group.inverse);
  auto inv_poly = std::make_shared<std::vector<Polynomial>>(group.inverse);
  KernelSpec t = k;
  t.value = [k, inv](std::span<const double> z) { return k.value((*inv)(z)); };
  t.jet = [k, inv_poly](std::span<const double> z, unsigned order) {
    auto vars = coordinate_jets(z, order);
    auto w = evaluate_jets(*inv_poly, vars);
    // Chain rule through the polynomial inverse: expand the kernel at z^-1 and substitute.
    std::vector<double> zi;
    for (const auto& j : w) zi.push_back(j.value());
    Jet kj = k.jet(zi, order);
    // kj is a Taylor polynomial in (u - z^-1); compose with u = w(z).
    const auto& lay = kj.layout();
    Jet out = Jet::constant(JetLayout::get(z.size(), order), 0.0);
    std::vector<Jet> shifted;
    for (std::size_t i = 0; i < w.size(); ++i) shifted.push_back(w[i] + (-zi[i]));
    for (std::size_t t = 0; t < lay.size(); ++t) {
      double c = kj.coefficient(t);
      if (c == 0.0) continue;
      Jet mono = Jet::constant(JetLayout::get(z.size(), order), c);
      const auto& al = lay.multiindex(t);
      for (std::size_t i = 0; i < al.size(); ++i)
        for (unsigned e = 0; e < al[i]; ++e) mono = mono * shifted[i];
      out += mono;
    }
    return out;
  };
  return t;
}

/// Anisotropic polar coordinates z = D_r(theta), theta on the Euclidean unit sphere:
/// dz = r^(Q-1) (sum_i d_i theta_i^2) dr dsigma(theta).
struct PolarSphere {
  std::size_t dim;
  /// theta from hyperspherical angles (phi_1..phi_{dim-2} in [0, pi], last in [0, 2 pi]).
  std::vector<double> point(const std::vector<double>& ang) const {
    std::vector<double> th(dim);
    double s = 1.0;
    for (std::size_t k = 0; k + 1 < dim; ++k) {
      th[k] = s * std::cos(ang[k]);
      s *= std::sin(ang[k]);
    }
    th[dim - 1] = s;
    return th;
  }
  double surface_weight(const std::vector<double>& ang) const {
    double w = 1.0;
    for (std::size_t k = 0; k + 1 < dim; ++k) w *= std::pow(std::sin(ang[k]), static_cast<double>(dim - 2 - k));
    return w;
  }
  std::pair<double, double> range(std::size_t k) const {
    return {0.0, (k + 2 == dim || dim == 1) ? 2.0 * M_PI : M_PI};
  }
};

/// int_{R^N} Gamma(y^-1 * z) (L* phi)(z) dz, by translation and anisotropic polar coordinates about y.
inline QuadratureResult kernel_identity_integral(const KernelSpec& k, const LiftedSystem& L,
                                                 const OperatorSpec& lifted_op, const Bump& phi,
                                                 std::span<const double> y, const QuadratureConfig& cfg = {1e-5, 1e-10, 400}) {
  std::size_t N = L.N;
  if (N < 2) throw DimensionError("polar integration needs dimension at least two");
  CompiledDiffOperator Lt(expand(operator_transpose(lifted_op)));
  CompiledGroup G(L.group);
  HomNorm rho{L.D.exponents()};
  std::vector<int> d = L.D.exponents();
  int radial = L.Q - 1 + k.homogeneity_degree;
  // bound of rho(y^-1 z) over the support of phi, by a grid over its box with margin
  double M = 0;
  {
    auto box = phi.support_box();
    const int g = N <= 3 ? 24 : 8;
    std::vector<int> idx(N, 0);
    auto yi = G.invert(y);
    while (true) {
      std::vector<double> z(N);
      for (std::size_t i = 0; i < N; ++i)
        z[i] = box[i].first + (box[i].second - box[i].first) * idx[i] / static_cast<double>(g);
      M = std::max(M, rho(G.multiply(yi, z)));
      std::size_t i = 0;
      while (i < N && idx[i] == g) idx[i++] = 0;
      if (i == N) break;
      ++idx[i];
    }
    M *= 1.25;
  }
  PolarSphere S{N};
  auto f = [&](const std::vector<double>& v) {
    std::vector<double> ang(v.begin(), v.end() - 1);
    double r = v.back();
    if (r <= 0) return 0.0;
    auto th = S.point(ang);
    std::vector<double> u(N);
    for (std::size_t i = 0; i < N; ++i) u[i] = std::pow(r, d[i]) * th[i];
    auto z = G.multiply(y, u);
    double lphi = Lt.apply(z, phi.jet(z, Lt.order()));
    if (lphi == 0.0) return 0.0;
    double J = 0;
    for (std::size_t i = 0; i < N; ++i) J += d[i] * th[i] * th[i];
    return std::pow(r, radial) * k(th) * J * S.surface_weight(ang) * lphi;
  };
  auto bounds = [&](std::size_t level, const std::vector<double>& prefix) -> std::pair<double, double> {
    if (level + 1 < N) return S.range(level);
    auto th = S.point(prefix);
    return {0.0, M / rho(th)};
  };
  std::vector<QuadratureConfig> cfgs(N, cfg);
  return integrate_nested(f, N, bounds, cfgs);
}

struct CalibrationResult {
  KernelSpec kernel;
  double constant = 0;
  std::vector<std::vector<double>> poles;
  std::vector<double> residuals;  ///< |int Gamma(y^-1 z) L* phi_y(z) dz + phi_y(y)| per pole
  double tolerance = 1e-3;
  bool passed() const {
    for (double r : residuals)
      if (!(r <= tolerance)) return false;
    return true;
  }
};

/// Fixes the constant of a kernel shape by the left-inverse identity at the origin with a unit bump,
/// then measures the identity at the given poles (bumps centered at each pole).
inline CalibrationResult kernel_calibrate(const KernelSpec& shape, const LiftedSystem& L, const OperatorSpec& lifted_op,
                                          const std::vector<std::vector<double>>& poles, double tolerance = 1e-3) {
  std::vector<double> origin(L.N, 0.0);
  Bump phi0 = Bump::standard(origin);
  KernelSpec unit = shape;
  unit.calibration_constant = 1.0;
  auto I = kernel_identity_integral(unit, L, lifted_op, phi0, origin);
  if (!I.converged || I.value == 0.0 || !std::isfinite(I.value))
    throw ConvergenceError("calibration integral did not converge");
  CalibrationResult out;
  out.constant = -phi0(origin) / I.value;
  out.kernel = unit.scaled(out.constant);
  out.poles = poles;
  out.tolerance = tolerance;
  for (const auto& y : poles) {
    Bump phi = Bump::standard(y);
    auto r = kernel_identity_integral(out.kernel, L, lifted_op, phi, y, {1e-4, 1e-10, 400});
    out.residuals.push_back(std::abs(r.value + phi(y)));
  }
  if (!out.passed()) throw ConvergenceError("kernel identity residual above tolerance; kernel shape wrong for this operator");
  return out;
}

/// Gauge kernel for a plain sublaplacian lift, calibrated at the origin and checked at three poles.
inline CalibrationResult calibrated_sublaplacian_kernel(const LiftedSystem& L, const OperatorSpec& base_op) {
  if (!is_plain_sublaplacian(base_op))
    throw ConstructionError("no kernel available for this operator; only sums of squares of all fields are supported");
  auto shape = gauge_kernel(L, h_type_gauge(L));
  std::vector<std::vector<double>> poles;
  for (int t = 0; t < 3; ++t) {
    std::vector<double> y(L.N);
    for (std::size_t i = 0; i < L.N; ++i) y[i] = 0.4 * std::sin(1.3 * (t + 1) + 0.9 * static_cast<double>(i));
    poles.push_back(y);
  }
  return kernel_calibrate(shape, L, lift_operator(base_op, L), poles);
}

}  // namespace rockland
