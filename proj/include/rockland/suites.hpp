#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rockland/estimates.hpp"
#include "rockland/fundsol.hpp"
#include "rockland/kernel.hpp"
#include "rockland/lifting.hpp"
#include "rockland/metric.hpp"
#include "rockland/report.hpp"

namespace rockland {

using PointPair = std::pair<std::vector<double>, std::vector<double>>;

/// Dimensional data of a system that do not need a lifting.
struct SystemFacts {
  std::size_t n = 0;
  std::vector<int> sigma;
  std::vector<int> degrees;
  int q = 0;
  std::size_t N = 0;  ///< dimension of the generated Lie algebra
  std::size_t p = 0;
  int step = 0;
  std::size_t rank_at_origin = 0;
};

inline SystemFacts system_facts(const std::vector<PolyVectorField>& fields, const DilationFamily& delta) {
  SystemFacts f;
  f.n = delta.dim();
  f.sigma = delta.exponents();
  f.degrees = certify_system(fields, delta);
  f.q = delta.homogeneous_dimension();
  auto A = generate_lie_algebra(fields, delta);
  f.N = A.basis.size();
  f.p = f.N >= f.n ? f.N - f.n : 0;
  f.step = nilpotency_step(A.sc, A.basis.degrees);
  f.rank_at_origin = hormander_rank(A.basis, std::vector<Rational>(f.n, 0));
  return f;
}

/// Points in [-a, a]^n, pairs at Euclidean distance at least `gap`.
inline std::vector<PointPair> random_pairs(std::size_t n, std::size_t count, double a, double gap, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-a, a);
  std::vector<PointPair> out;
  while (out.size() < count) {
    std::vector<double> x(n), y(n);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
      d2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    if (std::sqrt(d2) >= gap) out.emplace_back(x, y);
  }
  return out;
}

inline Polynomial random_polynomial(std::mt19937_64& rng, std::size_t n, unsigned max_deg, int terms = 5) {
  std::uniform_int_distribution<int> c(-4, 4);
  std::uniform_int_distribution<unsigned> e(0, max_deg);
  Polynomial p(n);
  for (int t = 0; t < terms; ++t) {
    std::vector<unsigned> ex(n);
    for (auto& v : ex) v = e(rng);
    p.add_term(Monomial(ex), c(rng));
  }
  return p;
}

inline bool is_unit_constant(const Polynomial& p) {
  if (p.is_zero() || p.total_degree() != 0) return false;
  Rational c = p.terms().begin()->second;
  return c == 1 || c == -1;
}

/// Exact structural checks of a lifting, the lift identity on random polynomials and the
/// saturability conditions for each operator.
inline std::vector<CheckResult> lifting_suite(const LiftedSystem& L, const std::vector<OperatorSpec>& ops,
                                              std::uint64_t seed = 5, int random_polys = 20) {
  std::vector<CheckResult> out;
  for (const auto& [name, ok] : lifting_checks(L).list()) out.push_back(CheckResult::exact(name, ok));
  auto S = slice_diffeos(L);
  out.push_back(CheckResult::exact("slice_jacobians_unit", is_unit_constant(S.det_psi) && is_unit_constant(S.det_phi),
                                   "det J_psi = " + S.det_psi.to_string() + ", det J_phi = " + S.det_phi.to_string()));
  out.push_back(CheckResult::exact("slice_phi_identity", S.phi_identity));
  for (const auto& op : ops) {
    std::mt19937_64 rng(seed);
    int bad = 0;
    for (int t = 0; t < random_polys; ++t)
      if (!lift_identity_check(op, L, random_polynomial(rng, L.n, 3))) ++bad;
    CheckResult c = CheckResult::exact("lift_identity_random_polynomials", bad == 0,
                                       std::to_string(random_polys - bad) + "/" + std::to_string(random_polys));
    c.seed = seed;
    out.push_back(c);
    auto sat = saturable_check(op, L);
    out.push_back(CheckResult::exact("saturable_xi_derivatives", sat.s1, std::to_string(sat.terms.size()) + " summands"));
    out.push_back(CheckResult::exact("saturable_xi_degree_bound", sat.degree_bound));
  }
  return out;
}

/// Image of x under the time-t flow of the f-th field.
inline std::vector<double> field_flow(const ControlSystem& sys, std::size_t f, std::span<const double> x, double t) {
  std::vector<double> a(sys.m(), 0.0), out(sys.n());
  a[f] = t;
  sys.flow(x.data(), a.data(), out.data(), nullptr);
  return out;
}

struct FundsolTolerances {
  double calibration = 1e-3;
  double homogeneity = 1e-6;
  double symmetry = 1e-5;
  double left_inverse = 5e-3;
  double derivative_fd = 1e-4;
  double derivative_scaling = 1e-5;
};

struct FundsolSuiteConfig {
  FundsolTolerances tol;
  std::size_t pairs = 10;
  std::uint64_t seed = 17;
  bool left_inverse = true;
};

/// Identities satisfied by the fundamental solution: calibration, joint homogeneity, symmetry via the
/// transposed kernel, tail-truncation stability, left inverse, derivative formulas.
inline std::vector<CheckResult> fundsol_suite(const SaturationEvaluator& ev, const CalibrationResult& cal,
                                              const OperatorSpec& op, const FundsolSuiteConfig& cfg = {}) {
  std::vector<CheckResult> out;
  const auto& L = ev.lifted();
  const auto& delta = L.base_dilation;
  std::size_t n = L.n;
  double cal_res = 0;
  for (double r : cal.residuals) cal_res = std::max(cal_res, r);
  out.push_back(CheckResult::numeric("kernel_calibration", cal_res, cfg.tol.calibration, std::nullopt,
                                     std::to_string(cal.residuals.size()) + " poles, constant " +
                                         std::to_string(cal.constant)));

  auto pairs = random_pairs(n, cfg.pairs, 2.0, 0.3, cfg.seed);
  out.push_back(CheckResult::numeric("gamma_joint_homogeneity", verify_homogeneity(ev, pairs, {0.5, 2.0, 4.0}),
                                     cfg.tol.homogeneity, cfg.seed, "lambda in {1/2, 2, 4}"));

  auto kstar = transposed_kernel(cal.kernel, L.group);
  SaturationEvaluator ev_star(L, kstar, ev.nu(), ev.config());
  double sym = 0, sym_star = 0;
  for (const auto& [x, y] : random_pairs(n, cfg.pairs, 2.0, 0.3, cfg.seed + 1)) {
    double g = ev.gamma(x, y).value, gt = ev.gamma(y, x).value;
    sym = std::max(sym, std::abs(gt - g) / std::abs(g));
    sym_star = std::max(sym_star, std::abs(ev_star.gamma(x, y).value - gt) / std::abs(g));
  }
  out.push_back(CheckResult::numeric("gamma_symmetry", sym, cfg.tol.symmetry, cfg.seed + 1));
  out.push_back(CheckResult::numeric("gamma_transposed_kernel", sym_star, cfg.tol.symmetry, cfg.seed + 1));

  double tail_excess = 0;
  for (const auto& [x, y] : random_pairs(n, 20, 2.0, 0.3, cfg.seed + 2)) {
    auto a = ev.gamma(x, y);
    auto b = ev.gamma(x, y, a.shells + 1);
    tail_excess = std::max(tail_excess, std::abs(a.value - b.value) / (a.error() + b.error()));
  }
  out.push_back(CheckResult::numeric("tail_doubling_within_error", tail_excess, 1.0, cfg.seed + 2,
                                     "|change| / (error estimates), 20 pairs"));

  if (cfg.left_inverse) {
    std::vector<double> y(n, 0.0);
    y[0] = 1.0;
    auto li = verify_left_inverse(ev, op, Bump::standard(y), y, {1e-5, 1e-10, 200});
    out.push_back(CheckResult::numeric("left_inverse_bump", li.residual, cfg.tol.left_inverse, std::nullopt,
                                       "bump of radius 1 centred at the pole e1"));
  }

  ControlSystem sys(op.fields(), delta);
  const double h = 1e-3;
  double fd_err = 0, scale_err = 0;
  int expo = ev.nu() - L.q - 1;
  for (const auto& [x, y] : random_pairs(n, cfg.pairs, 2.0, 0.3, cfg.seed + 3)) {
    for (std::size_t f = 0; f < op.fields().size(); ++f) {
      if (ev.lifted().nu[f] != 1) continue;
      double d = ev.x_derivative({f}, x, y).value;
      double fd = (ev.gamma(field_flow(sys, f, x, h), y).value - ev.gamma(field_flow(sys, f, x, -h), y).value) / (2 * h);
      fd_err = std::max(fd_err, std::abs(d - fd) / std::max(std::abs(d), 1e-3));
      if (f == 0) {
        double d2 = ev.x_derivative({f}, delta.apply(x, 2.0), delta.apply(y, 2.0)).value;
        scale_err = std::max(scale_err, std::abs(d2 / d / std::pow(2.0, expo) - 1.0));
      }
    }
  }
  out.push_back(CheckResult::numeric("derivative_vs_finite_difference", fd_err, cfg.tol.derivative_fd, cfg.seed + 3,
                                     "central differences along the field flows, h = 1e-3"));
  out.push_back(CheckResult::numeric("derivative_scaling", scale_err, cfg.tol.derivative_scaling, cfg.seed + 3,
                                     "exponent nu - q - 1 = " + std::to_string(expo)));
  return out;
}

}  // namespace rockland
