#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rockland/kernel.hpp"

namespace rockland {

struct SaturationConfig {
  QuadratureConfig quad{1e-11, 1e-15, 400};
  double tail_rel = 1e-10;  ///< tail bound target relative to the value
  int max_shells = 120;     ///< largest dyadic truncation exponent J
  double sup_safety = 2.0;  ///< multiplier on the sampled sup of |kernel| on the unit sphere
  int sup_samples = 4000;
  std::uint64_t seed = 20240601;
};

/// Saturated value with its error budget; the box is prod [-R^tau_j, R^tau_j], R = 2^(J-1).
struct GammaValue {
  double value = 0;
  double quad_error = 0;
  double tail_bound = 0;
  int shells = 0;
  long evaluations = 0;
  bool converged = true;
  double error() const { return quad_error + tail_bound; }
};

/// Gamma(x, y) = int_{R^p} Gamma0((y,0)^-1 * (x, xi)) dxi and its X-derivatives.
/// The global fundamental solution is only constructed for operators of degree below q.
inline void require_global_existence(int nu, int q) {
  if (nu >= q)
    throw HypothesisError("the existence theorem for a global fundamental solution requires nu < q; here nu = " +
                          std::to_string(nu) + ", q = " + std::to_string(q));
}

class SaturationEvaluator {
 public:
  SaturationEvaluator(LiftedSystem lifted, KernelSpec kernel, int nu, SaturationConfig cfg = {})
      : L_(std::move(lifted)), k_(std::move(kernel)), nu_(nu), cfg_(cfg) {
    require_global_existence(nu_, L_.q);
    if (k_.dim != L_.N) throw DimensionError("kernel lives on a different group");
    if (k_.homogeneity_degree != nu_ - L_.Q) throw DimensionError("kernel homogeneity must be nu - Q");
    auto S = slice_diffeos(L_);
    std::size_t n = L_.n, M = 2 * n + L_.p;
    for (std::size_t j = 0; j < L_.p; ++j)
      if (S.chart[n + j] != Polynomial::variable(M, 2 * n + j))
        throw ConstructionError("slice chart does not fix the fiber coordinate");
    chart_ = CompiledMap(S.chart);
    chart_poly_ = S.chart;
    rho_ = HomNorm{L_.D.exponents()};
    double vol = std::pow(2.0, static_cast<double>(L_.p));
    for (int t : L_.tau) vol *= std::tgamma(1.0 + t);
    unit_ball_volume_ = vol / std::tgamma(1.0 + L_.E);
  }

  const LiftedSystem& lifted() const { return L_; }
  const KernelSpec& kernel() const { return k_; }
  int nu() const { return nu_; }
  const SaturationConfig& config() const { return cfg_; }
  double unit_ball_volume() const { return unit_ball_volume_; }

  /// Point of the group where the kernel is evaluated for fiber coordinate zeta.
  std::vector<double> chart(std::span<const double> x, std::span<const double> y, std::span<const double> zeta) const {
    std::vector<double> v(x.begin(), x.end());
    v.insert(v.end(), y.begin(), y.end());
    v.insert(v.end(), zeta.begin(), zeta.end());
    return chart_(v);
  }

  GammaValue gamma(std::span<const double> x, std::span<const double> y, std::optional<int> shells = {}) const {
    return saturate(x, y, {}, shells);
  }

  /// X_{i1} ... X_{is} applied in x to Gamma(x, y).
  GammaValue x_derivative(const MultiIndex& word, std::span<const double> x, std::span<const double> y,
                          std::optional<int> shells = {}) const {
    return saturate(x, y, word, shells);
  }

  /// Sampled sup of |X_I Gamma0| on the unit sphere of the gauge, times the safety factor.
  double sup_constant(const MultiIndex& word) const {
    auto it = sup_cache_.find(word);
    if (it != sup_cache_.end()) return it->second;
    Integrand g = integrand_for(word);
    std::mt19937_64 rng(cfg_.seed);
    std::normal_distribution<double> nd;
    auto d = L_.D.exponents();
    double best = 0;
    std::vector<double> th(L_.N), z(L_.N);
    for (int s = 0; s < cfg_.sup_samples; ++s) {
      for (auto& t : th) t = nd(rng);
      double r = rho_(th);
      for (std::size_t i = 0; i < L_.N; ++i) z[i] = th[i] / std::pow(r, d[i]);
      best = std::max(best, std::abs(g(z)));
    }
    double c = cfg_.sup_safety * best;
    sup_cache_[word] = c;
    return c;
  }

  /// Bound on the integral outside the box of radius 2^(J-1), for an integrand of homogeneity h.
  double tail_bound(const MultiIndex& word, int J) const {
    double beta = static_cast<double>(homogeneity(word) + L_.E);
    if (beta >= 0) throw HypothesisError("fiber integral diverges: homogeneity plus E must be negative");
    double kappa0 = unit_ball_volume_ * L_.E * (std::pow(2.0, -beta) - 1.0) / (-beta);
    return sup_constant(word) * kappa0 * std::pow(2.0, J * beta) / (1.0 - std::pow(2.0, beta));
  }

  int homogeneity(const MultiIndex& word) const {
    return nu_ - L_.Q - multiindex_weight(word, L_.nu);
  }

 private:
  using Integrand = std::function<double(std::span<const double>)>;

  Integrand integrand_for(const MultiIndex& word) const {
    if (word.empty()) return [this](std::span<const double> z) { return k_(z); };
    auto it = ops_.find(word);
    if (it == ops_.end()) {
      WordSum w = WordSum::word(word);
      it = ops_.emplace(word, std::make_shared<CompiledDiffOperator>(expand_words(L_.lifted_fields, w))).first;
    }
    auto op = it->second;
    return [this, op](std::span<const double> z) { return op->apply(z, k_.jet_at(z, op->order())); };
  }

  GammaValue saturate(std::span<const double> x, std::span<const double> y, const MultiIndex& word,
                      std::optional<int> shells) const {
    std::size_t n = L_.n, p = L_.p;
    if (x.size() != n || y.size() != n) throw DimensionError("Gamma is evaluated at points of R^n");
    bool same = true;
    for (std::size_t i = 0; i < n; ++i) same = same && x[i] == y[i];
    if (same) throw DomainError("Gamma(x, y) is singular at x == y");
    for (std::size_t g : word)
      if (g >= L_.nu.size()) throw DimensionError("derivative word refers to an unknown field");
    Integrand g = integrand_for(word);
    std::vector<double> base(x.begin(), x.end());
    base.insert(base.end(), y.begin(), y.end());
    base.resize(2 * n + p, 0.0);
    auto f = [&](const std::vector<double>& zeta) {
      for (std::size_t j = 0; j < p; ++j) base[2 * n + j] = zeta[j];
      return g(chart_(base));
    };
    // smallest dyadic scale resolving the distance between x and y
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];
    HomNorm rn{L_.base_dilation.exponents()};
    int jmin = static_cast<int>(std::floor(std::log2(std::max(rn(diff), 1e-300)))) - 3;

    GammaValue out;
    auto box = [&](int J) {
      QuadratureResult r = integrate_box(f, jmin, J);
      return r;
    };
    int J = shells.value_or(std::max(jmin + 8, 8));
    QuadratureResult core = box(J);
    if (!shells) {
      double target = cfg_.tail_rel * std::abs(core.value);
      while (tail_bound(word, J) > std::max(target, cfg_.quad.abs_tol) && J < cfg_.max_shells) {
        int J2 = std::min(cfg_.max_shells, J + 8);
        core = box(J2);
        J = J2;
        target = cfg_.tail_rel * std::abs(core.value);
      }
    }
    out.value = core.value;
    out.quad_error = core.error;
    out.evaluations = core.evaluations;
    out.converged = core.converged;
    out.shells = J;
    out.tail_bound = tail_bound(word, J);
    if (!std::isfinite(out.value)) throw ConvergenceError("fiber integral produced a non-finite value");
    return out;
  }

  /// Nested integral over prod_j [-R^tau_j, R^tau_j] with dyadic breakpoints in every coordinate.
  template <class F>
  QuadratureResult integrate_box(F& f, int jmin, int J) const {
    std::size_t p = L_.p;
    std::vector<double> zeta(p, 0.0);
    QuadratureResult total;
    std::function<double(std::size_t)> level = [&](std::size_t l) -> double {
      double tau = L_.tau[l];
      std::vector<double> br{0.0};
      for (int j = jmin; j < J; ++j) {
        double b = std::pow(2.0, j * tau);
        br.push_back(b);
        br.push_back(-b);
      }
      auto inner = [&](double t) {
        zeta[l] = t;
        return l + 1 == p ? f(zeta) : level(l + 1);
      };
      auto r = integrate_pieces(inner, br, cfg_.quad);
      if (l == 0) {
        total.value = r.value;
        total.error = r.error;
        total.intervals = r.intervals;
      }
      if (l + 1 == p) total.evaluations += r.evaluations;
      total.converged = total.converged && r.converged;
      return r.value;
    };
    level(0);
    return total;
  }

  LiftedSystem L_;
  KernelSpec k_;
  int nu_;
  SaturationConfig cfg_;
  CompiledMap chart_;
  std::vector<Polynomial> chart_poly_;
  HomNorm rho_;
  double unit_ball_volume_ = 0;
  mutable std::map<MultiIndex, double> sup_cache_;
  mutable std::map<MultiIndex, std::shared_ptr<CompiledDiffOperator>> ops_;
};

inline double gamma_eval(const SaturationEvaluator& ev, std::span<const double> x, std::span<const double> y) {
  return ev.gamma(x, y).value;
}

inline double gamma_x_derivative(const SaturationEvaluator& ev, const MultiIndex& word, std::span<const double> x,
                                 std::span<const double> y) {
  return ev.x_derivative(word, x, y).value;
}

/// max |Gamma(d_l x, d_l y) - l^(nu - q) Gamma(x, y)| / |Gamma(x, y)|.
inline double verify_homogeneity(const SaturationEvaluator& ev,
                                 const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
                                 const std::vector<double>& lambdas) {
  const auto& d = ev.lifted().base_dilation;
  double worst = 0;
  int deg = ev.nu() - ev.lifted().q;
  for (const auto& [x, y] : pairs) {
    double g = gamma_eval(ev, x, y);
    for (double l : lambdas) {
      double gl = gamma_eval(ev, d.apply(x, l), d.apply(y, l));
      worst = std::max(worst, std::abs(gl - std::pow(l, deg) * g) / std::abs(g));
    }
  }
  return worst;
}

struct LeftInverseResult {
  double integral = 0;
  double phi_at_pole = 0;
  double residual = 0;  ///< |int Gamma(x, y) L* phi(x) dx + phi(y)|
  long gamma_evaluations = 0;
};

/// Outer integral of the left-inverse identity in anisotropic polar coordinates about the pole y.
inline LeftInverseResult verify_left_inverse(const SaturationEvaluator& ev, const OperatorSpec& base_op,
                                             const Bump& phi, std::span<const double> y,
                                             const QuadratureConfig& outer = {1e-6, 1e-10, 200}) {
  const auto& L = ev.lifted();
  std::size_t n = L.n;
  if (phi.dim() != n || y.size() != n) throw DimensionError("bump and pole must live on R^n");
  LeftInverseResult res;
  res.phi_at_pole = phi(y);
  if (phi.amplitude == 0.0) return res;
  {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double t = (y[i] - phi.center[i]) / phi.radii[i];
      s += t * t;
    }
    if (std::abs(s - 1.0) < 1e-9) throw DomainError("pole lies on the boundary of the bump support");
  }
  CompiledDiffOperator Lt(expand(operator_transpose(base_op)));
  auto sigma = L.base_dilation.exponents();
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = std::abs(phi.center[i] - y[i]) + phi.radii[i];
  PolarSphere S{n};
  int q = L.q;
  auto f = [&](const std::vector<double>& v) {
    std::vector<double> ang(v.begin(), v.end() - 1);
    double r = v.back();
    if (r <= 0) return 0.0;
    auto th = S.point(ang);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] + std::pow(r, sigma[i]) * th[i];
    double lphi = Lt.apply(x, phi.jet(x, Lt.order()));
    if (lphi == 0.0) return 0.0;
    double J = 0;
    for (std::size_t i = 0; i < n; ++i) J += sigma[i] * th[i] * th[i];
    ++res.gamma_evaluations;
    return std::pow(r, q - 1) * J * S.surface_weight(ang) * gamma_eval(ev, x, y) * lphi;
  };
  auto bounds = [&](std::size_t level, const std::vector<double>& prefix) -> std::pair<double, double> {
    if (level + 1 < n) return S.range(level);
    auto th = S.point(prefix);
    double rmax = 0;
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(th[i]) < 1e-300) continue;
      double ri = std::pow(b[i] / std::abs(th[i]), 1.0 / sigma[i]);
      rmax = first ? ri : std::min(rmax, ri);
      first = false;
    }
    return {0.0, rmax};
  };
  std::vector<QuadratureConfig> cfgs(n, outer);
  auto r = integrate_nested(f, n, bounds, cfgs);
  res.integral = r.value;
  res.residual = std::abs(r.value + res.phi_at_pole);
  return res;
}

}  // namespace rockland
