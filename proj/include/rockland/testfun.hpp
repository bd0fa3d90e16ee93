#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "rockland/compiled.hpp"
#include "rockland/jets.hpp"
#include "rockland/operators.hpp"

namespace rockland {

/// phi(z) = amplitude * exp(-1 / (1 - s)), s = sum_i ((z_i - c_i) / r_i)^2, zero for s >= 1.
struct Bump {
  std::vector<double> center;
  std::vector<double> radii;
  double amplitude = 1.0;

  static Bump standard(std::vector<double> center, double scale = 1.0) {
    std::vector<double> r(center.size(), scale);
    return {std::move(center), std::move(r), 1.0};
  }

  std::size_t dim() const { return center.size(); }

  double operator()(std::span<const double> z) const {
    double s = 0;
    for (std::size_t i = 0; i < center.size(); ++i) {
      double t = (z[i] - center[i]) / radii[i];
      s += t * t;
    }
    return s >= 1.0 ? 0.0 : amplitude * std::exp(-1.0 / (1.0 - s));
  }

  Jet jet(std::span<const double> z, unsigned order) const {
    auto layout = JetLayout::get(z.size(), order);
    double s0 = 0;
    for (std::size_t i = 0; i < center.size(); ++i) {
      double t = (z[i] - center[i]) / radii[i];
      s0 += t * t;
    }
    if (s0 >= 1.0 || amplitude == 0.0) return Jet(layout, 0.0);
    Jet s(layout, 0.0);
    for (std::size_t i = 0; i < center.size(); ++i) {
      Jet t = (Jet::variable(layout, i, z[i]) + (-center[i])) * (1.0 / radii[i]);
      s += t * t;
    }
    Jet one_minus = -s + 1.0;
    return exp(-reciprocal(one_minus)) * amplitude;
  }

  /// A coordinate box containing the support.
  std::vector<std::pair<double, double>> support_box() const {
    std::vector<std::pair<double, double>> b;
    for (std::size_t i = 0; i < center.size(); ++i) b.emplace_back(center[i] - radii[i], center[i] + radii[i]);
    return b;
  }
};

/// sum_alpha a_alpha(z) D^alpha applied numerically through jets.
class CompiledDiffOperator {
 public:
  CompiledDiffOperator() = default;
  explicit CompiledDiffOperator(const DiffOperator& D) : n_(D.nvars()) {
    std::vector<Polynomial> coeffs;
    for (const auto& [al, a] : D.terms()) {
      std::vector<unsigned> e(n_);
      for (std::size_t i = 0; i < n_; ++i) e[i] = al[i];
      alphas_.push_back(e);
      order_ = std::max(order_, al.degree());
      coeffs.push_back(a);
    }
    if (!coeffs.empty()) coeffs_ = CompiledMap(coeffs);
    auto layout = JetLayout::get(n_, order_);
    for (const auto& al : alphas_) {
      double f = 1.0;
      for (unsigned a : al)
        for (unsigned t = 2; t <= a; ++t) f *= t;
      slots_.push_back(layout->find(al));
      factor_.push_back(f);
    }
  }

  unsigned order() const { return order_; }
  std::size_t nvars() const { return n_; }
  bool empty() const { return alphas_.empty(); }

  /// Applies the operator given the jet of the function at z (order >= order()).
  double apply(std::span<const double> z, const Jet& f) const {
    if (alphas_.empty()) return 0.0;
    std::vector<double> a = coeffs_(z);
    double s = 0;
    if (f.layout().order() == order_ && f.layout().nvars() == n_) {
      for (std::size_t t = 0; t < alphas_.size(); ++t) s += a[t] * factor_[t] * f.coefficient(slots_[t]);
    } else {
      for (std::size_t t = 0; t < alphas_.size(); ++t) s += a[t] * f.derivative(alphas_[t]);
    }
    return s;
  }

 private:
  std::size_t n_ = 0;
  unsigned order_ = 0;
  std::vector<std::vector<unsigned>> alphas_;
  std::vector<std::size_t> slots_;
  std::vector<double> factor_;
  CompiledMap coeffs_;
};

}  // namespace rockland
