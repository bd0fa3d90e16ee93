#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "rockland/errors.hpp"
#include "rockland/polynomial.hpp"

namespace rockland {

/// Multi-indices of total degree <= order in k variables, with a truncated product table.
class JetLayout {
 public:
  JetLayout(std::size_t k, unsigned order) : k_(k), order_(order) {
    std::vector<unsigned> e(k, 0);
    for (unsigned d = 0; d <= order; ++d) enumerate(0, d, e);
    for (std::size_t i = 0; i < index_.size(); ++i) lookup_[index_[i]] = i;
    for (std::size_t a = 0; a < index_.size(); ++a)
      for (std::size_t b = 0; b < index_.size(); ++b) {
        if (degree_[a] + degree_[b] > order) continue;
        std::vector<unsigned> s(k);
        for (std::size_t i = 0; i < k; ++i) s[i] = index_[a][i] + index_[b][i];
        products_.push_back({a, b, lookup_.at(s)});
      }
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<unsigned> u(k, 0);
      u[i] = 1;
      unit_.push_back(order >= 1 ? lookup_.at(u) : 0);
    }
  }

  std::size_t nvars() const { return k_; }
  unsigned order() const { return order_; }
  std::size_t size() const { return index_.size(); }
  const std::vector<unsigned>& multiindex(std::size_t i) const { return index_[i]; }
  unsigned degree(std::size_t i) const { return degree_[i]; }
  std::size_t find(const std::vector<unsigned>& alpha) const { return lookup_.at(alpha); }
  std::size_t unit(std::size_t var) const { return unit_[var]; }

  struct Product {
    std::size_t a, b, out;
  };
  const std::vector<Product>& products() const { return products_; }

  static std::shared_ptr<const JetLayout> get(std::size_t k, unsigned order) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, unsigned>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{k, order}];
    if (!slot) slot = std::make_shared<const JetLayout>(k, order);
    return slot;
  }

 private:
  void enumerate(std::size_t i, unsigned rem, std::vector<unsigned>& e) {
    if (i + 1 == k_ || k_ == 0) {
      if (k_ > 0) e[i] = rem;
      if (k_ == 0 && rem > 0) return;
      index_.push_back(e);
      degree_.push_back(total(e));
      return;
    }
    for (unsigned v = rem + 1; v-- > 0;) {
      e[i] = v;
      enumerate(i + 1, rem - v, e);
    }
    e[i] = 0;
  }
  static unsigned total(const std::vector<unsigned>& e) {
    unsigned s = 0;
    for (unsigned v : e) s += v;
    return s;
  }

  std::size_t k_;
  unsigned order_;
  std::vector<std::vector<unsigned>> index_;
  std::vector<unsigned> degree_;
  std::map<std::vector<unsigned>, std::size_t> lookup_;
  std::vector<Product> products_;
  std::vector<std::size_t> unit_;
};

/// Truncated multivariate Taylor polynomial: coefficient c_alpha = D^alpha f / alpha!.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::shared_ptr<const JetLayout> layout, double value = 0.0)
      : layout_(std::move(layout)), c_(layout_->size(), 0.0) {
    c_[0] = value;
  }

  static Jet constant(std::shared_ptr<const JetLayout> layout, double v) { return Jet(std::move(layout), v); }
  /// The coordinate function z_var expanded around the value v.
  static Jet variable(std::shared_ptr<const JetLayout> layout, std::size_t var, double v) {
    Jet j(layout, v);
    if (layout->order() >= 1) j.c_[layout->unit(var)] = 1.0;
    return j;
  }

  const JetLayout& layout() const { return *layout_; }
  double value() const { return c_[0]; }
  double coefficient(std::size_t i) const { return c_[i]; }
  /// D^alpha f at the expansion point.
  double derivative(const std::vector<unsigned>& alpha) const {
    double f = 1.0;
    for (unsigned a : alpha)
      for (unsigned t = 2; t <= a; ++t) f *= t;
    return f * c_[layout_->find(alpha)];
  }

  Jet& operator+=(const Jet& o) {
    adopt(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    adopt(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    if (!a.layout_) return b * a.c0_or(1.0);
    if (!b.layout_) return a * b.c0_or(1.0);
    Jet out(a.layout_, 0.0);
    for (const auto& p : a.layout_->products()) out.c_[p.out] += a.c_[p.a] * b.c_[p.b];
    return out;
  }
  friend bool operator==(const Jet& a, const Jet& b) { return a.c_ == b.c_; }

  /// f(this) given f and its derivatives f^(j) at value(), j = 0..order.
  Jet compose(const std::vector<double>& derivs) const {
    unsigned K = layout_->order();
    if (derivs.size() < K + 1) throw DimensionError("jet composition needs order + 1 derivatives");
    Jet h = *this;
    h.c_[0] = 0.0;
    Jet out(layout_, derivs[0]);
    Jet hp(layout_, 1.0);
    double fact = 1.0;
    for (unsigned j = 1; j <= K; ++j) {
      hp = hp * h;
      fact *= j;
      out += hp * (derivs[j] / fact);
    }
    return out;
  }

 private:
  void adopt(const Jet& o) {
    if (!layout_) {
      layout_ = o.layout_;
      double v = c_.empty() ? 0.0 : c_[0];
      c_.assign(layout_->size(), 0.0);
      c_[0] = v;
    }
  }
  double c0_or(double d) const { return c_.empty() ? d : c_[0]; }

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> c_;
};

inline Jet scale(const Rational& c, const Jet& v) { return v * c.get_d(); }

inline Jet exp(const Jet& a) {
  double e = std::exp(a.value());
  return a.compose(std::vector<double>(a.layout().order() + 1, e));
}

/// a^s for a > 0 (any real s), or integer s.
inline Jet pow(const Jet& a, double s) {
  unsigned K = a.layout().order();
  std::vector<double> d(K + 1);
  double coef = 1.0;
  for (unsigned j = 0; j <= K; ++j) {
    d[j] = coef * std::pow(a.value(), s - j);
    coef *= (s - j);
  }
  return a.compose(d);
}

inline Jet reciprocal(const Jet& a) { return pow(a, -1.0); }

inline Jet log(const Jet& a) {
  unsigned K = a.layout().order();
  std::vector<double> d(K + 1);
  d[0] = std::log(a.value());
  double coef = 1.0;
  for (unsigned j = 1; j <= K; ++j) {
    d[j] = coef / std::pow(a.value(), static_cast<double>(j));
    coef *= -static_cast<double>(j);
  }
  return a.compose(d);
}

/// Jets of the coordinate functions of R^k at the point z.
inline std::vector<Jet> coordinate_jets(std::span<const double> z, unsigned order) {
  auto layout = JetLayout::get(z.size(), order);
  std::vector<Jet> out;
  for (std::size_t i = 0; i < z.size(); ++i) out.push_back(Jet::variable(layout, i, z[i]));
  return out;
}

inline std::vector<Jet> evaluate_jets(const std::vector<Polynomial>& polys, const std::vector<Jet>& point) {
  if (point.empty()) throw DimensionError("jet evaluation needs at least one variable");
  Jet one = Jet::constant(JetLayout::get(point.front().layout().nvars(), point.front().layout().order()), 1.0);
  std::vector<Jet> out;
  for (const auto& p : polys) out.push_back(evaluate<Jet>(p, point, one));
  return out;
}

}  // namespace rockland
