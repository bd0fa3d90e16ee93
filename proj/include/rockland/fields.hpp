#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rockland/polynomial.hpp"

namespace rockland {

/// Anisotropic dilations x_i -> lambda^sigma_i x_i with positive integer exponents.
class DilationFamily {
 public:
  DilationFamily() = default;
  explicit DilationFamily(std::vector<int> sigma) : sigma_(std::move(sigma)) {
    if (sigma_.empty()) throw DimensionError("dilation family needs at least one exponent");
    for (int s : sigma_)
      if (s < 1) throw HypothesisError("dilation exponents must be positive integers");
  }

  /// Enforces 1 = sigma_1 <= ... <= sigma_n, the normal form for a base space.
  static DilationFamily normalized(std::vector<int> sigma) {
    DilationFamily d(std::move(sigma));
    if (!d.is_normalized())
      throw HypothesisError("dilation exponents must be non-decreasing with first exponent 1");
    return d;
  }

  std::size_t dim() const { return sigma_.size(); }
  int operator[](std::size_t i) const { return sigma_[i]; }
  const std::vector<int>& exponents() const { return sigma_; }
  std::span<const int> span() const { return sigma_; }
  int max_exponent() const { return *std::max_element(sigma_.begin(), sigma_.end()); }

  bool is_normalized() const {
    if (sigma_.front() != 1) return false;
    for (std::size_t i = 1; i < sigma_.size(); ++i)
      if (sigma_[i] < sigma_[i - 1]) return false;
    return true;
  }

  int homogeneous_dimension() const { return std::accumulate(sigma_.begin(), sigma_.end(), 0); }

  template <class T>
  std::vector<T> apply(const std::vector<T>& x, const T& lambda) const {
    if (x.size() != sigma_.size()) throw DimensionError("dilation applied to point of wrong dimension");
    std::vector<T> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if constexpr (std::is_same_v<T, double>)
        out[i] = std::pow(lambda, sigma_[i]) * x[i];
      else
        out[i] = rational_pow(lambda, static_cast<unsigned>(sigma_[i])) * x[i];
    }
    return out;
  }

  friend bool operator==(const DilationFamily&, const DilationFamily&) = default;

 private:
  std::vector<int> sigma_;
};

inline int homogeneous_dimension(const DilationFamily& d) { return d.homogeneous_dimension(); }

/// First-order operator sum_i coeffs[i] d/dx_i with polynomial coefficients.
class PolyVectorField {
 public:
  PolyVectorField() = default;
  explicit PolyVectorField(std::size_t nvars) : coeffs_(nvars, Polynomial(nvars)) {}
  explicit PolyVectorField(std::vector<Polynomial> coeffs, std::optional<int> degree = std::nullopt)
      : coeffs_(std::move(coeffs)), degree_(degree) {
    for (const auto& c : coeffs_)
      if (c.nvars() != coeffs_.size()) throw DimensionError("vector field coefficient in wrong ambient space");
  }

  /// The coordinate field d/dx_i.
  static PolyVectorField coordinate(std::size_t nvars, std::size_t i) {
    PolyVectorField f(nvars);
    f.coeffs_.at(i) = Polynomial::constant(nvars, 1);
    return f;
  }

  std::size_t nvars() const { return coeffs_.size(); }
  const Polynomial& operator[](std::size_t i) const { return coeffs_[i]; }
  const std::vector<Polynomial>& coeffs() const { return coeffs_; }
  std::optional<int> declared_degree() const { return degree_; }
  PolyVectorField with_degree(std::optional<int> d) const {
    PolyVectorField f(*this);
    f.degree_ = d;
    return f;
  }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }

  PolyVectorField& operator+=(const PolyVectorField& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    degree_.reset();
    return *this;
  }
  PolyVectorField& operator-=(const PolyVectorField& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    degree_.reset();
    return *this;
  }
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) { return a -= b; }
  friend PolyVectorField operator*(const Rational& s, PolyVectorField a) {
    for (auto& c : a.coeffs_) c *= s;
    return a;
  }
  friend PolyVectorField operator*(const Polynomial& s, PolyVectorField a) {
    for (auto& c : a.coeffs_) c = s * c;
    a.degree_.reset();
    return a;
  }

  /// Equality of the underlying operators; declared degrees are metadata.
  friend bool operator==(const PolyVectorField& a, const PolyVectorField& b) { return a.coeffs_ == b.coeffs_; }

  /// Applies the field to a polynomial.
  Polynomial apply(const Polynomial& u) const {
    if (u.nvars() != nvars()) throw DimensionError("field applied to polynomial in wrong ambient space");
    Polynomial out(nvars());
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (!coeffs_[i].is_zero()) out += coeffs_[i] * u.diff(i);
    return out;
  }

  Polynomial divergence() const {
    Polynomial d(nvars());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) d += coeffs_[i].diff(i);
    return d;
  }

  template <class T>
  std::vector<T> evaluate_at(const std::vector<T>& x) const;

  std::string to_string(const std::vector<std::string>& names = {}) const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i].is_zero()) continue;
      if (!first) os << " + ";
      first = false;
      std::string d = "d" + std::to_string(i + 1);
      if (coeffs_[i] == Polynomial::constant(nvars(), 1))
        os << d;
      else
        os << "(" << coeffs_[i].to_string(names) << ")*" << d;
    }
    return first ? "0" : os.str();
  }

 private:
  void check_same(const PolyVectorField& o) const {
    if (o.nvars() != nvars()) throw DimensionError("vector fields in different ambient spaces");
  }

  std::vector<Polynomial> coeffs_;
  std::optional<int> degree_;
};

template <>
inline std::vector<double> PolyVectorField::evaluate_at(const std::vector<double>& x) const {
  std::vector<double> out;
  for (const auto& c : coeffs_) out.push_back(poly_eval(c, x));
  return out;
}
template <>
inline std::vector<Rational> PolyVectorField::evaluate_at(const std::vector<Rational>& x) const {
  std::vector<Rational> out;
  for (const auto& c : coeffs_) out.push_back(poly_eval(c, x));
  return out;
}

inline Polynomial field_apply(const PolyVectorField& X, const Polynomial& u) { return X.apply(u); }

/// [X,Y] with coefficient i equal to X(Y_i) - Y(X_i).
inline PolyVectorField commutator(const PolyVectorField& X, const PolyVectorField& Y) {
  if (X.nvars() != Y.nvars()) throw DimensionError("commutator of fields in different ambient spaces");
  std::vector<Polynomial> c;
  c.reserve(X.nvars());
  for (std::size_t i = 0; i < X.nvars(); ++i) c.push_back(X.apply(Y[i]) - Y.apply(X[i]));
  std::optional<int> d;
  if (X.declared_degree() && Y.declared_degree()) d = *X.declared_degree() + *Y.declared_degree();
  PolyVectorField out(std::move(c));
  return out.is_zero() ? out : out.with_degree(d);
}

/// Outcome of checking a field against a dilation family.
struct HomogeneityReport {
  std::optional<int> degree;
  bool pyramid_ok = true;
  /// Per coefficient index, the graded degree of each nonzero component (as sigma_i - component degree).
  std::vector<std::vector<long>> offending;
  std::string message;
};

/// Full diagnostic homogeneity check; the coefficient of d/dx_i must be homogeneous of
/// degree sigma_i - nu for one common nu >= 1 and depend only on variables of weight < sigma_i.
inline HomogeneityReport homogeneity_report(const PolyVectorField& X, const DilationFamily& delta) {
  if (X.nvars() != delta.dim()) throw DimensionError("field and dilation family dimensions differ");
  HomogeneityReport rep;
  rep.offending.resize(X.nvars());
  std::optional<long> nu;
  bool consistent = true;
  for (std::size_t i = 0; i < X.nvars(); ++i) {
    auto comps = graded_components(X[i], delta.span());
    for (const auto& [d, part] : comps) {
      long cand = delta[i] - d;
      rep.offending[i].push_back(cand);
      if (!nu) nu = cand;
      if (*nu != cand) consistent = false;
    }
    for (std::size_t j = 0; j < X.nvars(); ++j)
      if (X[i].depends_on(j) && delta[j] >= delta[i]) rep.pyramid_ok = false;
  }
  std::ostringstream msg;
  if (!nu) {
    msg << "zero field has no homogeneity degree";
  } else if (!consistent) {
    msg << "coefficient components imply several degrees:";
    for (std::size_t i = 0; i < X.nvars(); ++i) {
      if (rep.offending[i].empty()) continue;
      msg << " d" << (i + 1) << "{";
      for (std::size_t k = 0; k < rep.offending[i].size(); ++k) msg << (k ? "," : "") << rep.offending[i][k];
      msg << "}";
    }
  } else if (*nu < 1) {
    msg << "degree " << *nu << " is not positive";
  } else if (!rep.pyramid_ok) {
    msg << "coefficient depends on a variable of equal or higher weight";
  } else {
    rep.degree = static_cast<int>(*nu);
    for (auto& o : rep.offending) o.clear();
  }
  rep.message = msg.str();
  return rep;
}

inline std::optional<int> certify_homogeneity(const PolyVectorField& X, const DilationFamily& delta) {
  return homogeneity_report(X, delta).degree;
}

/// Certifies a whole system, returning the degrees or throwing with the offending report.
inline std::vector<int> certify_system(const std::vector<PolyVectorField>& fields, const DilationFamily& delta) {
  std::vector<int> out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto rep = homogeneity_report(fields[i], delta);
    if (!rep.degree)
      throw HypothesisError("field " + std::to_string(i + 1) + " is not homogeneous: " + rep.message);
    if (fields[i].declared_degree() && *fields[i].declared_degree() != *rep.degree)
      throw HypothesisError("field " + std::to_string(i + 1) + " declared degree " +
                            std::to_string(*fields[i].declared_degree()) + " but certifies to " +
                            std::to_string(*rep.degree));
    out.push_back(*rep.degree);
  }
  return out;
}

/// Embeds a field on R^n into R^N (N >= n) acting on the first n coordinates.
inline PolyVectorField embed_field(const PolyVectorField& X, std::size_t N) {
  std::vector<Polynomial> c;
  for (std::size_t i = 0; i < N; ++i) c.push_back(i < X.nvars() ? embed(X[i], N) : Polynomial(N));
  return PolyVectorField(std::move(c), X.declared_degree());
}

}  // namespace rockland
