#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rockland/errors.hpp"
#include "rockland/rational.hpp"

namespace rockland {

/// Exponent vector of a monomial in a fixed number of variables.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  explicit Monomial(std::vector<unsigned> exps) : exps_(std::move(exps)) {
    for (unsigned e : exps_) degree_ += e;
  }

  static Monomial unit(std::size_t nvars, std::size_t var, unsigned power = 1) {
    Monomial m(nvars);
    m.exps_.at(var) = power;
    m.degree_ = power;
    return m;
  }

  std::size_t nvars() const { return exps_.size(); }
  unsigned operator[](std::size_t i) const { return exps_[i]; }
  unsigned degree() const { return degree_; }
  const std::vector<unsigned>& exponents() const { return exps_; }

  /// Graded degree sum_i e_i * sigma_i.
  long weighted_degree(std::span<const int> sigma) const {
    long d = 0;
    for (std::size_t i = 0; i < exps_.size(); ++i) d += static_cast<long>(exps_[i]) * sigma[i];
    return d;
  }

  Monomial operator*(const Monomial& o) const {
    if (o.nvars() != nvars()) throw DimensionError("monomial product across different ambient spaces");
    Monomial r(*this);
    for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += o.exps_[i];
    r.degree_ += o.degree_;
    return r;
  }

  /// Returns the monomial with one power of `var` removed; requires exps[var] > 0.
  Monomial lowered(std::size_t var) const {
    Monomial r(*this);
    --r.exps_[var];
    --r.degree_;
    return r;
  }

  bool divides(const Monomial& o) const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] > o.exps_[i]) return false;
    return true;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

 private:
  std::vector<unsigned> exps_;
  unsigned degree_ = 0;
};

/// Graded lexicographic order: higher total degree first, then lexicographically larger exponents.
struct GrlexOrder {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.degree() != b.degree()) return a.degree() > b.degree();
    return a.exponents() > b.exponents();
  }
};

/// Sparse multivariate polynomial with rational coefficients.
///
/// Variables are indexed from 0. No zero coefficient is ever stored, so two
/// polynomials are equal iff their term maps are equal.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexOrder>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    Polynomial p(nvars);
    p.add_term(Monomial(nvars), c);
    return p;
  }
  static Polynomial variable(std::size_t nvars, std::size_t var) {
    if (var >= nvars) throw DimensionError("variable index out of range");
    Polynomial p(nvars);
    p.terms_.emplace(Monomial::unit(nvars, var), Rational(1));
    return p;
  }
  static Polynomial term(const Monomial& m, const Rational& c) {
    Polynomial p(m.nvars());
    p.add_term(m, c);
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0); }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }
  Rational constant_term() const { return coefficient(Monomial(nvars_)); }

  unsigned total_degree() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }

  unsigned degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
  }
  bool depends_on(std::size_t var) const { return degree_in(var) > 0; }

  void add_term(const Monomial& m, const Rational& c) {
    if (m.nvars() != nvars_) throw DimensionError("monomial does not match polynomial ambient space");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (inserted) {
      it->second.canonicalize();
    } else if (mpz_cmp_ui(c.get_den_mpz_t(), 1) != 0) {
      it->second += canonical(c);
      if (it->second == 0) terms_.erase(it);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_same(b);
    Polynomial r(a.nvars_);
    if (a.is_zero() || b.is_zero()) return r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// Partial derivative with respect to variable `var`.
  Polynomial diff(std::size_t var) const {
    if (var >= nvars_) throw DimensionError("derivative index out of range");
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_)
      if (m[var] > 0) r.terms_.emplace(m.lowered(var), c * m[var]);
    return r;
  }

  Polynomial pow(unsigned e) const {
    Polynomial out = constant(nvars_, 1);
    Polynomial b = *this;
    while (e) {
      if (e & 1u) out *= b;
      e >>= 1u;
      if (e) b *= b;
    }
    return out;
  }

  /// Canonical text; terms in graded-lex order, coefficients as "p/q".
  std::string to_string(const std::vector<std::string>& names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      Rational a = abs(c);
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      bool unit = (a == 1);
      if (!unit || m.degree() == 0) os << rockland::to_string(a);
      bool need_star = !unit;
      for (std::size_t i = 0; i < m.nvars(); ++i) {
        if (m[i] == 0) continue;
        if (need_star) os << "*";
        os << (i < names.size() ? names[i] : "x" + std::to_string(i + 1));
        if (m[i] > 1) os << "^" << m[i];
        need_star = true;
      }
    }
    return os.str();
  }

 private:
  void check_same(const Polynomial& o) const {
    if (o.nvars_ != nvars_)
      throw DimensionError("polynomials in " + std::to_string(nvars_) + " and " + std::to_string(o.nvars_) +
                           " variables mixed");
  }

  std::size_t nvars_ = 0;
  TermMap terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return a * b; }
inline Polynomial poly_add(const Polynomial& a, const Polynomial& b) { return a + b; }
inline Polynomial poly_diff(const Polynomial& a, std::size_t var) { return a.diff(var); }

/// Ring operations needed by the generic evaluator. Overloaded per scalar type.
inline double scale(const Rational& c, double v) { return c.get_d() * v; }
inline Rational scale(const Rational& c, const Rational& v) { return Rational(c * v); }
inline Polynomial scale(const Rational& c, const Polynomial& v) { return c * v; }

namespace detail {

template <class T>
std::vector<std::vector<T>> power_table(const Polynomial& p, std::span<const T> point, const T& one) {
  std::vector<std::vector<T>> pw(p.nvars());
  for (std::size_t i = 0; i < p.nvars(); ++i) {
    unsigned d = p.degree_in(i);
    pw[i].reserve(d + 1);
    pw[i].push_back(one);
    for (unsigned k = 1; k <= d; ++k) pw[i].push_back(pw[i][k - 1] * point[i]);
  }
  return pw;
}

}  // namespace detail

/// Evaluates p at a point whose coordinates live in any commutative ring T;
/// `one` is the multiplicative identity of T.
template <class T>
T evaluate(const Polynomial& p, std::span<const T> point, const T& one) {
  if (point.size() != p.nvars()) throw DimensionError("evaluation point has wrong dimension");
  auto pw = detail::power_table(p, point, one);
  T acc = scale(Rational(0), one);
  for (const auto& [m, c] : p.terms()) {
    T mono = one;
    bool first = true;
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (m[i] == 0) continue;
      if (first) {
        mono = pw[i][m[i]];
        first = false;
      } else {
        mono = mono * pw[i][m[i]];
      }
    }
    acc = acc + scale(c, mono);
  }
  return acc;
}

inline Rational poly_eval(const Polynomial& p, std::span<const Rational> point) {
  return evaluate<Rational>(p, point, Rational(1));
}
inline double poly_eval(const Polynomial& p, std::span<const double> point) {
  return evaluate<double>(p, point, 1.0);
}
inline Rational poly_eval(const Polynomial& p, const std::vector<Rational>& point) {
  return poly_eval(p, std::span<const Rational>(point));
}
inline double poly_eval(const Polynomial& p, const std::vector<double>& point) {
  return poly_eval(p, std::span<const double>(point));
}

/// Substitutes subs[i] for variable i; all substitutes share one ambient space.
inline Polynomial compose(const Polynomial& p, const std::vector<Polynomial>& subs) {
  if (subs.size() != p.nvars()) throw DimensionError("composition needs one substitute per variable");
  std::size_t target = subs.empty() ? 0 : subs.front().nvars();
  for (const auto& s : subs)
    if (s.nvars() != target) throw DimensionError("substitutes live in different ambient spaces");
  return evaluate<Polynomial>(p, std::span<const Polynomial>(subs), Polynomial::constant(target, 1));
}

inline std::vector<Polynomial> compose(const std::vector<Polynomial>& map, const std::vector<Polynomial>& subs) {
  std::vector<Polynomial> out;
  out.reserve(map.size());
  for (const auto& p : map) out.push_back(compose(p, subs));
  return out;
}

/// Re-embeds p into `nvars` variables, sending old variable i to new variable index_map[i].
inline Polynomial remap(const Polynomial& p, std::size_t nvars, const std::vector<std::size_t>& index_map) {
  if (index_map.size() != p.nvars()) throw DimensionError("index map has wrong length");
  Polynomial r(nvars);
  for (const auto& [m, c] : p.terms()) {
    std::vector<unsigned> e(nvars, 0);
    for (std::size_t i = 0; i < m.nvars(); ++i) {
      if (index_map[i] >= nvars) throw DimensionError("index map target out of range");
      e[index_map[i]] += m[i];
    }
    r.add_term(Monomial(std::move(e)), c);
  }
  return r;
}

/// Embeds p into `nvars` variables with variable i sent to offset + i.
inline Polynomial embed(const Polynomial& p, std::size_t nvars, std::size_t offset = 0) {
  std::vector<std::size_t> idx(p.nvars());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = offset + i;
  return remap(p, nvars, idx);
}

/// Splits p into parts homogeneous under x_i -> lambda^sigma_i x_i.
inline std::map<long, Polynomial> graded_components(const Polynomial& p, std::span<const int> sigma) {
  if (sigma.size() != p.nvars()) throw DimensionError("grading vector has wrong length");
  std::map<long, Polynomial> out;
  for (const auto& [m, c] : p.terms()) {
    long d = m.weighted_degree(sigma);
    auto it = out.try_emplace(d, p.nvars()).first;
    it->second.add_term(m, c);
  }
  return out;
}
inline std::map<long, Polynomial> graded_components(const Polynomial& p, const std::vector<int>& sigma) {
  return graded_components(p, std::span<const int>(sigma));
}

inline bool is_graded_homogeneous(const Polynomial& p, std::span<const int> sigma, long d) {
  if (sigma.size() != p.nvars()) throw DimensionError("grading vector has wrong length");
  for (const auto& [m, c] : p.terms())
    if (m.weighted_degree(sigma) != d) return false;
  return true;
}
inline bool is_graded_homogeneous(const Polynomial& p, const std::vector<int>& sigma, long d) {
  return is_graded_homogeneous(p, std::span<const int>(sigma), d);
}

/// Largest graded degree of a monomial of p (0 for the zero polynomial).
inline long max_graded_degree(const Polynomial& p, std::span<const int> sigma) {
  long d = 0;
  for (const auto& [m, c] : p.terms()) d = std::max(d, m.weighted_degree(sigma));
  return d;
}

/// p(lambda^sigma_1 x_1, ..., lambda^sigma_n x_n).
inline Polynomial dilate(const Polynomial& p, std::span<const int> sigma, const Rational& lambda) {
  Polynomial r(p.nvars());
  for (const auto& [m, c] : p.terms())
    r.add_term(m, c * rational_pow(lambda, static_cast<unsigned>(m.weighted_degree(sigma))));
  return r;
}

/// Jacobian matrix d map_i / d x_j.
inline std::vector<std::vector<Polynomial>> jacobian(const std::vector<Polynomial>& map) {
  std::vector<std::vector<Polynomial>> J;
  for (const auto& f : map) {
    std::vector<Polynomial> row;
    for (std::size_t j = 0; j < f.nvars(); ++j) row.push_back(f.diff(j));
    J.push_back(std::move(row));
  }
  return J;
}

inline std::vector<Polynomial> identity_map(std::size_t nvars) {
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < nvars; ++i) out.push_back(Polynomial::variable(nvars, i));
  return out;
}

}  // namespace rockland
