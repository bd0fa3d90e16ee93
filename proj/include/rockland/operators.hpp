#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rockland/fields.hpp"

namespace rockland {

/// A word X_{i1} ... X_{ik} in field indices (0-based).
using MultiIndex = std::vector<std::size_t>;

inline int multiindex_weight(const MultiIndex& I, const std::vector<int>& degrees) {
  int w = 0;
  for (std::size_t i : I) {
    if (i >= degrees.size()) throw DimensionError("multi-index entry out of range");
    w += degrees[i];
  }
  return w;
}

/// Noncommutative polynomial in field symbols with rational coefficients.
class WordSum {
 public:
  using TermMap = std::map<MultiIndex, Rational>;

  WordSum() = default;
  static WordSum word(MultiIndex w, const Rational& c = 1) {
    WordSum s;
    s.add(std::move(w), c);
    return s;
  }
  static WordSum symbol(std::size_t i) { return word({i}); }
  static WordSum scalar(const Rational& c) { return word({}, c); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const MultiIndex& w, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(w, canonical(c));
    if (!inserted) {
      it->second += canonical(c);
      if (it->second == 0) terms_.erase(it);
    }
  }

  WordSum& operator+=(const WordSum& o) {
    for (const auto& [w, c] : o.terms_) add(w, c);
    return *this;
  }
  WordSum& operator-=(const WordSum& o) {
    for (const auto& [w, c] : o.terms_) add(w, -c);
    return *this;
  }
  friend WordSum operator+(WordSum a, const WordSum& b) { return a += b; }
  friend WordSum operator-(WordSum a, const WordSum& b) { return a -= b; }
  friend WordSum operator*(const Rational& s, WordSum a) {
    WordSum r;
    for (const auto& [w, c] : a.terms_) r.add(w, s * c);
    return r;
  }
  friend WordSum operator*(const WordSum& a, const WordSum& b) {
    WordSum r;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) {
        MultiIndex w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        r.add(w, ca * cb);
      }
    return r;
  }
  WordSum pow(unsigned k) const {
    WordSum r = scalar(1);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }
  friend bool operator==(const WordSum&, const WordSum&) = default;

 private:
  TermMap terms_;
};

/// Homogeneous operator sum_I c_I X_I over a list of fields with known degrees.
class OperatorSpec {
 public:
  OperatorSpec() = default;
  OperatorSpec(std::vector<PolyVectorField> fields, std::vector<int> degrees, WordSum terms)
      : fields_(std::move(fields)), degrees_(std::move(degrees)), terms_(std::move(terms)) {
    if (fields_.empty()) throw DimensionError("operator needs at least one field");
    if (fields_.size() != degrees_.size()) throw DimensionError("one degree per field required");
    for (const auto& f : fields_)
      if (f.nvars() != fields_.front().nvars()) throw DimensionError("operator fields in different spaces");
    for (int d : degrees_)
      if (d < 1) throw HypothesisError("field degrees must be positive");
    if (terms_.is_zero()) throw HypothesisError("operator has no nonzero term");
    std::optional<int> nu;
    for (const auto& [w, c] : terms_.terms()) {
      if (w.empty()) throw HypothesisError("operator contains a zero-order term");
      int wt = multiindex_weight(w, degrees_);
      if (!nu) nu = wt;
      if (*nu != wt)
        throw HypothesisError("operator is not homogeneous: words of weight " + std::to_string(*nu) + " and " +
                              std::to_string(wt));
    }
    nu_ = *nu;
  }

  const std::vector<PolyVectorField>& fields() const { return fields_; }
  const std::vector<int>& degrees() const { return degrees_; }
  const WordSum& terms() const { return terms_; }
  int nu() const { return nu_; }
  std::size_t nvars() const { return fields_.front().nvars(); }

  /// Same words over a different field list (used for lifted fields).
  OperatorSpec with_fields(std::vector<PolyVectorField> fields) const {
    if (fields.size() != fields_.size()) throw DimensionError("replacement field list has wrong length");
    return OperatorSpec(std::move(fields), degrees_, terms_);
  }

  /// Field indices that appear in some word.
  std::vector<std::size_t> used_fields() const {
    std::vector<bool> used(fields_.size(), false);
    for (const auto& [w, c] : terms_.terms())
      for (std::size_t i : w) used[i] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < used.size(); ++i)
      if (used[i]) out.push_back(i);
    return out;
  }

  std::string words_to_string(const std::vector<std::string>& names = {}) const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, c] : terms_.terms()) {
      Rational a = abs(c);
      if (first)
        os << (c < 0 ? "-" : "");
      else
        os << (c < 0 ? " - " : " + ");
      first = false;
      if (a != 1) os << rockland::to_string(a) << "*";
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (k) os << "*";
        os << (w[k] < names.size() ? names[w[k]] : "X" + std::to_string(w[k] + 1));
      }
    }
    return os.str();
  }

  friend bool operator==(const OperatorSpec& a, const OperatorSpec& b) {
    return a.fields_ == b.fields_ && a.degrees_ == b.degrees_ && a.terms_ == b.terms_;
  }

 private:
  std::vector<PolyVectorField> fields_;
  std::vector<int> degrees_;
  WordSum terms_;
  int nu_ = 0;
};

/// Transpose: c_I X_{i1}...X_{ik} -> (-1)^k c_I X_{ik}...X_{i1}; requires divergence-free fields.
inline OperatorSpec operator_transpose(const OperatorSpec& L) {
  for (std::size_t i : L.used_fields()) {
    Polynomial div = L.fields()[i].divergence();
    if (!div.is_zero())
      throw HypothesisError("field " + std::to_string(i + 1) + " has nonzero divergence " + div.to_string() +
                            "; the transpose of X is not -X");
  }
  WordSum t;
  for (const auto& [w, c] : L.terms().terms()) {
    MultiIndex r(w.rbegin(), w.rend());
    t.add(r, (w.size() % 2 == 0) ? c : Rational(-c));
  }
  return OperatorSpec(L.fields(), L.degrees(), t);
}

/// Scalar differential operator sum_alpha a_alpha(x) D^alpha in canonical form.
class DiffOperator {
 public:
  using TermMap = std::map<Monomial, Polynomial, GrlexOrder>;

  DiffOperator() = default;
  explicit DiffOperator(std::size_t nvars) : nvars_(nvars) {}
  static DiffOperator identity(std::size_t nvars) {
    DiffOperator d(nvars);
    d.add(Monomial(nvars), Polynomial::constant(nvars, 1));
    return d;
  }

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Monomial& alpha, const Polynomial& a) {
    if (a.is_zero()) return;
    auto [it, inserted] = terms_.emplace(alpha, a);
    if (!inserted) {
      it->second += a;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  DiffOperator& operator+=(const DiffOperator& o) {
    for (const auto& [al, a] : o.terms_) add(al, a);
    return *this;
  }
  DiffOperator& operator-=(const DiffOperator& o) {
    for (const auto& [al, a] : o.terms_) add(al, -a);
    return *this;
  }
  friend DiffOperator operator+(DiffOperator a, const DiffOperator& b) { return a += b; }
  friend DiffOperator operator-(DiffOperator a, const DiffOperator& b) { return a -= b; }
  friend DiffOperator operator*(const Rational& s, const DiffOperator& d) {
    DiffOperator r(d.nvars_);
    for (const auto& [al, a] : d.terms_) r.add(al, s * a);
    return r;
  }
  friend bool operator==(const DiffOperator& a, const DiffOperator& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  unsigned order() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }

  Polynomial apply(const Polynomial& u) const {
    Polynomial out(nvars_);
    for (const auto& [al, a] : terms_) {
      Polynomial du = u;
      for (std::size_t i = 0; i < nvars_ && !du.is_zero(); ++i)
        for (unsigned k = 0; k < al[i]; ++k) du = du.diff(i);
      if (!du.is_zero()) out += a * du;
    }
    return out;
  }

  std::string to_string(const std::vector<std::string>& names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [al, a] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << a.to_string(names) << ")";
      for (std::size_t i = 0; i < nvars_; ++i)
        if (al[i] > 0) os << "*D" << (i + 1) << (al[i] > 1 ? "^" + std::to_string(al[i]) : "");
    }
    return os.str();
  }

 private:
  std::size_t nvars_ = 0;
  TermMap terms_;
};

/// X o D, using X(a D^alpha) = sum_i p_i (d_i a) D^alpha + p_i a D^(alpha+e_i).
inline DiffOperator compose_field(const PolyVectorField& X, const DiffOperator& D) {
  if (X.nvars() != D.nvars()) throw DimensionError("field and operator in different spaces");
  std::size_t n = X.nvars();
  DiffOperator out(n);
  for (const auto& [al, a] : D.terms()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (X[i].is_zero()) continue;
      out.add(al, X[i] * a.diff(i));
      out.add(al * Monomial::unit(n, i), X[i] * a);
    }
  }
  return out;
}

/// Expands a word sum over given fields into canonical form.
inline DiffOperator expand_words(const std::vector<PolyVectorField>& fields, const WordSum& words) {
  std::size_t n = fields.front().nvars();
  DiffOperator out(n);
  std::map<MultiIndex, DiffOperator> cache;
  for (const auto& [w, c] : words.terms()) {
    DiffOperator D = DiffOperator::identity(n);
    for (std::size_t h = w.size(); h-- > 0;) {
      MultiIndex suffix(w.begin() + static_cast<long>(h), w.end());
      auto it = cache.find(suffix);
      if (it != cache.end()) {
        D = it->second;
      } else {
        D = compose_field(fields.at(w[h]), D);
        cache.emplace(suffix, D);
      }
    }
    out += c * D;
  }
  return out;
}

inline DiffOperator expand(const OperatorSpec& L) { return expand_words(L.fields(), L.terms()); }

/// Formal adjoint sum_alpha (-1)^|alpha| D^alpha (a_alpha .), expanded by Leibniz.
inline DiffOperator formal_adjoint(const DiffOperator& D) {
  std::size_t n = D.nvars();
  DiffOperator out(n);
  for (const auto& [al, a] : D.terms()) {
    Rational sign = (al.degree() % 2 == 0) ? 1 : -1;
    // enumerate beta <= alpha
    std::vector<unsigned> beta(n, 0);
    while (true) {
      Polynomial da = a;
      Rational binom = 1;
      for (std::size_t i = 0; i < n; ++i) {
        unsigned k = al[i] - beta[i];
        for (unsigned t = 0; t < k && !da.is_zero(); ++t) da = da.diff(i);
        Integer b;
        mpz_bin_uiui(b.get_mpz_t(), al[i], beta[i]);
        binom *= Rational(b);
      }
      if (!da.is_zero()) out.add(Monomial(beta), Rational(sign * binom) * da);
      std::size_t i = 0;
      while (i < n && beta[i] == al[i]) beta[i++] = 0;
      if (i == n) break;
      ++beta[i];
    }
  }
  return out;
}

/// Families of standard homogeneous operators.
enum class StandardOperator { rockland_power, sublaplacian_power, sum_of_even_powers, hormander_power };

struct StandardParams {
  int nu0 = 1;
  unsigned k = 1;
  std::optional<std::size_t> drift;  ///< index of the degree-2 field for hormander_power
};

inline WordSum standard_words(StandardOperator kind, const std::vector<int>& degrees, const StandardParams& prm) {
  std::size_t m = degrees.size();
  WordSum base;
  switch (kind) {
    case StandardOperator::rockland_power: {
      if (prm.nu0 < 1) throw HypothesisError("nu0 must be positive");
      for (std::size_t j = 0; j < m; ++j) {
        if (prm.nu0 % degrees[j] != 0)
          throw HypothesisError("nu0 = " + std::to_string(prm.nu0) + " is not a multiple of field degree " +
                                std::to_string(degrees[j]));
        int r = prm.nu0 / degrees[j];
        base += Rational(r % 2 == 0 ? 1 : -1) * WordSum::word(MultiIndex(2 * r, j));
      }
      return base.pow(prm.k);
    }
    case StandardOperator::sublaplacian_power:
      for (std::size_t j = 0; j < m; ++j) base += WordSum::word(MultiIndex(2, j));
      return base.pow(prm.k);
    case StandardOperator::sum_of_even_powers:
      if (prm.nu0 < 1) throw HypothesisError("nu0 must be positive");
      for (std::size_t j = 0; j < m; ++j) {
        if (degrees[j] != 1) throw HypothesisError("sum of even powers requires 1-homogeneous fields");
        base += WordSum::word(MultiIndex(2 * prm.nu0, j));
      }
      return base;
    case StandardOperator::hormander_power: {
      if (!prm.drift || *prm.drift >= m) throw HypothesisError("hormander_power needs a designated drift field");
      if (degrees[*prm.drift] != 2) throw HypothesisError("the drift field must have degree 2");
      for (std::size_t j = 0; j < m; ++j) {
        if (j == *prm.drift) continue;
        if (degrees[j] != 1) throw HypothesisError("non-drift fields must have degree 1");
        base += WordSum::word(MultiIndex(2, j));
      }
      base += WordSum::symbol(*prm.drift);
      return base.pow(prm.k);
    }
  }
  return base;
}

inline OperatorSpec make_standard_operator(StandardOperator kind, const std::vector<PolyVectorField>& fields,
                                           const std::vector<int>& degrees, const StandardParams& prm = {}) {
  return OperatorSpec(fields, degrees, standard_words(kind, degrees, prm));
}

/// Result of matching L or -L against sum_j (-1)^(nu0/nu_j) X_j^(2 nu0/nu_j).
struct RocklandPattern {
  bool matches = false;
  int nu0 = 0;
  int sign = 0;  ///< +1 if L equals the pattern, -1 if L equals minus the pattern
};

inline RocklandPattern match_positive_rockland_pattern(const OperatorSpec& L) {
  RocklandPattern out;
  if (L.nu() % 2 != 0) return out;
  int nu0 = L.nu() / 2;
  for (int d : L.degrees())
    if (nu0 % d != 0) return out;
  WordSum pattern = standard_words(StandardOperator::rockland_power, L.degrees(), {nu0, 1, std::nullopt});
  if (L.terms() == pattern) return {true, nu0, 1};
  if (L.terms() == Rational(-1) * pattern) return {true, nu0, -1};
  return out;
}

inline bool classify_positive_rockland_pattern(const OperatorSpec& L) {
  return match_positive_rockland_pattern(L).matches;
}

/// Heat-type extension L + sign * d/dt on R^{n+1}.
struct HeatExtension {
  OperatorSpec op;
  DilationFamily dilation;
  std::size_t t_index = 0;  ///< position of t among the n+1 coordinates
  std::size_t t_field = 0;  ///< index of d/dt among the operator's fields
};

/// The t coordinate is inserted after all coordinates with exponent <= nu so the
/// exponent vector stays non-decreasing; when nu >= sigma_n this is the last slot.
inline HeatExtension heat_extend(const OperatorSpec& L, const DilationFamily& delta, int sign) {
  if (sign != 1 && sign != -1) throw HypothesisError("heat extension sign must be +1 or -1");
  if (L.nvars() != delta.dim()) throw DimensionError("operator and dilations have different dimensions");
  certify_system(L.fields(), delta);
  int nu = L.nu();
  std::size_t n = delta.dim();
  std::size_t t = 0;
  while (t < n && delta[t] <= nu) ++t;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i < t ? i : i + 1;
  std::vector<int> sigma;
  for (std::size_t i = 0; i < n; ++i) sigma.push_back(delta[i]);
  sigma.insert(sigma.begin() + static_cast<long>(t), nu);
  std::vector<PolyVectorField> fields;
  for (const auto& X : L.fields()) {
    std::vector<Polynomial> c(n + 1, Polynomial(n + 1));
    for (std::size_t i = 0; i < n; ++i) c[idx[i]] = remap(X[i], n + 1, idx);
    fields.emplace_back(std::move(c), X.declared_degree());
  }
  fields.push_back(PolyVectorField::coordinate(n + 1, t).with_degree(nu));
  std::vector<int> degrees = L.degrees();
  degrees.push_back(nu);
  WordSum terms = L.terms() + Rational(sign) * WordSum::symbol(fields.size() - 1);
  HeatExtension h{OperatorSpec(std::move(fields), std::move(degrees), std::move(terms)), DilationFamily(sigma), t,
                  L.fields().size()};
  return h;
}

}  // namespace rockland
