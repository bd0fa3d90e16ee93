#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rockland/operators.hpp"
#include "rockland/systems.hpp"

namespace rockland {

/// Parse or validation failure with a 1-based source location.
class ModelError : public std::invalid_argument {
 public:
  ModelError(const std::string& msg, std::size_t line, std::size_t column, const std::string& excerpt)
      : std::invalid_argument(format(msg, line, column, excerpt)), message_(msg), line_(line), column_(column) {}

  const std::string& message() const { return message_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& msg, std::size_t line, std::size_t column, const std::string& excerpt) {
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": " << msg << "\n  " << excerpt << "\n  "
       << std::string(column > 0 ? column - 1 : 0, ' ') << "^";
    return os.str();
  }
  std::string message_;
  std::size_t line_, column_;
};

struct ModelOperator {
  std::string name;
  WordSum words;
  friend bool operator==(const ModelOperator&, const ModelOperator&) = default;
};

struct ModelSpec {
  std::vector<int> dilation;
  std::vector<std::string> field_names;
  std::vector<PolyVectorField> fields;
  std::vector<ModelOperator> operators;

  std::size_t dim() const { return dilation.size(); }
  DilationFamily dilation_family() const { return DilationFamily(dilation); }
  VectorSystem system() const { return {fields, DilationFamily(dilation), field_names}; }
  std::vector<int> degrees() const { return certify_system(fields, DilationFamily(dilation)); }

  /// The operator with the given name, or the first one.
  OperatorSpec op(const std::string& name = "") const {
    for (const auto& o : operators)
      if (name.empty() || o.name == name) return OperatorSpec(fields, degrees(), o.words);
    throw DimensionError(name.empty() ? "model declares no operator" : "model has no operator named " + name);
  }

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.dilation == b.dilation && a.field_names == b.field_names && a.fields == b.fields &&
           a.operators == b.operators;
  }
};

namespace detail {

constexpr unsigned kMaxExponent = 64;
constexpr std::size_t kMaxDim = 64;
constexpr std::size_t kMaxWords = 20000;

struct Token {
  enum Kind { Ident, Number, Symbol, End } kind = End;
  std::string text;
  std::size_t pos = 0;
};

class ModelParser {
 public:
  explicit ModelParser(const std::string& text) : src_(text) { lex(); }

  ModelSpec parse() {
    struct RawTerm {
      Rational coef;
      std::map<std::size_t, unsigned> powers;
      std::size_t var;
      std::size_t pos;
    };
    struct RawField {
      std::string name;
      std::vector<RawTerm> terms;
      std::size_t pos;
    };
    struct RawOp {
      std::string name;
      WordSum words;
      std::size_t pos;
    };
    std::optional<std::vector<int>> dilation;
    std::size_t dilation_pos = 0;
    std::vector<RawField> fields;
    std::vector<RawOp> ops;
    std::map<std::string, std::size_t> field_index;

    if (peek().kind == Token::End) fail("empty model: expected a 'dilation' statement", peek().pos);
    while (peek().kind != Token::End) {
      Token kw = next();
      if (kw.kind != Token::Ident) fail("expected 'dilation', 'field' or 'operator'", kw.pos);
      if (kw.text == "dilation") {
        if (dilation) fail("dilation declared twice", kw.pos);
        dilation_pos = kw.pos;
        expect("[");
        std::vector<int> s;
        do {
          Token t = next();
          if (t.kind != Token::Number) fail("expected a positive integer exponent", t.pos);
          long v = small_int(t, 1000);
          if (v < 1) fail("dilation exponents must be positive integers", t.pos);
          s.push_back(static_cast<int>(v));
          if (s.size() > kMaxDim) fail("too many coordinates (limit " + std::to_string(kMaxDim) + ")", t.pos);
        } while (accept(","));
        expect("]");
        expect(";");
        dilation = s;
      } else if (kw.text == "field") {
        Token name = next();
        check_name(name);
        if (field_index.count(name.text) || ops_named(ops, name.text)) fail("name '" + name.text + "' defined twice", name.pos);
        expect("=");
        RawField f{name.text, {}, name.pos};
        bool first = true;
        while (true) {
          Rational sign = 1;
          if (accept("-"))
            sign = -1;
          else if (!first && !accept("+"))
            break;
          else if (first)
            accept("+");
          first = false;
          RawTerm t{sign, {}, 0, peek().pos};
          bool have_d = false;
          do {
            Token a = next();
            if (have_d) fail("the derivative d<k> must be the last factor of a term", a.pos);
            if (a.kind == Token::Number) {
              Rational c = number(a);
              if (accept("/")) {
                Token b = next();
                if (b.kind != Token::Number) fail("expected a denominator", b.pos);
                Rational den = number(b);
                if (den == 0) fail("zero denominator", b.pos);
                c /= den;
              }
              t.coef *= c;
            } else if (a.kind == Token::Ident && indexed(a.text, 'x')) {
              std::size_t v = index_of(a, 'x');
              unsigned e = 1;
              if (accept("^")) e = exponent();
              t.powers[v] += e;
              if (t.powers[v] > kMaxExponent) fail("exponent too large", a.pos);
            } else if (a.kind == Token::Ident && indexed(a.text, 'd')) {
              t.var = index_of(a, 'd');
              have_d = true;
            } else {
              fail("expected a number, a coordinate x<k> or a derivative d<k>", a.pos);
            }
          } while (accept("*"));
          if (!have_d) fail("each field term must end with a derivative d<k>", t.pos);
          f.terms.push_back(std::move(t));
        }
        expect(";");
        field_index[f.name] = fields.size();
        fields.push_back(std::move(f));
      } else if (kw.text == "operator") {
        Token name = next();
        check_name(name);
        if (field_index.count(name.text) || ops_named(ops, name.text)) fail("name '" + name.text + "' defined twice", name.pos);
        expect("=");
        WordSum w = op_sum(field_index);
        expect(";");
        ops.push_back({name.text, std::move(w), name.pos});
      } else {
        fail("unknown statement '" + kw.text + "'", kw.pos);
      }
    }
    if (!dilation) fail("missing 'dilation' statement", src_.size());

    ModelSpec m;
    m.dilation = *dilation;
    std::size_t n = dilation->size();
    for (const auto& f : fields) {
      std::vector<Polynomial> c(n, Polynomial(n));
      for (const auto& t : f.terms) {
        if (t.var >= n)
          fail("dimension mismatch: d" + std::to_string(t.var + 1) + " on R^" + std::to_string(n), t.pos);
        std::vector<unsigned> e(n, 0);
        for (const auto& [v, p] : t.powers) {
          if (v >= n) fail("dimension mismatch: x" + std::to_string(v + 1) + " on R^" + std::to_string(n), t.pos);
          e[v] = p;
        }
        c[t.var].add_term(Monomial(e), t.coef);
      }
      PolyVectorField X(std::move(c));
      if (X.is_zero()) fail("field " + f.name + " is zero", f.pos);
      m.field_names.push_back(f.name);
      m.fields.push_back(std::move(X));
    }
    if (m.fields.empty()) fail("model declares no field", src_.size());
    std::vector<int> degrees;
    try {
      degrees = certify_system(m.fields, DilationFamily(m.dilation));
    } catch (const std::exception& e) {
      fail(std::string("fields are not homogeneous for the dilations: ") + e.what(), dilation_pos);
    }
    for (const auto& o : ops) {
      try {
        OperatorSpec(m.fields, degrees, o.words);
      } catch (const std::exception& e) {
        fail("operator " + o.name + ": " + e.what(), o.pos);
      }
      m.operators.push_back({o.name, o.words});
    }
    return m;
  }

 private:
  template <class V>
  static bool ops_named(const V& ops, const std::string& name) {
    for (const auto& o : ops)
      if (o.name == name) return true;
    return false;
  }

  static bool indexed(const std::string& s, char c) {
    if (s.size() < 2 || s[0] != c) return false;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  }

  std::size_t index_of(const Token& t, char c) const {
    std::string digits = t.text.substr(1);
    if (digits.size() > 4) fail(std::string("index of ") + c + " out of range", t.pos);
    int v = std::stoi(digits);
    if (v < 1) fail("coordinate indices start at 1", t.pos);
    return static_cast<std::size_t>(v - 1);
  }

  void check_name(const Token& t) const {
    if (t.kind != Token::Ident) fail("expected a name", t.pos);
    if (t.text == "dilation" || t.text == "field" || t.text == "operator" || indexed(t.text, 'x') ||
        indexed(t.text, 'd'))
      fail("'" + t.text + "' is reserved", t.pos);
  }

  Rational number(const Token& t) const {
    if (t.text.size() > 30) fail("number too long", t.pos);
    return Rational(mpz_class(t.text));
  }

  long small_int(const Token& t, long limit) const {
    if (t.text.size() > 9) fail("integer out of range", t.pos);
    long v = std::stol(t.text);
    if (v > limit) fail("integer out of range", t.pos);
    return v;
  }

  /// "^" operand: an integer, or a parenthesized integer expression that must evaluate to an integer.
  unsigned exponent() {
    std::size_t pos = peek().pos;
    Rational v;
    if (accept("(")) {
      v = int_expr();
      expect(")");
    } else {
      Token t = next();
      if (t.kind != Token::Number) fail("expected an integer exponent", t.pos);
      v = number(t);
    }
    if (v.get_den() != 1) fail("non-integer exponent " + to_string(v), pos);
    if (v < 0) fail("negative exponent " + to_string(v), pos);
    if (v > kMaxExponent) fail("exponent too large", pos);
    return static_cast<unsigned>(v.get_num().get_ui());
  }

  Rational int_expr(int depth = 0) {
    if (depth > 32) fail("expression nested too deeply", peek().pos);
    Rational v = int_term(depth);
    while (true) {
      if (accept("+"))
        v += int_term(depth);
      else if (accept("-"))
        v -= int_term(depth);
      else
        return v;
      bound(v);
    }
  }
  Rational int_term(int depth) {
    Rational v = int_atom(depth);
    while (true) {
      if (accept("*")) {
        v *= int_atom(depth);
      } else if (peek().text == "/") {
        std::size_t pos = next().pos;
        Rational d = int_atom(depth);
        if (d == 0) fail("division by zero", pos);
        v /= d;
      } else {
        return v;
      }
      bound(v);
    }
  }
  Rational int_atom(int depth) {
    if (accept("-")) return -int_atom(depth);
    if (accept("(")) {
      Rational v = int_expr(depth + 1);
      expect(")");
      return v;
    }
    Token t = next();
    if (t.kind != Token::Number) fail("expected an integer", t.pos);
    return number(t);
  }
  void bound(const Rational& v) const {
    if (abs(v) > Rational(1000000)) fail("exponent expression out of range", peek().pos);
  }

  WordSum op_sum(const std::map<std::string, std::size_t>& names, int depth = 0) {
    if (depth > 16) fail("expression nested too deeply", peek().pos);
    WordSum s;
    bool first = true;
    while (true) {
      Rational sign = 1;
      if (accept("-"))
        sign = -1;
      else if (!first && !accept("+"))
        break;
      else if (first)
        accept("+");
      first = false;
      s += sign * op_product(names, depth);
      check_size(s);
    }
    return s;
  }

  WordSum op_product(const std::map<std::string, std::size_t>& names, int depth) {
    WordSum p = WordSum::scalar(1);
    do {
      std::size_t pos = peek().pos;
      WordSum f;
      if (peek().kind == Token::Number) {
        Rational c = number(next());
        if (accept("/")) {
          Token b = next();
          if (b.kind != Token::Number) fail("expected a denominator", b.pos);
          Rational den = number(b);
          if (den == 0) fail("zero denominator", b.pos);
          c /= den;
        }
        f = WordSum::scalar(c);
      } else if (accept("(")) {
        f = op_sum(names, depth + 1);
        expect(")");
      } else {
        Token t = next();
        if (t.kind != Token::Ident) fail("expected a field name, an integer or '('", t.pos);
        auto it = names.find(t.text);
        if (it == names.end()) fail("undefined name '" + t.text + "'", t.pos);
        f = WordSum::symbol(it->second);
      }
      if (accept("^")) {
        unsigned e = exponent();
        if (e > 16) fail("operator power too large", pos);
        f = f.pow(e);
        check_size(f);
      }
      p = p * f;
      check_size(p);
    } while (accept("*"));
    return p;
  }

  void check_size(const WordSum& w) const {
    std::size_t len = 0;
    for (const auto& [word, c] : w.terms()) len = std::max(len, word.size());
    if (w.terms().size() > kMaxWords || len > 64) fail("operator expression too large", peek().pos);
  }

  void lex() {
    std::size_t i = 0;
    while (i < src_.size()) {
      char c = src_[i];
      if (c == '#') {
        while (i < src_.size() && src_[i] != '\n') ++i;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
        toks_.push_back({Token::Ident, src_.substr(i, j - i), i});
        i = j;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        toks_.push_back({Token::Number, src_.substr(i, j - i), i});
        i = j;
      } else if (std::string("[],;=+-*/^()").find(c) != std::string::npos) {
        toks_.push_back({Token::Symbol, std::string(1, c), i});
        ++i;
      } else {
        fail(std::string("unexpected character '") + (std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "?") + "'", i);
      }
    }
    toks_.push_back({Token::End, "", src_.size()});
  }

  const Token& peek() const { return toks_[k_]; }
  Token next() {
    Token t = toks_[k_];
    if (k_ + 1 < toks_.size()) ++k_;
    return t;
  }
  bool accept(const char* s) {
    if (peek().kind == Token::Symbol && peek().text == s) {
      next();
      return true;
    }
    return false;
  }
  void expect(const char* s) {
    if (!accept(s)) {
      const Token& t = peek();
      fail(std::string("expected '") + s + "'" + (t.kind == Token::End ? " before end of input" : " but found '" + t.text + "'"), t.pos);
    }
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t pos) const {
    std::size_t line = 1, start = 0;
    for (std::size_t i = 0; i < pos && i < src_.size(); ++i)
      if (src_[i] == '\n') {
        ++line;
        start = i + 1;
      }
    std::size_t end = src_.find('\n', start);
    std::string excerpt = src_.substr(start, end == std::string::npos ? std::string::npos : end - start);
    for (char& ch : excerpt)
      if (!std::isprint(static_cast<unsigned char>(ch))) ch = ' ';
    throw ModelError(msg, line, pos - start + 1, excerpt);
  }

  std::string src_;
  std::vector<Token> toks_;
  std::size_t k_ = 0;
};

inline std::string render_words(const WordSum& w, const std::vector<std::string>& names) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [word, c] : w.terms()) {
    Rational a = abs(c);
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    first = false;
    bool star = false;
    if (a != 1 || word.empty()) {
      os << to_string(a);
      star = true;
    }
    for (std::size_t i = 0; i < word.size();) {
      std::size_t j = i;
      while (j < word.size() && word[j] == word[i]) ++j;
      if (star) os << "*";
      os << names[word[i]];
      if (j - i > 1) os << "^" << (j - i);
      star = true;
      i = j;
    }
  }
  return first ? "0" : os.str();
}

}  // namespace detail

inline ModelSpec parse_model(const std::string& text) { return detail::ModelParser(text).parse(); }

/// Canonical DSL text; parse_model(render_model(m)) == m.
inline std::string render_model(const ModelSpec& m) {
  std::ostringstream os;
  os << "dilation [";
  for (std::size_t i = 0; i < m.dilation.size(); ++i) os << (i ? ", " : "") << m.dilation[i];
  os << "];\n";
  for (std::size_t f = 0; f < m.fields.size(); ++f) {
    os << "field " << m.field_names[f] << " = ";
    bool first = true;
    for (std::size_t j = 0; j < m.dim(); ++j) {
      for (const auto& [mono, c] : m.fields[f][j].terms()) {
        Rational a = abs(c);
        os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
        first = false;
        if (a != 1) os << to_string(a) << "*";
        for (std::size_t i = 0; i < m.dim(); ++i) {
          if (mono[i] == 0) continue;
          os << "x" << i + 1;
          if (mono[i] > 1) os << "^" << mono[i];
          os << "*";
        }
        os << "d" << j + 1;
      }
    }
    os << ";\n";
  }
  for (const auto& o : m.operators) os << "operator " << o.name << " = " << detail::render_words(o.words, m.field_names) << ";\n";
  return os.str();
}

}  // namespace rockland
