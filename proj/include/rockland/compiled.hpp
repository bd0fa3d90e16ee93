#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rockland/polynomial.hpp"

namespace rockland {

/// Floating-point evaluator for a list of polynomials over the same variables.
/// Powers of each variable are computed once per call and shared by all components.
class CompiledMap {
 public:
  CompiledMap() = default;
  explicit CompiledMap(const std::vector<Polynomial>& polys) {
    nvars_ = polys.empty() ? 0 : polys.front().nvars();
    maxdeg_.assign(nvars_, 0);
    for (const auto& p : polys) {
      if (p.nvars() != nvars_) throw DimensionError("compiled map components live in different spaces");
      for (std::size_t i = 0; i < nvars_; ++i) maxdeg_[i] = std::max(maxdeg_[i], p.degree_in(i));
    }
    base_.assign(nvars_, 0);
    std::uint32_t off = 0;
    for (std::size_t i = 0; i < nvars_; ++i) {
      base_[i] = off;
      off += maxdeg_[i] + 1;
    }
    table_size_ = off;
    comp_begin_.push_back(0);
    for (const auto& p : polys) {
      for (const auto& [m, c] : p.terms()) {
        coef_.push_back(c.get_d());
        term_begin_.push_back(static_cast<std::uint32_t>(factors_.size()));
        for (std::size_t i = 0; i < nvars_; ++i)
          if (m[i] > 0) factors_.push_back(base_[i] + m[i]);
      }
      comp_begin_.push_back(static_cast<std::uint32_t>(coef_.size()));
    }
    term_begin_.push_back(static_cast<std::uint32_t>(factors_.size()));
  }

  std::size_t nvars() const { return nvars_; }
  std::size_t size() const { return comp_begin_.empty() ? 0 : comp_begin_.size() - 1; }

  void operator()(const double* x, double* out) const {
    constexpr std::size_t kStack = 256;
    std::array<double, kStack> stack_buf;
    std::vector<double> heap_buf;
    double* pw = stack_buf.data();
    if (table_size_ > kStack) {
      heap_buf.resize(table_size_);
      pw = heap_buf.data();
    }
    for (std::size_t i = 0; i < nvars_; ++i) {
      double* row = pw + base_[i];
      row[0] = 1.0;
      for (unsigned k = 1; k <= maxdeg_[i]; ++k) row[k] = row[k - 1] * x[i];
    }
    for (std::size_t c = 0; c + 1 < comp_begin_.size(); ++c) {
      double acc = 0.0;
      for (std::uint32_t t = comp_begin_[c]; t < comp_begin_[c + 1]; ++t) {
        double v = coef_[t];
        for (std::uint32_t f = term_begin_[t]; f < term_begin_[t + 1]; ++f) v *= pw[factors_[f]];
        acc += v;
      }
      out[c] = acc;
    }
  }

  std::vector<double> operator()(std::span<const double> x) const {
    if (x.size() != nvars_) throw DimensionError("compiled map evaluated at point of wrong dimension");
    std::vector<double> out(size());
    (*this)(x.data(), out.data());
    return out;
  }

 private:
  std::size_t nvars_ = 0;
  std::size_t table_size_ = 0;
  std::vector<unsigned> maxdeg_;
  std::vector<std::uint32_t> base_;
  std::vector<double> coef_;
  std::vector<std::uint32_t> term_begin_;
  std::vector<std::uint32_t> factors_;
  std::vector<std::uint32_t> comp_begin_;
};

/// Single-polynomial convenience wrapper.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Polynomial& p) : map_(std::vector<Polynomial>{p}) {}
  double operator()(const double* x) const {
    double out;
    map_(x, &out);
    return out;
  }
  double operator()(std::span<const double> x) const {
    if (x.size() != map_.nvars()) throw DimensionError("compiled polynomial evaluated at point of wrong dimension");
    return (*this)(x.data());
  }
  std::size_t nvars() const { return map_.nvars(); }

 private:
  CompiledMap map_;
};

}  // namespace rockland
