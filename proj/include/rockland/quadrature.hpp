#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "rockland/errors.hpp"

namespace rockland {

struct QuadratureConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  int intervals = 0;
  bool converged = true;

  QuadratureResult& operator+=(const QuadratureResult& o) {
    value += o.value;
    error += o.error;
    evaluations += o.evaluations;
    intervals += o.intervals;
    converged = converged && o.converged;
    return *this;
  }
};

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                               0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                               0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                               0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                               0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double kron = fc * kWgk[7], gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[static_cast<std::size_t>(j)];
    double f1 = f(c - dx), f2 = f(c + dx);
    kron += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 15 on [a, b], bisecting the worst segment until the error target is met.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  QuadratureResult r;
  if (a == b) return r;
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  heap.push(first);
  r.evaluations = 15;
  double total = first.value, err = first.error;
  int subdivisions = 0;
  while (err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (subdivisions >= cfg.max_subdivisions) {
      r.converged = false;
      break;
    }
    auto worst = heap.top();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      r.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::gk15(f, worst.a, mid), right = detail::gk15(f, mid, worst.b);
    r.evaluations += 30;
    ++subdivisions;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum the final partition in interval order for reproducible rounding.
  std::vector<detail::Segment> segs;
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  r.value = 0;
  r.error = 0;
  for (const auto& s : segs) {
    r.value += s.value;
    r.error += s.error;
  }
  r.intervals = static_cast<int>(segs.size());
  return r;
}

/// Integral over [a, b] split at the given interior breakpoints.
template <class F>
QuadratureResult integrate_pieces(F&& f, std::vector<double> breaks, const QuadratureConfig& cfg = {}) {
  std::sort(breaks.begin(), breaks.end());
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) total += integrate_adaptive(f, breaks[i], breaks[i + 1], cfg);
  return total;
}

/// Iterated adaptive integration over a box; the innermost variable is the last one.
/// `bounds(level, prefix)` returns the interval of variable `level` given the outer values.
inline QuadratureResult integrate_nested(
    const std::function<double(const std::vector<double>&)>& f, std::size_t dim,
    const std::function<std::pair<double, double>(std::size_t, const std::vector<double>&)>& bounds,
    const std::vector<QuadratureConfig>& cfg) {
  if (cfg.size() != dim) throw DimensionError("one quadrature configuration per level required");
  std::vector<double> z(dim);
  QuadratureResult stats;
  std::function<double(std::size_t)> level = [&](std::size_t l) -> double {
    std::vector<double> prefix(z.begin(), z.begin() + static_cast<long>(l));
    auto [a, b] = bounds(l, prefix);
    auto inner = [&](double t) {
      z[l] = t;
      return l + 1 == dim ? f(z) : level(l + 1);
    };
    auto r = integrate_adaptive(inner, a, b, cfg[l]);
    if (l + 1 == dim) stats.evaluations += r.evaluations;
    if (!r.converged) stats.converged = false;
    if (l == 0) {
      stats.value = r.value;
      stats.error = r.error;
      stats.intervals = r.intervals;
    }
    return r.value;
  };
  level(0);
  return stats;
}

}  // namespace rockland
