#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rockland/compiled.hpp"
#include "rockland/flows.hpp"

namespace rockland {

struct ControlSegment {
  double duration = 0;            ///< fraction of the unit time interval
  std::vector<double> controls;   ///< a_1..a_m, constant on the segment
};

/// Piecewise-constant control with durations summing to one; |a_i| <= delta^nu_i.
struct ControlPath {
  std::vector<ControlSegment> segments;
  double delta = 0;
};

/// Exact polynomial flows of sum_i a_i X_i and their derivatives, compiled for floats.
class ControlSystem {
 public:
  ControlSystem(const std::vector<PolyVectorField>& fields, const DilationFamily& delta)
      : fields_(fields), dilation_(delta), nu_(certify_system(fields, delta)) {
    n_ = delta.dim();
    m_ = fields.size();
    std::size_t M = n_ + m_;
    std::vector<Polynomial> coeffs(n_, Polynomial(M));
    for (std::size_t i = 0; i < m_; ++i) {
      Polynomial ai = Polynomial::variable(M, n_ + i);
      for (std::size_t j = 0; j < n_; ++j)
        if (!fields[i][j].is_zero()) coeffs[j] += ai * embed(fields[i][j], M);
    }
    flow_poly_ = lie_series_flow(coeffs, delta.exponents());
    std::vector<Polynomial> all = flow_poly_;
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < M; ++k) all.push_back(flow_poly_[j].diff(k));
    flow_ = CompiledMap(all);
    value_only_ = CompiledMap(flow_poly_);
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  const std::vector<int>& degrees() const { return nu_; }
  const DilationFamily& dilation() const { return dilation_; }
  const std::vector<PolyVectorField>& fields() const { return fields_; }
  /// Time-one flow of sum_i a_i X_i as polynomials in (x, a).
  const std::vector<Polynomial>& flow_polynomials() const { return flow_poly_; }

  /// out = G(x, a); jac (row-major n x (n+m)) = dG/d(x, a) when non-null.
  void flow(const double* x, const double* a, double* out, double* jac) const {
    std::vector<double> in(x, x + n_);
    in.insert(in.end(), a, a + m_);
    if (!jac) {
      value_only_(in.data(), out);
      return;
    }
    std::vector<double> all(n_ + n_ * (n_ + m_));
    flow_(in.data(), all.data());
    std::copy(all.begin(), all.begin() + static_cast<long>(n_), out);
    std::copy(all.begin() + static_cast<long>(n_), all.end(), jac);
  }

  std::vector<double> endpoint(std::span<const double> x, const ControlPath& path) const {
    if (x.size() != n_) throw DimensionError("start point has wrong dimension");
    std::vector<double> cur(x.begin(), x.end()), nxt(n_), a(m_);
    for (const auto& s : path.segments) {
      if (s.controls.size() != m_) throw DimensionError("control vector has wrong length");
      for (std::size_t i = 0; i < m_; ++i) a[i] = s.duration * s.controls[i];
      flow(cur.data(), a.data(), nxt.data(), nullptr);
      cur.swap(nxt);
    }
    return cur;
  }

  /// Half-widths B_j with |gamma_j(t) - x_j| <= B_j for every path of scale delta: coordinates in
  /// increasing weight, B_j = sum_i delta^nu_i sup over the box of lower coordinates of |X_i^j|.
  std::vector<double> box_half_widths(std::span<const double> x, double delta) const {
    std::vector<std::size_t> order(n_);
    for (std::size_t j = 0; j < n_; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dilation_[a] < dilation_[b]; });
    std::vector<double> B(n_, 0.0), mag(n_);
    for (std::size_t j : order) {
      for (std::size_t k = 0; k < n_; ++k) mag[k] = std::abs(x[k]) + B[k];
      double s = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        double sup = 0;
        for (const auto& [mono, c] : fields_[i][j].terms()) {
          double t = std::abs(c.get_d());
          for (std::size_t k = 0; k < n_; ++k)
            if (mono[k] > 0) t *= std::pow(mag[k], mono[k]);
          sup += t;
        }
        s += std::pow(delta, nu_[i]) * sup;
      }
      B[j] = s;
    }
    return B;
  }

  bool outside_box(std::span<const double> x, std::span<const double> y, double delta) const {
    auto B = box_half_widths(x, delta);
    for (std::size_t j = 0; j < n_; ++j)
      if (std::abs(y[j] - x[j]) > B[j]) return true;
    return false;
  }

 private:
  std::vector<PolyVectorField> fields_;
  DilationFamily dilation_;
  std::vector<int> nu_;
  std::size_t n_ = 0, m_ = 0;
  std::vector<Polynomial> flow_poly_;
  CompiledMap flow_, value_only_;
};

inline std::vector<double> endpoint(std::span<const double> x, const ControlPath& path, const ControlSystem& sys) {
  return sys.endpoint(x, path);
}

struct DistanceConfig {
  double tol = 1e-3;         ///< relative bracket width upper - lower <= tol * upper
  double feas_tol = 1e-7;    ///< endpoint error per coordinate, in units of delta^sigma_j
  std::vector<int> segments{4, 8, 16};
  int starts = 4;
  int max_iter = 150;
  std::uint64_t seed = 7;
};

struct DistanceResult {
  double upper = 0;
  double lower = 0;            ///< search certificate: no feasible path found below
  double certified_lower = 0;  ///< from the box bound, a true lower bound
  ControlPath path;
  bool stagnated = false;
  std::uint64_t seed = 0;
};

/// Decides whether y is reachable from x by a path of scale delta (local optimization, multi-start).
class FeasibilitySolver {
 public:
  FeasibilitySolver(const ControlSystem& sys, DistanceConfig cfg) : sys_(sys), cfg_(std::move(cfg)) {}

  const DistanceConfig& config() const { return cfg_; }

  std::optional<ControlPath> solve(std::span<const double> x, std::span<const double> y, double delta,
                                   std::uint64_t stream = 0) {
    if (delta <= 0) return std::nullopt;
    if (sys_.outside_box(x, y, delta)) return std::nullopt;
    std::mt19937_64 rng(cfg_.seed ^ (stream * 0x9E3779B97F4A7C15ull));
    std::uniform_real_distribution<double> u(-M_PI / 2, M_PI / 2);
    for (int K : cfg_.segments) {
      std::size_t P = static_cast<std::size_t>(K) * sys_.m();
      auto warm = warm_start(K);
      for (int s = 0; s <= cfg_.starts; ++s) {
        Eigen::VectorXd th(static_cast<long>(P));
        if (s == 0) {
          if (!warm) continue;
          th = *warm;
        } else {
          for (long i = 0; i < th.size(); ++i) th[i] = u(rng);
        }
        if (minimize(x, y, delta, K, th)) {
          warm_[K] = th;
          return make_path(delta, K, th);
        }
      }
    }
    return std::nullopt;
  }

  void clear_warm_starts() { warm_.clear(); }

 private:
  /// Last successful angles at K segments, or the finest coarser solution repeated to K segments.
  std::optional<Eigen::VectorXd> warm_start(int K) const {
    std::size_t m = sys_.m();
    for (auto it = warm_.rbegin(); it != warm_.rend(); ++it) {
      int K0 = it->first;
      if (K0 > K || K % K0 != 0) continue;
      Eigen::VectorXd th(static_cast<long>(K * m));
      int rep = K / K0;
      for (int k = 0; k < K; ++k)
        for (std::size_t i = 0; i < m; ++i)
          th[static_cast<long>(k * m + i)] = it->second[static_cast<long>((k / rep) * m + i)];
      return th;
    }
    return std::nullopt;
  }

  ControlPath make_path(double delta, int K, const Eigen::VectorXd& th) const {
    ControlPath p;
    p.delta = delta;
    std::size_t m = sys_.m();
    for (int k = 0; k < K; ++k) {
      ControlSegment seg;
      seg.duration = 1.0 / K;
      for (std::size_t i = 0; i < m; ++i)
        seg.controls.push_back(std::pow(delta, sys_.degrees()[i]) * std::sin(th[static_cast<long>(k * m + i)]));
      p.segments.push_back(seg);
    }
    return p;
  }

  /// Scaled residual and its Jacobian with respect to the angles.
  double residual(std::span<const double> x, std::span<const double> y, double delta, int K, const Eigen::VectorXd& th,
                  Eigen::VectorXd& r, Eigen::MatrixXd* J) const {
    std::size_t n = sys_.n(), m = sys_.m();
    long P = th.size();
    std::vector<double> cur(x.begin(), x.end()), nxt(n), a(m), jac(n * (n + m));
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<long>(n), P);
    double s = 1.0 / K;
    std::vector<double> scale(m);
    for (std::size_t i = 0; i < m; ++i) scale[i] = std::pow(delta, sys_.degrees()[i]);
    for (int k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < m; ++i) a[i] = s * scale[i] * std::sin(th[static_cast<long>(k * m + i)]);
      sys_.flow(cur.data(), a.data(), nxt.data(), J ? jac.data() : nullptr);
      if (J) {
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> G(
            jac.data(), static_cast<long>(n), static_cast<long>(n + m));
        Eigen::MatrixXd Dn = G.leftCols(static_cast<long>(n)) * D;
        for (std::size_t i = 0; i < m; ++i) {
          long col = static_cast<long>(k * m + i);
          Dn.col(col) += G.col(static_cast<long>(n + i)) * (s * scale[i] * std::cos(th[col]));
        }
        D = std::move(Dn);
      }
      cur.swap(nxt);
    }
    r.resize(static_cast<long>(n));
    for (std::size_t j = 0; j < n; ++j) {
      double w = std::pow(delta, sys_.dilation()[j]);
      r[static_cast<long>(j)] = (cur[j] - y[j]) / w;
      if (J) D.row(static_cast<long>(j)) /= w;
    }
    if (J) *J = std::move(D);
    return r.lpNorm<Eigen::Infinity>();
  }

  bool minimize(std::span<const double> x, std::span<const double> y, double delta, int K, Eigen::VectorXd& th) const {
    Eigen::VectorXd r, rn;
    Eigen::MatrixXd J;
    double err = residual(x, y, delta, K, th, r, &J);
    double cost = r.squaredNorm();
    double lambda = 1e-2;
    int stall = 0;
    for (int it = 0; it < cfg_.max_iter && err > cfg_.feas_tol; ++it) {
      Eigen::MatrixXd A = J.transpose() * J;
      Eigen::VectorXd g = J.transpose() * r;
      A.diagonal().array() += lambda;
      Eigen::VectorXd step = A.ldlt().solve(-g);
      Eigen::VectorXd trial = th + step;
      double terr = residual(x, y, delta, K, trial, rn, nullptr);
      double tcost = rn.squaredNorm();
      if (tcost < cost) {
        bool small = tcost > cost * (1 - 1e-6);
        th = trial;
        err = residual(x, y, delta, K, th, r, &J);
        (void)terr;
        cost = tcost;
        lambda = std::max(lambda / 3, 1e-12);
        stall = small ? stall + 1 : 0;
      } else {
        lambda *= 4;
        ++stall;
      }
      if (stall > 12 || lambda > 1e12) break;
    }
    return err <= cfg_.feas_tol;
  }

  const ControlSystem& sys_;
  DistanceConfig cfg_;
  std::map<int, Eigen::VectorXd> warm_;
};

/// Largest delta at which y lies outside the reachable box, by bisection (monotone in delta).
inline double box_lower_bound(const ControlSystem& sys, std::span<const double> x, std::span<const double> y) {
  double hi = 1.0;
  int guard = 0;
  while (sys.outside_box(x, y, hi) && guard++ < 200) hi *= 2;
  double lo = hi;
  guard = 0;
  while (!sys.outside_box(x, y, lo) && guard++ < 200) lo /= 2;
  if (!sys.outside_box(x, y, lo)) return 0.0;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (sys.outside_box(x, y, mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

inline DistanceResult distance(const ControlSystem& sys, std::span<const double> x, std::span<const double> y,
                               const DistanceConfig& cfg = {}) {
  if (!(cfg.tol > 0)) throw DimensionError("distance tolerance must be positive");
  DistanceResult res;
  res.seed = cfg.seed;
  bool same = true;
  for (std::size_t j = 0; j < sys.n(); ++j) same = same && x[j] == y[j];
  if (same) {
    res.path.delta = 0;
    return res;
  }
  FeasibilitySolver solver(sys, cfg);
  res.certified_lower = box_lower_bound(sys, x, y);
  double lower = res.certified_lower;
  double d = std::max(lower * (1 + 1e-9), 1e-12);
  std::optional<ControlPath> path;
  for (int guard = 0; guard < 80; ++guard) {
    path = solver.solve(x, y, d);
    if (path) break;
    lower = d;
    d *= guard == 0 ? 1 + cfg.tol / 2 : 1.5;
  }
  if (!path) {
    res.stagnated = true;
    res.lower = lower;
    res.upper = std::numeric_limits<double>::infinity();
    return res;
  }
  double upper = d;
  ControlPath best = *path;
  for (int it = 0; it < 200 && upper - lower > cfg.tol * upper; ++it) {
    double mid = 0.5 * (lower + upper);
    auto p = solver.solve(x, y, mid);
    if (p) {
      upper = mid;
      best = *p;
    } else {
      lower = mid;
    }
  }
  res.upper = upper;
  res.lower = lower;
  res.path = best;
  return res;
}

struct VolumeResult {
  double estimate = 0;
  double lo = 0, hi = 0;  ///< 95% Wilson interval
  long samples = 0;
  long inside = 0;
  std::uint64_t seed = 0;
  double box_volume = 0;
};

/// Wilson score interval for a binomial proportion at 95%.
inline std::pair<double, double> wilson_interval(long k, long n) {
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  double p = static_cast<double>(k) / n, z2n = z * z / n;
  double center = (p + z2n / 2) / (1 + z2n);
  double half = z * std::sqrt(p * (1 - p) / n + z2n / (4.0 * n)) / (1 + z2n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Monte Carlo over the reachable box of scale r; membership is feasibility at r (1 + 3 tol),
/// so boundary points are biased toward being counted.
inline VolumeResult ball_volume(const ControlSystem& sys, std::span<const double> x, double r, long n_samples,
                                std::uint64_t seed, const DistanceConfig& cfg = {.starts = 1}) {
  if (!(r > 0)) throw DimensionError("ball radius must be positive");
  VolumeResult v;
  v.samples = n_samples;
  v.seed = seed;
  auto B = sys.box_half_widths(x, r);
  v.box_volume = 1.0;
  for (double b : B) v.box_volume *= 2 * b;
  FeasibilitySolver solver(sys, cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double rr = r * (1 + 3 * cfg.tol);
  std::vector<double> y(sys.n());
  for (long s = 0; s < n_samples; ++s) {
    for (std::size_t j = 0; j < sys.n(); ++j) y[j] = x[j] + B[j] * u(rng);
    if (solver.solve(x, y, rr, static_cast<std::uint64_t>(s))) ++v.inside;
  }
  auto [plo, phi] = wilson_interval(v.inside, n_samples);
  v.estimate = v.box_volume * static_cast<double>(v.inside) / static_cast<double>(n_samples);
  v.lo = v.box_volume * plo;
  v.hi = v.box_volume * phi;
  return v;
}

struct DoublingResult {
  std::vector<double> radii;
  std::vector<double> ratios, ratio_lo, ratio_hi;
  double max_ratio = 0;
};

inline DoublingResult doubling_check(const ControlSystem& sys, std::span<const double> x,
                                     const std::vector<double>& radii, long n_samples, std::uint64_t seed,
                                     const DistanceConfig& cfg = {.starts = 1}) {
  DoublingResult d;
  d.radii = radii;
  for (double r : radii) {
    auto a = ball_volume(sys, x, r, n_samples, seed, cfg);
    auto b = ball_volume(sys, x, 2 * r, n_samples, seed + 1, cfg);
    double ratio = b.estimate / a.estimate;
    d.ratios.push_back(ratio);
    d.ratio_lo.push_back(b.lo / a.hi);
    d.ratio_hi.push_back(a.lo > 0 ? b.hi / a.lo : std::numeric_limits<double>::infinity());
    d.max_ratio = std::max(d.max_ratio, ratio);
  }
  return d;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// |B(x, s)| for s in (0, r], from Monte Carlo estimates at dyadic radii, log-log interpolated.
class VolumeCurve {
 public:
  VolumeCurve(const ControlSystem& sys, std::span<const double> x, double r, int levels, long n_samples,
              std::uint64_t seed, const DistanceConfig& cfg = {.starts = 1}) {
    for (int k = levels - 1; k >= 0; --k) {
      double s = r * std::pow(2.0, -k);
      auto v = ball_volume(sys, x, s, n_samples, seed + static_cast<std::uint64_t>(k), cfg);
      radii_.push_back(s);
      vols_.push_back(std::max(v.estimate, 1e-300));
    }
    slope_ = radii_.size() > 1 ? loglog_slope(radii_, vols_) : 0.0;
  }
  double operator()(double s) const {
    if (s <= radii_.front()) return vols_.front() * std::pow(s / radii_.front(), slope_);
    if (s >= radii_.back()) return vols_.back() * std::pow(s / radii_.back(), slope_);
    auto it = std::upper_bound(radii_.begin(), radii_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - radii_.begin());
    double t = std::log(s / radii_[i - 1]) / std::log(radii_[i] / radii_[i - 1]);
    return std::exp((1 - t) * std::log(vols_[i - 1]) + t * std::log(vols_[i]));
  }
  double slope() const { return slope_; }

 private:
  std::vector<double> radii_, vols_;
  double slope_ = 0;
};

struct FractionalIntegralResult {
  double integral = 0;
  double multiple = 0;  ///< integral / r^alpha
  long samples = 0;
  long inside = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate of int_{d(x,y) < r} d(x,y)^alpha / |B(x, d(x,y))| dy.
inline FractionalIntegralResult fractional_integral_check(const ControlSystem& sys, std::span<const double> x, double r,
                                                          double alpha, long n_samples, std::uint64_t seed,
                                                          const DistanceConfig& cfg = {1e-2}) {
  if (!(alpha > 0)) throw DimensionError("alpha must be positive");
  FractionalIntegralResult out;
  out.samples = n_samples;
  out.seed = seed;
  if (r <= 0) return out;
  VolumeCurve vol(sys, x, r, 6, std::max<long>(200, n_samples / 2), seed + 1000, cfg);
  auto B = sys.box_half_widths(x, r);
  double box = 1.0;
  for (double b : B) box *= 2 * b;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> y(sys.n());
  double acc = 0;
  for (long s = 0; s < n_samples; ++s) {
    for (std::size_t j = 0; j < sys.n(); ++j) y[j] = x[j] + B[j] * u(rng);
    DistanceConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(s);
    FeasibilitySolver probe(sys, c);
    if (!probe.solve(x, y, r * (1 + 3 * cfg.tol))) continue;
    auto d = distance(sys, x, y, c);
    if (!(d.upper < r) || d.upper <= 0) continue;
    ++out.inside;
    acc += std::pow(d.upper, alpha) / vol(d.upper);
  }
  out.integral = box * acc / static_cast<double>(n_samples);
  out.multiple = out.integral / std::pow(r, alpha);
  return out;
}

}  // namespace rockland
