#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rockland/fundsol.hpp"
#include "rockland/metric.hpp"

namespace rockland {

struct EstimateRow {
  std::vector<double> x, y;
  MultiIndex word;
  double scale = 1;
  double distance = 0;
  double volume = 0;
  double derivative = 0;
  double ratio = 0;
};

struct EstimateScanConfig {
  std::vector<double> scales{0.125, 0.25, 0.5, 1, 2, 4, 8, 16};
  long volume_samples = 600;
  std::uint64_t seed = 21;
  DistanceConfig distance{.tol = 1e-3};
  DistanceConfig membership{.starts = 1};
};

struct EstimateScan {
  int order = 0;
  bool critical = false;
  double R0 = 0;  ///< critical branch only
  std::vector<EstimateRow> rows;
  std::vector<double> scales, sup_by_scale;
  double sup = 0;
  double spread = 0;  ///< max over scales of the sup divided by the min
  std::uint64_t seed = 0;
};

/// All words over the generators whose degrees sum to r.
inline std::vector<MultiIndex> words_of_weight(const std::vector<int>& degrees, int r) {
  std::vector<MultiIndex> out;
  if (r == 0) return {MultiIndex{}};
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] > r) continue;
    for (auto w : words_of_weight(degrees, r - degrees[i])) {
      w.insert(w.begin(), i);
      out.push_back(std::move(w));
    }
  }
  return out;
}

/// Scans |Z_I Gamma(x, y)| |B(x, d)| / d^(nu - r) over words of weight r, or for r = nu - n the
/// log-corrected |Z_I Gamma| / (d^n / |B| log(R0 / d)) with R0 = e max d. Each base pair is
/// transported by the dilations at every requested scale.
inline EstimateScan estimate_scan(const SaturationEvaluator& ev, const ControlSystem& sys, int r,
                                  const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
                                  const EstimateScanConfig& cfg = {}) {
  const auto& L = ev.lifted();
  int n = static_cast<int>(L.n);
  int nu = ev.nu();
  if (r < nu - n)
    throw HypothesisError("the pointwise estimates on Gamma need r >= nu - n; here r = " + std::to_string(r) +
                          ", nu - n = " + std::to_string(nu - n));
  EstimateScan scan;
  scan.order = r;
  scan.critical = r == nu - n;
  scan.scales = cfg.scales;
  scan.seed = cfg.seed;
  const auto& sigma = L.base_dilation.exponents();
  auto words = words_of_weight(sys.degrees(), r);
  std::uint64_t stream = 0;
  for (double lam : cfg.scales) {
    for (const auto& [x0, y0] : pairs) {
      std::vector<double> x(x0), y(y0);
      for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] *= std::pow(lam, sigma[j]);
        y[j] *= std::pow(lam, sigma[j]);
      }
      double d = distance(sys, x, y, cfg.distance).upper;
      double vol = ball_volume(sys, x, d, cfg.volume_samples, cfg.seed + stream++, cfg.membership).estimate;
      for (const auto& w : words) {
        EstimateRow row;
        row.x = x;
        row.y = y;
        row.word = w;
        row.scale = lam;
        row.distance = d;
        row.volume = vol;
        row.derivative = ev.x_derivative(w, x, y).value;
        scan.rows.push_back(std::move(row));
      }
    }
  }
  if (scan.critical) {
    double dmax = 0;
    for (const auto& row : scan.rows) dmax = std::max(dmax, row.distance);
    scan.R0 = std::exp(1.0) * dmax;
  }
  for (auto& row : scan.rows) {
    double a = std::abs(row.derivative);
    if (scan.critical)
      row.ratio = a / (std::pow(row.distance, n) / row.volume * std::log(scan.R0 / row.distance));
    else
      row.ratio = a * row.volume / std::pow(row.distance, nu - r);
  }
  for (double lam : cfg.scales) {
    double s = 0;
    for (const auto& row : scan.rows)
      if (row.scale == lam) s = std::max(s, row.ratio);
    scan.sup_by_scale.push_back(s);
  }
  scan.sup = *std::max_element(scan.sup_by_scale.begin(), scan.sup_by_scale.end());
  double lo = *std::min_element(scan.sup_by_scale.begin(), scan.sup_by_scale.end());
  scan.spread = lo > 0 ? scan.sup / lo : std::numeric_limits<double>::infinity();
  return scan;
}

}  // namespace rockland
