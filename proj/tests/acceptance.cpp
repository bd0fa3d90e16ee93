// One PASS/FAIL line per acceptance criterion on stdout; supporting numbers on stderr.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "rockland/cli.hpp"
#include "rockland/systems.hpp"

using namespace rockland;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Criterion {
  bool pass = true;
  std::ostringstream log;
  void check(bool ok, const std::string& what) {
    log << "    " << (ok ? "ok   " : "FAIL ") << what << "\n";
    pass = pass && ok;
  }
  void check(const CheckResult& c) {
    std::ostringstream s;
    s << c.name;
    if (c.residual) s << " residual " << std::setprecision(3) << *c.residual << " <= " << *c.tolerance;
    if (!c.detail.empty()) s << " (" << c.detail << ")";
    check(c.pass, s.str());
  }
};

/// Grushin pipeline shared by criteria 4, 5 and 7.
struct GrushinContext {
  VectorSystem sys = systems::grushin();
  LiftedSystem lifted = build_lifting(sys.fields, sys.dilation);
  OperatorSpec op = make_standard_operator(StandardOperator::sublaplacian_power, sys.fields, {1, 1});
  CalibrationResult cal = calibrated_sublaplacian_kernel(lifted, op);
  SaturationEvaluator ev{lifted, cal.kernel, 2};
  ControlSystem control{sys.fields, sys.dilation};
};

GrushinContext& grushin() {
  static GrushinContext ctx;
  return ctx;
}

std::vector<CheckResult>& fundsol_checks() {
  static std::vector<CheckResult> checks = fundsol_suite(grushin().ev, grushin().cal, grushin().op);
  return checks;
}

void dimensional_facts(Criterion& c) {
  auto timed = [&](const std::string& name, const std::function<void()>& body) {
    auto t = Clock::now();
    body();
    double s = seconds_since(t);
    c.check(s < 1.0, name + " in " + std::to_string(s) + " s");
  };
  timed("Grushin", [&] {
    auto s = systems::grushin();
    auto f = system_facts(s.fields, s.dilation);
    auto L = build_lifting(s.fields, s.dilation);
    c.check(f.degrees == std::vector<int>{1, 1} && f.q == 3 && L.N == 3 && L.p == 1 && L.Q == 4 && L.step == 2,
            "Grushin: nu = (1,1), q = 3, N = 3, p = 1, Q = 4, step 2");
  });
  timed("monomial shears", [&] {
    for (auto [k, h] : std::vector<std::pair<unsigned, unsigned>>{{1, 1}, {2, 1}, {1, 2}, {3, 2}, {2, 3}}) {
      auto s = systems::monomial_shear(k, h);
      auto f = system_facts(s.fields, s.dilation);
      c.check(f.degrees[1] == static_cast<int>(h) && f.q == static_cast<int>(k + h + 1),
              "X2 = x1^" + std::to_string(k) + " d2, h = " + std::to_string(h) + ": nu2 = h, q = k + h + 1");
    }
  });
  timed("chain on R^5", [&] {
    auto s = systems::chain(5);
    auto f = system_facts(s.fields, s.dilation);
    // hand brackets: X1, X2, [X1,X2], [X1,[X1,X2]], [X1,[X1,[X1,X2]]], [X1,[X1,[X1,[X1,X2]]]] are independent
    c.check(f.q == 15 && f.N == 6 && f.step == 5, "chain(5): q = 15, N = 6, step 5");
  });
  timed("quartic shear family", [&] {
    for (unsigned k = 1; k <= 4; ++k) {
      auto s = systems::monomial_shear(k, 1);
      int q = s.dilation.homogeneous_dimension();
      bool refused = false;
      try {
        require_global_existence(4, q);
      } catch (const HypothesisError&) {
        refused = true;
      }
      c.check(q == static_cast<int>(k) + 2 && refused == (k <= 2),
              "k = " + std::to_string(k) + ": q = k + 2, gamma gate " + (refused ? "refuses" : "admits"));
    }
  });
}

void lifting_structure(Criterion& c) {
  auto t = Clock::now();
  for (auto [name, s] : std::vector<std::pair<std::string, VectorSystem>>{{"Grushin", systems::grushin()},
                                                                          {"quadratic chain k=1", systems::quadratic_chain(1)}}) {
    auto L = build_lifting(s.fields, s.dilation);
    auto op = make_standard_operator(StandardOperator::sublaplacian_power, s.fields, {1, 1});
    for (const auto& r : lifting_suite(L, {op}, 5, 20)) {
      if (r.name.rfind("saturable", 0) == 0) continue;
      CheckResult named = r;
      named.name = name + ": " + r.name;
      c.check(named);
    }
  }
  double s = seconds_since(t);
  c.check(s < 30.0, "suite time " + std::to_string(s) + " s");
}

void saturable(Criterion& c) {
  auto s = systems::grushin();
  auto L = build_lifting(s.fields, s.dilation);
  auto sub = make_standard_operator(StandardOperator::sublaplacian_power, s.fields, {1, 1});
  auto quartic = make_standard_operator(StandardOperator::sum_of_even_powers, s.fields, {1, 1}, {.nu0 = 2});
  for (auto [name, op] : std::vector<std::pair<std::string, OperatorSpec>>{{"X1^2 + X2^2", sub}, {"X1^4 + X2^4", quartic}}) {
    auto rep = saturable_check(op, L);
    c.check(rep.s1, name + ": every summand of the transposed residual differentiates in xi (" + std::to_string(rep.terms.size()) + " summands)");
    c.check(rep.degree_bound, name + ": xi-degree of each coefficient below the weighted xi-order of its derivative");
  }
}

void fundamental_solution(Criterion& c) {
  for (const auto& r : fundsol_checks())
    if (r.name.rfind("derivative", 0) != 0) c.check(r);
}

void derivatives(Criterion& c) {
  for (const auto& r : fundsol_checks())
    if (r.name.rfind("derivative", 0) == 0) c.check(r);
}

void metric(Criterion& c) {
  auto& g = grushin();
  const auto& sys = g.control;
  std::vector<double> o{0, 0};
  auto d = distance(sys, o, std::vector<double>{1, 0});
  c.check(std::abs(d.upper - 1.0) <= 1e-3, "d((0,0),(1,0)) = " + std::to_string(d.upper));

  std::vector<double> lams{0.25, 0.5, 1, 2, 4}, ds;
  for (double lam : lams) ds.push_back(distance(sys, o, std::vector<double>{0.4 * lam, 0.3 * lam * lam}).upper);
  double expo = loglog_slope(lams, ds);
  c.check(std::abs(expo - 1.0) <= 0.05, "origin scaling exponent " + std::to_string(expo));

  std::vector<double> radii, vols;
  for (int k = -4; k <= 2; ++k) {
    radii.push_back(std::ldexp(1.0, k));
    vols.push_back(ball_volume(sys, o, radii.back(), 1500, 11 + static_cast<std::uint64_t>(k + 4)).estimate);
  }
  double slope = loglog_slope(radii, vols);
  c.check(std::abs(slope - 3.0) <= 0.15, "volume slope at the origin " + std::to_string(slope) + ", q = 3");

  std::vector<double> dr;
  for (int k : {-4, -2, 0, 2, 3}) dr.push_back(std::ldexp(1.0, k));
  for (const auto& x : {std::vector<double>{0, 0}, std::vector<double>{1, 0}}) {
    auto db = doubling_check(sys, x, dr, 1000, 5);
    double lo = *std::min_element(db.ratios.begin(), db.ratios.end());
    std::ostringstream s;
    s << "doubling at (" << x[0] << "," << x[1] << "), r in [2^-4, 2^3]: ratios";
    for (double r : db.ratios) s << " " << std::setprecision(3) << r;
    c.check(std::isfinite(db.max_ratio) && db.max_ratio <= 10.0 && db.max_ratio / lo <= 2.5, s.str());
  }

  std::vector<double> mult;
  for (double r : {0.5, 1.0, 2.0}) mult.push_back(fractional_integral_check(sys, o, r, 1.0, 300, 9).multiple);
  double spread = *std::max_element(mult.begin(), mult.end()) / *std::min_element(mult.begin(), mult.end());
  std::ostringstream s;
  s << "fractional integral / r at r = 1/2, 1, 2:";
  for (double m : mult) s << " " << std::setprecision(4) << m;
  c.check(spread <= 1.3, s.str());
}

void estimates(Criterion& c) {
  auto& g = grushin();
  std::vector<PointPair> pairs{{{0.5, 0.2}, {-0.3, 0.1}},
                               {{0.0, 0.0}, {0.7, -0.4}},
                               {{0.2, -0.5}, {0.1, 0.3}},
                               {{-0.6, 0.3}, {-0.5, -0.2}},
                               {{1.0, 0.0}, {0.4, 0.4}}};
  EstimateScanConfig cfg;
  cfg.scales = {0.125, 0.25, 0.5, 1, 2, 4, 8, 16};
  cfg.volume_samples = 400;
  auto scan = estimate_scan(g.ev, g.control, 1, pairs, cfg);
  std::ostringstream s;
  s << "r = 1: sup " << std::setprecision(4) << scan.sup << ", max/min over scales 2^-3..2^4 = " << scan.spread;
  c.check(std::isfinite(scan.sup) && scan.spread < 2.0, s.str());

  auto compact = random_pairs(2, 20, 2.0, 0.05, 4);
  for (int k = 1; k <= 6; ++k) {
    double l = std::ldexp(1.0, -k);
    compact.push_back({{0.5, 0.5}, {0.5 + l, 0.5 - l * l}});
    compact.push_back({{0.0, 0.0}, {l, l * l}});
  }
  EstimateScanConfig ccfg;
  ccfg.scales = {1.0};
  ccfg.volume_samples = 400;
  auto crit = estimate_scan(g.ev, g.control, 0, compact, ccfg);
  double far = 0, near = 0;
  for (const auto& row : crit.rows) {
    double& slot = row.distance < 0.1 ? near : far;
    slot = std::max(slot, row.ratio);
  }
  std::ostringstream t;
  t << "r = 0 on [-2,2]^2: log-corrected sup " << std::setprecision(4) << crit.sup << " (d < 0.1: " << near
    << ", otherwise " << far << ")";
  c.check(std::isfinite(crit.sup) && near <= 2.0 * far, t.str());
}

void heat(Criterion& c) {
  auto s = systems::grushin();
  auto L = make_standard_operator(StandardOperator::sum_of_even_powers, s.fields, {1, 1}, {.nu0 = 2});
  auto h = heat_extend(L, s.dilation, 1);
  auto degrees = certify_system(h.op.fields(), h.dilation);
  c.check(h.op.nu() == 4 && degrees.back() == 4, "extended operator homogeneous of degree 4 under the extended dilations");
  c.check(h.dilation[h.t_index] == 4, "t exponent 4");
  int q = s.dilation.homogeneous_dimension(), qp = h.dilation.homogeneous_dimension();
  c.check(qp == q + 4, "q' = " + std::to_string(qp) + " = q + 4");
  c.check(classify_positive_rockland_pattern(L), "spatial part accepted by the positive Rockland pattern");
}

void negative_gates(Criterion& c) {
  auto s = systems::monomial_shear(2, 1);
  auto L = build_lifting(s.fields, s.dilation);
  KernelSpec dummy;
  dummy.dim = L.N;
  dummy.homogeneity_degree = 4 - L.Q;
  std::string msg;
  try {
    SaturationEvaluator bad(L, dummy, 4);
  } catch (const HypothesisError& e) {
    msg = e.what();
  }
  c.check(msg.find("existence theorem") != std::string::npos && msg.find("nu < q") != std::string::npos,
          "gamma refuses nu = 4 >= q = 4: " + msg);

  std::vector<Polynomial> c1(2, Polynomial(2));
  c1[0] = Polynomial::variable(2, 0);
  PolyVectorField X(c1);
  OperatorSpec op({X, PolyVectorField::coordinate(2, 1)}, {1, 1}, WordSum::word({0, 0}) + WordSum::word({1, 1}));
  std::string tmsg;
  try {
    operator_transpose(op);
  } catch (const HypothesisError& e) {
    tmsg = e.what();
  }
  c.check(tmsg.find("divergence") != std::string::npos, "transpose refuses x1 d1: " + tmsg);
}

}  // namespace

int main() {
  struct Item {
    const char* name;
    void (*run)(Criterion&);
  };
  const Item items[] = {{"dimensional facts of the example systems", dimensional_facts},
                        {"lifting structural suite", lifting_structure},
                        {"saturable lifting suite", saturable},
                        {"fundamental-solution identities", fundamental_solution},
                        {"derivative formulas", derivatives},
                        {"metric suite", metric},
                        {"estimate harness", estimates},
                        {"heat extension", heat},
                        {"negative gates", negative_gates}};
  bool all = true;
  int k = 0;
  for (const auto& it : items) {
    ++k;
    Criterion c;
    auto t = Clock::now();
    try {
      it.run(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    double s = seconds_since(t);
    std::cerr << "criterion " << k << " (" << it.name << "), " << std::fixed << std::setprecision(1) << s << " s\n"
              << c.log.str() << std::defaultfloat;
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << k << ". " << it.name << std::endl;
    all = all && c.pass;
  }
  return all ? 0 : 1;
}
