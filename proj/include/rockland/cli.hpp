#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rockland/model.hpp"
#include "rockland/suites.hpp"

namespace rockland {

struct CliOptions {
  std::string model_path;
  std::string op_name;                  ///< empty: first operator of the model
  std::optional<double> tol;            ///< distance bracket tolerance; also overrides verify tolerances
  std::uint64_t seed = 7;
  long samples = 2000;
  std::string json_path;
  std::string csv_path;
  std::vector<std::string> at;          ///< "x1,x2;y1,y2" or "x1,x2"
  std::vector<double> radii;            ///< ballvol radii
  std::vector<std::string> words;       ///< derivative words for gamma, "1,2" means X1 X2
  int heat_sign = 1;
  bool skip_left_inverse = false;
};

/// Default values recorded verbatim in every report.
inline Report::Json settings_json(const CliOptions& o) {
  Report::Json s;
  s["model"] = o.model_path;
  s["operator"] = o.op_name;
  s["tol"] = o.tol ? Report::Json(*o.tol) : Report::Json(nullptr);
  s["seed"] = o.seed;
  s["samples"] = o.samples;
  s["at"] = o.at;
  s["radius"] = o.radii;
  s["word"] = o.words;
  s["sign"] = o.heat_sign;
  return s;
}

namespace cli_detail {

inline std::vector<double> parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad coordinate '" + item + "' in point '" + s + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw std::invalid_argument("bad coordinate '" + item + "' in point '" + s + "'");
    v.push_back(d);
  }
  return v;
}

/// "x;y" -> (x, y); "x" -> (x, {}).
inline PointPair parse_at(const std::string& s, std::size_t n) {
  auto semi = s.find(';');
  PointPair p;
  p.first = parse_point(s.substr(0, semi));
  if (semi != std::string::npos) p.second = parse_point(s.substr(semi + 1));
  if (p.first.size() != n || (semi != std::string::npos && p.second.size() != n))
    throw DimensionError("point '" + s + "' does not have " + std::to_string(n) + " coordinates");
  return p;
}

inline MultiIndex parse_word(const std::string& s, std::size_t m) {
  MultiIndex w;
  if (s.empty()) return w;
  for (double d : parse_point(s)) {
    if (d != std::floor(d) || d < 1 || d > static_cast<double>(m))
      throw DimensionError("word '" + s + "' names a field outside 1.." + std::to_string(m));
    w.push_back(static_cast<std::size_t>(d) - 1);
  }
  return w;
}

inline std::string fmt_point(const std::vector<double>& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

inline std::string join(const std::vector<int>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << "]";
  return os.str();
}

inline std::string render_field(const PolyVectorField& X) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t j = 0; j < X.nvars(); ++j) {
    if (X[j].is_zero()) continue;
    os << (first ? "" : " + ") << "(" << X[j].to_string() << ")*d" << j + 1;
    first = false;
  }
  return first ? "0" : os.str();
}

struct Loaded {
  ModelSpec model;
  OperatorSpec op;
  bool has_op = false;
};

inline Loaded load(const CliOptions& o, Report& rep) {
  if (o.model_path.empty()) throw std::invalid_argument("--model is required");
  std::ifstream in(o.model_path);
  if (!in) throw std::invalid_argument("cannot read model file " + o.model_path);
  std::stringstream buf;
  buf << in.rdbuf();
  Loaded l;
  l.model = parse_model(buf.str());
  if (!l.model.operators.empty() || !o.op_name.empty()) {
    l.op = l.model.op(o.op_name);
    l.has_op = true;
  }
  rep.set_model(o.model_path, render_model(l.model));
  rep.set_setting("flags", settings_json(o));
  return l;
}

inline void write_csv(const CliOptions& o, Report& rep, const std::string& text) {
  if (o.csv_path.empty()) return;
  write_file_atomic(o.csv_path, text);
  rep.add_artifact(o.csv_path);
}

/// Lifted system, calibrated kernel and evaluator for the gamma-based commands.
struct GammaContext {
  LiftedSystem lifted;
  CalibrationResult cal;
  std::unique_ptr<SaturationEvaluator> ev;
};

inline GammaContext gamma_context(const Loaded& l) {
  if (!l.has_op) throw std::invalid_argument("model declares no operator");
  require_global_existence(l.op.nu(), l.model.dilation_family().homogeneous_dimension());
  GammaContext c{build_lifting(l.model.fields, l.model.dilation_family()), {}, nullptr};
  c.cal = calibrated_sublaplacian_kernel(c.lifted, l.op);
  c.ev = std::make_unique<SaturationEvaluator>(c.lifted, c.cal.kernel, l.op.nu());
  return c;
}

}  // namespace cli_detail

inline void cmd_analyze(const cli_detail::Loaded& l, const CliOptions& o, Report& rep, std::ostream& out) {
  using namespace cli_detail;
  const auto& m = l.model;
  auto delta = m.dilation_family();
  auto f = system_facts(m.fields, delta);
  auto A = generate_lie_algebra(m.fields, delta);
  out << "n = " << f.n << "\ndilation = " << join(f.sigma) << "\ndegrees =";
  for (std::size_t i = 0; i < f.degrees.size(); ++i) out << " " << m.field_names[i] << ":" << f.degrees[i];
  out << "\nq = " << f.q << "\nN = " << f.N << "\np = " << f.p << "\nstep = " << f.step << "\n";
  if (l.has_op) out << "operator nu = " << l.op.nu() << "\n";
  out << "rank table\n";
  std::vector<std::vector<double>> pts{std::vector<double>(f.n, 0.0)};
  for (const auto& s : o.at) pts.push_back(parse_at(s, f.n).first);
  Report::Json ranks = Report::Json::array();
  bool full = true;
  for (const auto& x : pts) {
    std::vector<Rational> xr;
    for (double v : x) xr.emplace_back(v);
    std::size_t r = hormander_rank(A.basis, xr);
    full = full && r == f.n;
    out << "  " << std::left << std::setw(24) << fmt_point(x) << r << "\n";
    ranks.push_back({{"point", x}, {"rank", r}});
  }
  rep.set_dimension("n", f.n);
  rep.set_dimension("sigma", f.sigma);
  rep.set_dimension("degrees", f.degrees);
  rep.set_dimension("q", f.q);
  rep.set_dimension("N", f.N);
  rep.set_dimension("p", f.p);
  rep.set_dimension("step", f.step);
  if (l.has_op) rep.set_dimension("nu", l.op.nu());
  rep.add_result("rank_table", ranks);
  rep.add_check(CheckResult::exact("hormander_rank_full", full));
  rep.add_check(CheckResult::exact("fields_homogeneous", true, "degrees " + join(f.degrees)));
}

inline void cmd_lift(const cli_detail::Loaded& l, const CliOptions& o, Report& rep, std::ostream& out) {
  using namespace cli_detail;
  const auto& m = l.model;
  auto L = build_lifting(m.fields, m.dilation_family());
  out << "N = " << L.N << "\np = " << L.p << "\nQ = " << L.Q << "\nstep = " << L.step << "\nD = " << join(L.D.exponents())
      << "\ntheta (exponential coordinates -> (x, xi)):\n";
  std::vector<std::string> wn;
  for (std::size_t k = 0; k < L.N; ++k) wn.push_back("w" + std::to_string(k + 1));
  for (std::size_t k = 0; k < L.N; ++k) out << "  " << (k < L.n ? "x" + std::to_string(k + 1) : "xi" + std::to_string(k - L.n + 1)) << " = " << L.theta[k].to_string(wn) << "\n";
  out << "lifted fields:\n";
  Report::Json lf = Report::Json::object();
  for (std::size_t i = 0; i < L.lifted_fields.size(); ++i) {
    std::string s = render_field(L.lifted_fields[i]);
    out << "  " << m.field_names[i] << "~ = " << s << "\n";
    lf[m.field_names[i]] = s;
  }
  out << "group law:\n";
  Report::Json law = Report::Json::array();
  std::vector<std::string> ab;
  for (char c : {'a', 'b'})
    for (std::size_t k = 0; k < L.N; ++k) ab.push_back(std::string(1, c) + std::to_string(k + 1));
  for (std::size_t k = 0; k < L.N; ++k) {
    out << "  (a*b)_" << k + 1 << " = " << L.group.mult[k].to_string(ab) << "\n";
    law.push_back(L.group.mult[k].to_string(ab));
  }
  rep.set_dimension("N", L.N);
  rep.set_dimension("p", L.p);
  rep.set_dimension("Q", L.Q);
  rep.set_dimension("step", L.step);
  rep.add_result("lifted_fields", lf);
  rep.add_result("group_law", law);
  std::vector<OperatorSpec> ops;
  if (l.has_op) ops.push_back(l.op);
  rep.add_checks(lifting_suite(L, ops, o.seed));
}

inline void cmd_gamma(const cli_detail::Loaded& l, const CliOptions& o, Report& rep, std::ostream& out) {
  using namespace cli_detail;
  auto ctx = gamma_context(l);
  std::size_t n = l.model.dim();
  std::vector<std::string> at = o.at.empty() ? std::vector<std::string>{"0.5,0.3;-0.2,0.1"} : o.at;
  std::vector<std::string> words = o.words.empty() ? std::vector<std::string>{""} : o.words;
  std::ostringstream csv;
  for (std::size_t i = 0; i < n; ++i) csv << "x" << i + 1 << ",";
  for (std::size_t i = 0; i < n; ++i) csv << "y" << i + 1 << ",";
  csv << "word,value,error\n";
  Report::Json rows = Report::Json::array();
  bool ok = true;
  out << "calibration constant = " << std::setprecision(12) << ctx.cal.constant << "\n";
  for (const auto& s : at) {
    auto [x, y] = parse_at(s, n);
    if (y.empty()) throw std::invalid_argument("gamma needs point pairs 'x;y'");
    for (const auto& ws : words) {
      auto w = parse_word(ws, l.model.fields.size());
      auto g = ctx.ev->x_derivative(w, x, y);
      ok = ok && g.converged;
      out << "Gamma" << (ws.empty() ? "" : "[" + ws + "]") << fmt_point(x) << fmt_point(y) << " = " << g.value
          << " +- " << g.error() << "\n";
      for (double v : x) csv << v << ",";
      for (double v : y) csv << v << ",";
      csv << "\"" << ws << "\"," << std::setprecision(15) << g.value << "," << g.error() << "\n";
      rows.push_back({{"x", x}, {"y", y}, {"word", ws}, {"value", g.value}, {"error", g.error()}, {"shells", g.shells}});
    }
  }
  rep.set_dimension("Q", ctx.lifted.Q);
  rep.add_result("calibration_constant", ctx.cal.constant);
  rep.add_result("values", rows);
  rep.add_check(CheckResult::exact("saturation_converged", ok));
  write_csv(o, rep, csv.str());
}

inline void cmd_verify(const cli_detail::Loaded& l, const CliOptions& o, Report& rep, std::ostream& out) {
  using namespace cli_detail;
  auto ctx = gamma_context(l);
  FundsolSuiteConfig cfg;
  cfg.seed = o.seed;
  cfg.left_inverse = !o.skip_left_inverse;
  if (o.tol) {
    cfg.tol = {*o.tol, *o.tol, *o.tol, *o.tol, *o.tol, *o.tol};
  }
  auto checks = fundsol_suite(*ctx.ev, ctx.cal, l.op, cfg);
  out << std::left << std::setw(34) << "identity" << std::setw(14) << "residual" << std::setw(12) << "tolerance"
      << "status\n";
  for (const auto& c : checks)
    out << std::setw(34) << c.name << std::setw(14) << std::setprecision(4) << c.residual.value_or(0) << std::setw(12)
        << c.tolerance.value_or(0) << (c.pass ? "pass" : "fail") << "\n";
  rep.add_checks(checks);
}

inline void cmd_distance(const cli_detail::Loaded& l, const CliOptions& o, Report& rep, std::ostream& out) {
  using namespace cli_detail;
  std::size_t n = l.model.dim();
  ControlSystem sys(l.model.fields, l.model.dilation_family());
  DistanceConfig cfg;
  cfg.seed = o.seed;
  if (o.tol) cfg.tol = *o.tol;
  if (o.at.empty()) throw std::invalid_argument("distance needs --at \"x;y\"");
  std::ostringstream csv;
  csv << "pair,upper,lower,certified_lower,segments,stagnated\n";
  Report::Json rows = Report::Json::array();
  double worst = 0;
  bool stalled = false;
  for (std::size_t i = 0; i < o.at.size(); ++i) {
    auto [x, y] = parse_at(o.at[i], n);
    if (y.empty()) throw std::invalid_argument("distance needs point pairs 'x;y'");
    auto d = distance(sys, x, y, cfg);
    out << "d" << fmt_point(x) << fmt_point(y) << " = " << std::setprecision(8) << d.upper << "  [search lower "
        << d.lower << ", certified lower " << d.certified_lower << ", " << d.path.segments.size() << " segments]\n";
    csv << i + 1 << "," << std::setprecision(12) << d.upper << "," << d.lower << "," << d.certified_lower << ","
        << d.path.segments.size() << "," << d.stagnated << "\n";
    rows.push_back({{"x", x}, {"y", y}, {"upper", d.upper}, {"lower", d.lower}, {"certified_lower", d.certified_lower},
                    {"segments", d.path.segments.size()}, {"stagnated", d.stagnated}});
    if (d.upper > 0) worst = std::max(worst, (d.upper - d.lower) / d.upper);
    stalled = stalled || d.stagnated;
  }
  rep.add_result("distances", rows);
  rep.add_check(CheckResult::numeric("distance_bracket_width", worst, cfg.tol, cfg.seed, "(upper - lower) / upper"));
  rep.add_check(CheckResult::exact("distance_optimizer_converged", !stalled));
  write_csv(o, rep, csv.str());
}

inline void cmd_ballvol(const cli_detail::Loaded& l, const CliOptions& o, Report& rep, std::ostream& out) {
  using namespace cli_detail;
  std::size_t n = l.model.dim();
  ControlSystem sys(l.model.fields, l.model.dilation_family());
  DistanceConfig cfg{.starts = 1};
  cfg.seed = o.seed;
  if (o.tol) cfg.tol = *o.tol;
  std::vector<double> x = o.at.empty() ? std::vector<double>(n, 0.0) : parse_at(o.at.front(), n).first;
  std::vector<double> radii = o.radii;
  if (radii.empty())
    for (int k = -4; k <= 2; ++k) radii.push_back(std::ldexp(1.0, k));
  std::ostringstream csv;
  csv << "r,volume,ci_lo,ci_hi,samples,seed\n";
  Report::Json rows = Report::Json::array();
  std::vector<double> vols;
  bool ci_ok = true;
  out << "ball volumes at " << fmt_point(x) << " (membership at r (1 + 3 tol): estimates are biased upward)\n";
  for (std::size_t i = 0; i < radii.size(); ++i) {
    auto v = ball_volume(sys, x, radii[i], o.samples, o.seed + i, cfg);
    vols.push_back(v.estimate);
    ci_ok = ci_ok && v.lo <= v.estimate && v.estimate <= v.hi && v.estimate > 0;
    out << "  r = " << std::setw(10) << radii[i] << " |B| = " << std::setprecision(6) << v.estimate << "  95% CI ["
        << v.lo << ", " << v.hi << "]\n";
    csv << std::setprecision(12) << radii[i] << "," << v.estimate << "," << v.lo << "," << v.hi << "," << v.samples
        << "," << v.seed << "\n";
    rows.push_back({{"r", radii[i]}, {"volume", v.estimate}, {"ci", {v.lo, v.hi}}, {"samples", v.samples}, {"seed", v.seed}});
  }
  if (radii.size() > 1) {
    double slope = loglog_slope(radii, vols);
    out << "log-log slope = " << slope << "\n";
    rep.add_result("loglog_slope", slope);
  }
  rep.add_result("volumes", rows);
  rep.add_check(CheckResult::exact("volume_positive_with_ci", ci_ok));
  write_csv(o, rep, csv.str());
}

inline void cmd_heat(const cli_detail::Loaded& l, const CliOptions& o, Report& rep, std::ostream& out) {
  using namespace cli_detail;
  if (!l.has_op) throw std::invalid_argument("model declares no operator");
  auto delta = l.model.dilation_family();
  auto h = heat_extend(l.op, delta, o.heat_sign);
  auto degrees = certify_system(h.op.fields(), h.dilation);
  int q = delta.homogeneous_dimension(), qp = h.dilation.homogeneous_dimension();
  std::vector<std::string> names = l.model.field_names;
  names.push_back("T");
  out << "extended dilation = " << join(h.dilation.exponents()) << " (t is coordinate " << h.t_index + 1 << ")\n";
  for (std::size_t i = 0; i < h.op.fields().size(); ++i)
    out << "  " << names[i] << " = " << render_field(h.op.fields()[i]) << "  degree " << degrees[i] << "\n";
  out << "operator = " << detail::render_words(h.op.terms(), names) << "  homogeneous of degree " << h.op.nu() << "\n";
  out << "q' = " << qp << " (q = " << q << ")\n";
  bool rock = classify_positive_rockland_pattern(l.op);
  out << "spatial part matches the positive Rockland pattern: " << (rock ? "yes" : "no") << "\n";
  rep.set_dimension("q", q);
  rep.set_dimension("q_extended", qp);
  rep.set_dimension("t_exponent", h.dilation[h.t_index]);
  rep.add_check(CheckResult::exact("heat_operator_homogeneous", h.op.nu() == l.op.nu(), "degree " + std::to_string(h.op.nu())));
  rep.add_check(CheckResult::exact("heat_t_exponent_is_nu", h.dilation[h.t_index] == l.op.nu()));
  rep.add_check(CheckResult::exact("heat_q_extended", qp == q + l.op.nu()));
  rep.add_check(CheckResult::exact("spatial_rockland_pattern", rock));
}

inline void cmd_report(const cli_detail::Loaded& l, const CliOptions& o, Report& rep, std::ostream& out) {
  std::ostringstream sink;
  cmd_analyze(l, o, rep, sink);
  auto facts = system_facts(l.model.fields, l.model.dilation_family());
  if (facts.p > 0) cmd_lift(l, o, rep, sink);
  if (l.has_op && is_plain_sublaplacian(l.op) && l.op.nu() < facts.q) {
    CliOptions v = o;
    cmd_verify(l, v, rep, sink);
  }
  if (l.has_op && classify_positive_rockland_pattern(l.op)) cmd_heat(l, o, rep, sink);
  (void)out;
}

/// Runs one command; returns the exit status (0 iff all checks pass, 1 on failed checks, 2 on errors).
inline int run_command(const std::string& cmd, const CliOptions& o, std::ostream& out, std::ostream& err) {
  Report rep(cmd);
  try {
    auto l = cli_detail::load(o, rep);
    if (cmd == "analyze")
      cmd_analyze(l, o, rep, out);
    else if (cmd == "lift")
      cmd_lift(l, o, rep, out);
    else if (cmd == "gamma")
      cmd_gamma(l, o, rep, out);
    else if (cmd == "verify")
      cmd_verify(l, o, rep, out);
    else if (cmd == "distance")
      cmd_distance(l, o, rep, out);
    else if (cmd == "ballvol")
      cmd_ballvol(l, o, rep, out);
    else if (cmd == "heat")
      cmd_heat(l, o, rep, out);
    else if (cmd == "report")
      cmd_report(l, o, rep, out);
    else
      throw std::invalid_argument("unknown command " + cmd);
  } catch (const ModelError& e) {
    err << o.model_path << ": " << e.what() << "\n";
    return 2;
  } catch (const HypothesisError& e) {
    err << "hypothesis not satisfied: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  bool json_to_stdout = cmd == "report" && o.json_path.empty();
  if (!o.json_path.empty()) {
    rep.add_artifact(o.json_path);
    write_file_atomic(o.json_path, rep.dump());
  } else if (json_to_stdout) {
    out << rep.dump();
  }
  std::ostream& summary = json_to_stdout ? err : out;
  std::size_t passed = 0;
  for (const auto& c : rep.checks()) passed += c.pass;
  summary << "checks: " << passed << "/" << rep.checks().size() << " pass\n";
  for (const auto& c : rep.checks())
    if (!c.pass) summary << "  FAIL " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
  return rep.exit_status();
}

}  // namespace rockland
