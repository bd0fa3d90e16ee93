#include <CLI11.hpp>

#include <iostream>

#include "rockland/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lifting, fundamental solutions and control distances for graded vector-field systems"};
  app.require_subcommand(1);
  rockland::CliOptions o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", o.model_path, "model file in the field DSL")->required()->check(CLI::ExistingFile);
    sub->add_option("--operator", o.op_name, "operator name (default: the first one)");
    sub->add_option("--tol", o.tol, "distance bracket tolerance; overrides verify tolerances (default 1e-3)");
    sub->add_option("--seed", o.seed, "base seed for all random draws")->capture_default_str();
    sub->add_option("--samples", o.samples, "Monte Carlo samples per ball")->capture_default_str();
    sub->add_option("--json", o.json_path, "write the JSON report here");
    sub->add_option("--csv", o.csv_path, "write a CSV table here");
    sub->add_option("--at", o.at, "point list: \"x1,x2;y1,y2\" pairs or \"x1,x2\" points");
  };

  struct Cmd {
    const char* name;
    const char* help;
  };
  const Cmd cmds[] = {{"analyze", "degrees, q, N, p, step and the Hormander rank table"},
                      {"lift", "lifted group, lifted fields and structural checks"},
                      {"gamma", "fundamental solution values and x-derivatives"},
                      {"verify", "residuals of the fundamental-solution identities"},
                      {"distance", "control distance with its bracket"},
                      {"ballvol", "Monte Carlo ball volumes with 95% intervals"},
                      {"heat", "heat-type extension and its homogeneity"},
                      {"report", "aggregate JSON report of all applicable checks"}};
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    if (std::string(c.name) == "gamma") sub->add_option("--word", o.words, "derivative word, e.g. \"1,2\" for X1 X2");
    if (std::string(c.name) == "ballvol") sub->add_option("--radius", o.radii, "radii (default 2^-4 .. 2^2)");
    if (std::string(c.name) == "heat") sub->add_option("--sign", o.heat_sign, "sign of d/dt")->capture_default_str();
    if (std::string(c.name) == "verify" || std::string(c.name) == "report")
      sub->add_flag("--skip-left-inverse", o.skip_left_inverse, "skip the slow left-inverse quadrature");
  }
  CLI11_PARSE(app, argc, argv);
  return rockland::run_command(app.get_subcommands().front()->get_name(), o, std::cout, std::cerr);
}
