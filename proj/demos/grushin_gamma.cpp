// Gamma and X1 Gamma for the Grushin sublaplacian along a dilation orbit of y.
#include <cmath>
#include <cstdio>

#include "rockland/fundsol.hpp"
#include "rockland/systems.hpp"

using namespace rockland;

int main() {
  auto s = systems::grushin();
  auto L = build_lifting(s.fields, s.dilation);
  auto op = make_standard_operator(StandardOperator::sublaplacian_power, s.fields, {1, 1});
  auto cal = calibrated_sublaplacian_kernel(L, op);
  SaturationEvaluator ev(L, cal.kernel, 2);
  std::printf("kernel constant %.9f\n", cal.constant);
  std::printf("%8s %14s %14s %14s %14s\n", "lambda", "Gamma", "lambda*Gamma", "X1 Gamma", "lambda^2*X1G");
  std::vector<double> x{0.0, 0.0};
  for (double lam : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    std::vector<double> y{0.6 * lam, -0.2 * lam * lam};
    double g = gamma_eval(ev, x, y);
    double d = gamma_x_derivative(ev, {0}, x, y);
    std::printf("%8.3f %14.8f %14.8f %14.8f %14.8f\n", lam, g, lam * g, d, lam * lam * d);
  }
  return 0;
}
