// Control distances and ball volumes of the Grushin plane.
#include <cstdio>

#include "rockland/metric.hpp"
#include "rockland/systems.hpp"

using namespace rockland;

int main() {
  auto s = systems::grushin();
  ControlSystem sys(s.fields, s.dilation);
  std::vector<double> o{0.0, 0.0};
  std::printf("%12s %12s %12s %12s\n", "y", "upper", "lower", "certified");
  for (auto y : std::vector<std::vector<double>>{{1, 0}, {0, 1}, {1, 1}, {-0.5, 0.25}}) {
    auto d = distance(sys, o, y);
    std::printf("(%4.2f,%5.2f) %12.6f %12.6f %12.6f\n", y[0], y[1], d.upper, d.lower, d.certified_lower);
  }
  std::printf("\n%8s %10s %10s %10s\n", "r", "|B(0,r)|", "|B(e1,r)|", "r^3");
  std::vector<double> e1{1.0, 0.0};
  for (double r : {0.125, 0.5, 2.0}) {
    auto v0 = ball_volume(sys, o, r, 800, 3);
    auto v1 = ball_volume(sys, e1, r, 800, 3);
    std::printf("%8.3f %10.5f %10.5f %10.5f\n", r, v0.estimate, v1.estimate, r * r * r);
  }
  return 0;
}
