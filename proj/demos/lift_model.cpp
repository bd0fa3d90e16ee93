// Lifts the fields of a model file and prints the residuals R_i = lifted_i - X_i.
// usage: lift_model [file.rk]
#include <fstream>
#include <iostream>
#include <sstream>

#include "rockland/cli.hpp"

using namespace rockland;

int main(int argc, char** argv) {
  std::string path = argc > 1 ? argv[1] : std::string(ROCKLAND_MODELS_DIR) + "/quadratic_chain_k1.rk";
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    auto m = parse_model(buf.str());
    auto L = build_lifting(m.fields, m.dilation_family());
    std::cout << render_model(m) << "\nn = " << L.n << ", N = " << L.N << ", q = " << L.q << ", Q = " << L.Q
              << ", step " << L.step << "\n";
    for (std::size_t i = 0; i < m.fields.size(); ++i)
      std::cout << "R" << i + 1 << " = " << cli_detail::render_field(L.residual(i, m.fields)) << "\n";
    auto S = saturable_check(m.op(), L);
    std::cout << "saturable: " << (S.passed() ? "yes" : "no") << " (" << S.terms.size() << " summands)\n";
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
