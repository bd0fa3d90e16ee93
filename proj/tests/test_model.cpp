#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rockland/model.hpp"

using namespace rockland;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> shipped_models() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(ROCKLAND_MODELS_DIR))
    if (e.path().extension() == ".rk") out.push_back(read_file(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

ModelError parse_error(const std::string& text) {
  try {
    parse_model(text);
  } catch (const ModelError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for: " << text;
  return ModelError("", 0, 0, "");
}

}  // namespace

TEST(Model, GrushinOneLiner) {
  auto m = parse_model("dilation [1,2]; field X1 = d1; field X2 = x1*d2; operator L = X1^2 + X2^2;");
  auto g = systems::grushin();
  EXPECT_EQ(m.dilation, (std::vector<int>{1, 2}));
  EXPECT_EQ(m.field_names, (std::vector<std::string>{"X1", "X2"}));
  ASSERT_EQ(m.fields.size(), 2u);
  EXPECT_EQ(m.fields[0], g.fields[0]);
  EXPECT_EQ(m.fields[1], g.fields[1]);
  auto op = m.op();
  EXPECT_EQ(op.nu(), 2);
  EXPECT_EQ(op.terms(), WordSum::word({0, 0}) + WordSum::word({1, 1}));
  EXPECT_EQ(m.degrees(), (std::vector<int>{1, 1}));
}

TEST(Model, CoefficientsExponentsAndProducts) {
  auto m = parse_model(
      "# comment\n"
      "dilation [1, 2, 5];\n"
      "field X1 = d1;\n"
      "field X2 = x1*d2 + 1/2*x2^(1+1)*d3 - 3*x1*x1^3*d3 + 3*x1^4*d3;\n"
      "operator L = 2*(X1 + X2)^2 - X1*X2 - X2*X1;\n");
  Polynomial x2sq = Polynomial::variable(3, 1).pow(2);
  EXPECT_EQ(m.fields[1][2], Rational(1, 2) * x2sq);
  EXPECT_EQ(m.op().terms(), WordSum::word({0, 0}, 2) + WordSum::word({0, 1}) + WordSum::word({1, 0}) +
                                WordSum::word({1, 1}, 2));
}

TEST(Model, ErrorsCarryLocations) {
  auto e = parse_error("dilation [1,2];\nfield X = x1^(1/2)*d2;\n");
  EXPECT_NE(e.message().find("non-integer exponent"), std::string::npos);
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 14u);
  EXPECT_NE(std::string(e.what()).find("^"), std::string::npos);

  auto u = parse_error("dilation [1,2]; field X1 = d1; field X2 = x1*d2;\noperator L = X3^2;");
  EXPECT_NE(u.message().find("undefined name 'X3'"), std::string::npos);
  EXPECT_EQ(u.line(), 2u);
  EXPECT_EQ(u.column(), 14u);

  auto d = parse_error("dilation [1,2]; field X1 = d3;");
  EXPECT_NE(d.message().find("dimension mismatch"), std::string::npos);

  auto s = parse_error("dilation [1,2] field X1 = d1;");
  EXPECT_NE(s.message().find("expected ';'"), std::string::npos);

  auto h = parse_error("dilation [1,2]; field X1 = d1; field X2 = x1*d2; operator L = X1^2 + X2;");
  EXPECT_NE(h.message().find("not homogeneous"), std::string::npos);

  auto z = parse_error("dilation [0,2]; field X1 = d1;");
  EXPECT_NE(z.message().find("positive"), std::string::npos);

  auto nh = parse_error("dilation [1,2]; field X1 = d1; field X2 = x1^2*d2 + d2;");
  EXPECT_NE(nh.message().find("homogeneous"), std::string::npos);

  EXPECT_NE(parse_error("").message().find("empty"), std::string::npos);
  EXPECT_NE(parse_error("dilation [1]; field X1 = d1; field X1 = d1;").message().find("twice"), std::string::npos);
  EXPECT_NE(parse_error("dilation [1]; field x1 = d1;").message().find("reserved"), std::string::npos);
}

TEST(Model, ShippedModelsRoundTrip) {
  auto models = shipped_models();
  ASSERT_GE(models.size(), 9u);
  for (const auto& text : models) {
    auto m = parse_model(text);
    std::string canon = render_model(m);
    auto m2 = parse_model(canon);
    EXPECT_EQ(m2, m) << canon;
    EXPECT_EQ(render_model(m2), canon);
  }
}

TEST(Model, RenderIsCanonical) {
  auto m = parse_model("dilation [1,2]; field A = -x1*d2 + d1; operator L = A^2;");
  EXPECT_EQ(render_model(m), "dilation [1, 2];\nfield A = d1 - x1*d2;\noperator L = A^2;\n");
}

TEST(Model, FuzzedInputsFailCleanly) {
  auto seeds = shipped_models();
  seeds.push_back("dilation [1, 2, 5]; field X1 = d1; field X2 = x1*d2 + 1/2*x2^(4/2)*d3; operator L = (X1 + X2)^2 - X1*X2;");
  const std::string alphabet = "[],;=+-*/^()#dx0123456789 \nXLfieldoperatordilation\t\x01\xff";
  std::mt19937_64 rng(2024);
  int parsed = 0, rejected = 0;
  for (int t = 0; t < 10000; ++t) {
    std::string s = seeds[rng() % seeds.size()];
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e) {
      std::size_t pos = s.empty() ? 0 : rng() % s.size();
      switch (rng() % 4) {
        case 0:
          if (!s.empty()) s.erase(pos, 1 + rng() % 3);
          break;
        case 1:
          s.insert(pos, 1, alphabet[rng() % alphabet.size()]);
          break;
        case 2:
          if (!s.empty()) s[pos] = alphabet[rng() % alphabet.size()];
          break;
        default: {
          std::size_t len = 1 + rng() % 8;
          std::string chunk = s.substr(pos, len);
          s.insert(rng() % (s.size() + 1), chunk);
        }
      }
    }
    try {
      auto m = parse_model(s);
      ++parsed;
      ASSERT_EQ(parse_model(render_model(m)), m) << s;
    } catch (const ModelError& err) {
      ++rejected;
      ASSERT_GE(err.line(), 1u) << s;
      ASSERT_GE(err.column(), 1u) << s;
    } catch (const std::exception& other) {
      FAIL() << "unlocated error '" << other.what() << "' for input:\n" << s;
    }
  }
  EXPECT_GT(parsed, 0);
  EXPECT_GT(rejected, 0);
}
