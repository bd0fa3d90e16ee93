#include <gtest/gtest.h>

#include <random>

#include "rockland/compiled.hpp"
#include "rockland/polynomial.hpp"

using namespace rockland;

namespace {

Polynomial x(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial c(std::size_t n, const Rational& v) { return Polynomial::constant(n, v); }

Polynomial random_poly(std::mt19937_64& rng, std::size_t n, unsigned maxdeg, int terms) {
  std::uniform_int_distribution<int> coef(-5, 5), den(1, 4);
  std::uniform_int_distribution<unsigned> ex(0, maxdeg);
  Polynomial p(n);
  for (int t = 0; t < terms; ++t) {
    std::vector<unsigned> e(n);
    unsigned total = 0;
    for (auto& v : e) {
      v = ex(rng);
      if (total + v > maxdeg) v = 0;
      total += v;
    }
    p.add_term(Monomial(e), Rational(coef(rng), den(rng)));
  }
  return p;
}

}  // namespace

TEST(Polynomial, ProductExamples) {
  EXPECT_EQ(x(2, 0) * x(2, 0), Polynomial::term(Monomial({2, 0}), 1));
  EXPECT_EQ((x(2, 0) + x(2, 1)) * (x(2, 0) - x(2, 1)), x(2, 0).pow(2) - x(2, 1).pow(2));
  Polynomial a = Rational(1, 2) * x(2, 0), b = Rational(1, 3) * x(2, 1);
  EXPECT_EQ(a * b, Polynomial::term(Monomial({1, 1}), Rational(1, 6)));
}

TEST(Polynomial, MixingAmbientSpacesThrows) {
  EXPECT_THROW(x(2, 0) * x(3, 0), DimensionError);
  EXPECT_THROW(x(2, 0) + x(3, 0), DimensionError);
  EXPECT_THROW(x(2, 2), DimensionError);
}

TEST(Polynomial, DerivativeExamples) {
  for (unsigned k = 1; k <= 5; ++k) {
    Polynomial p = x(2, 0).pow(k) * x(2, 1);
    Polynomial want = Rational(k) * x(2, 0).pow(k - 1) * x(2, 1);
    EXPECT_EQ(p.diff(0), want);
  }
  EXPECT_TRUE(x(2, 0).diff(1).is_zero());
  Polynomial p = x(2, 0).pow(2) + Rational(3) * x(2, 0) * x(2, 1);
  EXPECT_EQ(p.diff(0), Rational(2) * x(2, 0) + Rational(3) * x(2, 1));
  EXPECT_THROW(p.diff(2), DimensionError);
}

TEST(Polynomial, EvaluationExamples) {
  Polynomial p = x(2, 0).pow(2) + x(2, 1);
  EXPECT_EQ(poly_eval(p, std::vector<Rational>{2, 3}), Rational(7));
  EXPECT_DOUBLE_EQ(poly_eval(p, std::vector<double>{2.0, 3.0}), 7.0);
  Polynomial q = p + c(2, Rational(5, 7));
  EXPECT_EQ(poly_eval(q, std::vector<Rational>{0, 0}), Rational(5, 7));
  Polynomial h = Rational(1, 2) * x(2, 0) * x(2, 1);
  EXPECT_EQ(poly_eval(h, std::vector<Rational>{Rational(1, 3), 3}), Rational(1, 2));
  EXPECT_THROW(poly_eval(h, std::vector<Rational>{1}), DimensionError);
}

TEST(Polynomial, GradedComponentsExamples) {
  std::vector<int> s{1, 2};
  auto g1 = graded_components(x(2, 0).pow(2) + x(2, 1), s);
  ASSERT_EQ(g1.size(), 1u);
  EXPECT_EQ(g1.at(2), x(2, 0).pow(2) + x(2, 1));
  auto g2 = graded_components(x(2, 0) + x(2, 1), s);
  ASSERT_EQ(g2.size(), 2u);
  EXPECT_EQ(g2.at(1), x(2, 0));
  EXPECT_EQ(g2.at(2), x(2, 1));
  EXPECT_TRUE(graded_components(Polynomial(2), s).empty());

  EXPECT_TRUE(is_graded_homogeneous(x(2, 0).pow(2), s, 2));
  EXPECT_FALSE(is_graded_homogeneous(x(2, 0) + x(2, 1), s, 1));
  EXPECT_TRUE(is_graded_homogeneous(Polynomial(2), s, 17));
}

TEST(Polynomial, CanonicalSerialization) {
  Polynomial p = Rational(-1, 2) * x(2, 0) * x(2, 1) + x(2, 0).pow(2) + c(2, 3) - x(2, 1);
  EXPECT_EQ(p.to_string(), "x1^2 - 1/2*x1*x2 - x2 + 3");
  EXPECT_EQ(Polynomial(2).to_string(), "0");
  EXPECT_EQ(c(1, Rational(-4, 6)).to_string(), "-2/3");
}

TEST(Polynomial, RingAxiomsOnRandomPolynomials) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 25; ++trial) {
    Polynomial a = random_poly(rng, 3, 5, 6), b = random_poly(rng, 3, 5, 6), d = random_poly(rng, 3, 5, 6);
    EXPECT_EQ((a * b) * d, a * (b * d));
    EXPECT_EQ(a * (b + d), a * b + a * d);
    EXPECT_EQ(a * b, b * a);
    EXPECT_TRUE((a - a).is_zero());
  }
}

TEST(Polynomial, DerivationRule) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    Polynomial a = random_poly(rng, 3, 4, 5), b = random_poly(rng, 3, 4, 5);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ((a * b).diff(i), a.diff(i) * b + a * b.diff(i));
  }
}

TEST(Polynomial, GradedComponentsResum) {
  std::mt19937_64 rng(11);
  std::vector<int> s{1, 2, 3};
  for (int trial = 0; trial < 25; ++trial) {
    Polynomial a = random_poly(rng, 3, 5, 8);
    Polynomial sum(3);
    for (const auto& [d, part] : graded_components(a, s)) {
      EXPECT_TRUE(is_graded_homogeneous(part, s, d));
      sum += part;
    }
    EXPECT_EQ(sum, a);
  }
}

TEST(Polynomial, HomogeneousScalingIsExact) {
  std::mt19937_64 rng(13);
  std::vector<int> s{1, 2, 3};
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial a = random_poly(rng, 3, 5, 8);
    for (const auto& [d, part] : graded_components(a, s)) {
      Rational lambda(num(rng), den(rng));
      lambda.canonicalize();
      std::vector<Rational> pt{Rational(num(rng), den(rng)), Rational(num(rng), den(rng)),
                               Rational(num(rng), den(rng))};
      for (auto& v : pt) v.canonicalize();
      std::vector<Rational> scaled{lambda * pt[0], lambda * lambda * pt[1], lambda * lambda * lambda * pt[2]};
      EXPECT_EQ(poly_eval(part, scaled), rational_pow(lambda, static_cast<unsigned>(d)) * poly_eval(part, pt));
      EXPECT_EQ(dilate(part, s, lambda), rational_pow(lambda, static_cast<unsigned>(d)) * part);
    }
  }
}

TEST(Polynomial, CompositionMatchesEvaluation) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Polynomial p = random_poly(rng, 2, 4, 6);
    std::vector<Polynomial> subs{random_poly(rng, 3, 2, 3), random_poly(rng, 3, 2, 3)};
    Polynomial comp = compose(p, subs);
    std::vector<Rational> pt{Rational(1, 2), Rational(-2, 3), Rational(5)};
    std::vector<Rational> inner{poly_eval(subs[0], pt), poly_eval(subs[1], pt)};
    EXPECT_EQ(poly_eval(comp, pt), poly_eval(p, inner));
  }
}

TEST(Polynomial, CompiledEvaluationAgreesWithExact) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Polynomial> ps{random_poly(rng, 3, 5, 8), random_poly(rng, 3, 5, 8)};
    CompiledMap cm(ps);
    std::vector<double> pt{0.3, -1.7, 2.25};
    auto v = cm(pt);
    for (std::size_t k = 0; k < ps.size(); ++k) EXPECT_NEAR(v[k], poly_eval(ps[k], pt), 1e-9 * (1 + std::abs(v[k])));
  }
}
