#include <gtest/gtest.h>

#include <random>

#include "rockland/operators.hpp"
#include "rockland/systems.hpp"

using namespace rockland;

namespace {

Polynomial x(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }

PolyVectorField field(std::vector<Polynomial> c) { return PolyVectorField(std::move(c)); }

/// Random field homogeneous of degree nu for sigma, built from monomials of the right graded degree.
PolyVectorField random_homogeneous_field(std::mt19937_64& rng, const std::vector<int>& sigma, int nu) {
  std::size_t n = sigma.size();
  std::uniform_int_distribution<int> coef(-3, 3);
  std::vector<Polynomial> c(n, Polynomial(n));
  for (std::size_t i = 0; i < n; ++i) {
    long target = sigma[i] - nu;
    if (target < 0) continue;
    // enumerate monomials in variables of lower weight with graded degree target
    std::vector<unsigned> e(n, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t j, long rem) {
      if (j == n) {
        if (rem == 0) c[i].add_term(Monomial(e), coef(rng));
        return;
      }
      for (unsigned p = 0; static_cast<long>(p) * sigma[j] <= rem; ++p) {
        e[j] = p;
        rec(j + 1, rem - static_cast<long>(p) * sigma[j]);
        if (sigma[j] >= sigma[i]) break;
      }
      e[j] = 0;
    };
    rec(0, target);
  }
  return PolyVectorField(c);
}

}  // namespace

TEST(Fields, ApplyExamples) {
  EXPECT_EQ(PolyVectorField::coordinate(2, 0).apply(x(2, 0).pow(2)), Rational(2) * x(2, 0));
  EXPECT_EQ(field({Polynomial(2), x(2, 0)}).apply(x(2, 1)), x(2, 0));
  EXPECT_EQ(field({Polynomial(3), x(3, 0), x(3, 1)}).apply(x(3, 2)), x(3, 1));
  EXPECT_THROW(PolyVectorField::coordinate(2, 0).apply(x(3, 0)), DimensionError);
}

TEST(Fields, CommutatorExamples) {
  auto d1 = PolyVectorField::coordinate(2, 0), d2 = PolyVectorField::coordinate(2, 1);
  EXPECT_EQ(commutator(d1, field({Polynomial(2), x(2, 0)})), d2);
  auto X = field({x(2, 1), x(2, 0)});
  EXPECT_TRUE(commutator(X, X).is_zero());
  for (unsigned k = 1; k <= 4; ++k) {
    auto Xk = field({Polynomial(2), x(2, 0).pow(k)});
    EXPECT_EQ(commutator(d1, Xk), field({Polynomial(2), Rational(k) * x(2, 0).pow(k - 1)}));
  }
}

TEST(Fields, CertifyHomogeneityExamples) {
  for (unsigned k = 1; k <= 3; ++k)
    for (unsigned h = 1; h <= 3; ++h) {
      auto sys = systems::monomial_shear(k, h);
      EXPECT_EQ(certify_homogeneity(sys.fields[1], sys.dilation), std::optional<int>(static_cast<int>(h)));
      EXPECT_EQ(certify_homogeneity(sys.fields[0], sys.dilation), std::optional<int>(1));
      EXPECT_EQ(sys.dilation.homogeneous_dimension(), static_cast<int>(k + h + 1));
    }
  DilationFamily s12({1, 2});
  EXPECT_EQ(certify_homogeneity(PolyVectorField::coordinate(2, 0), s12), std::optional<int>(1));
  auto mixed = PolyVectorField::coordinate(2, 0) + PolyVectorField::coordinate(2, 1);
  EXPECT_FALSE(certify_homogeneity(mixed, s12).has_value());
  auto rep = homogeneity_report(mixed, s12);
  EXPECT_NE(rep.message.find("several degrees"), std::string::npos);
  EXPECT_THROW(certify_system({mixed}, s12), HypothesisError);
}

TEST(Fields, HomogeneousDimension) {
  EXPECT_EQ(homogeneous_dimension(DilationFamily({1, 2})), 3);
  EXPECT_EQ(homogeneous_dimension(DilationFamily({1, 2, 3, 4, 5})), 15);
  for (int k = 1; k <= 5; ++k) EXPECT_EQ(homogeneous_dimension(DilationFamily({1, k + 1})), k + 2);
  EXPECT_THROW(DilationFamily::normalized({2, 3}), HypothesisError);
  EXPECT_THROW(DilationFamily({1, 0}), HypothesisError);
}

TEST(Fields, JacobiIdentityAndDegreeAdditivity) {
  std::mt19937_64 rng(5);
  std::vector<int> sigma{1, 2, 3, 4};
  DilationFamily delta(sigma);
  for (int trial = 0; trial < 15; ++trial) {
    auto X = random_homogeneous_field(rng, sigma, 1);
    auto Y = random_homogeneous_field(rng, sigma, 1);
    auto Z = random_homogeneous_field(rng, sigma, 2);
    auto J = commutator(commutator(X, Y), Z) + commutator(commutator(Y, Z), X) + commutator(commutator(Z, X), Y);
    EXPECT_TRUE(J.is_zero());
    auto XZ = commutator(X, Z);
    if (!XZ.is_zero()) {
      EXPECT_EQ(certify_homogeneity(XZ, delta), std::optional<int>(3));
    }
    auto XY = commutator(X, Y);
    if (!XY.is_zero()) {
      EXPECT_EQ(certify_homogeneity(XY, delta), std::optional<int>(2));
    }
    EXPECT_TRUE(X.divergence().is_zero());
  }
}

TEST(Fields, MultiindexWeight) {
  EXPECT_EQ(multiindex_weight({0, 0, 0, 0}, {1, 1}), 4);
  EXPECT_EQ(multiindex_weight({1, 1}, {1, 2}), 4);
  EXPECT_EQ(multiindex_weight({0, 1, 1}, {1, 2}), 5);
  EXPECT_THROW(multiindex_weight({2}, {1, 2}), DimensionError);
}

TEST(Operators, StandardOperators) {
  auto g = systems::grushin();
  auto L4 = make_standard_operator(StandardOperator::sum_of_even_powers, g.fields, {1, 1}, {2, 1, {}});
  EXPECT_EQ(L4.nu(), 4);
  EXPECT_EQ(L4.words_to_string(), "X1*X1*X1*X1 + X2*X2*X2*X2");
  auto S = make_standard_operator(StandardOperator::sublaplacian_power, g.fields, {1, 1});
  EXPECT_EQ(S.nu(), 2);
  EXPECT_EQ(S.words_to_string(), "X1*X1 + X2*X2");
  // nu = (1,2), nu0 = 2: exponents (4, 2), signs (+1, -1)
  auto s3 = systems::monomial_shear(1, 2);
  auto R = make_standard_operator(StandardOperator::rockland_power, s3.fields, {1, 2}, {2, 1, {}});
  EXPECT_EQ(R.nu(), 4);
  EXPECT_EQ(R.words_to_string(), "X1*X1*X1*X1 - X2*X2");
  EXPECT_THROW(make_standard_operator(StandardOperator::rockland_power, s3.fields, {1, 2}, {3, 1, {}}),
               HypothesisError);
  auto kol = systems::kolmogorov();
  EXPECT_THROW(make_standard_operator(StandardOperator::hormander_power, kol.fields, {1, 2}, {1, 1, {}}),
               HypothesisError);
  auto H2 = make_standard_operator(StandardOperator::hormander_power, kol.fields, {1, 2}, {1, 2, std::size_t{1}});
  EXPECT_EQ(H2.nu(), 4);
  auto Rk = make_standard_operator(StandardOperator::rockland_power, g.fields, {1, 1}, {1, 2, {}});
  EXPECT_EQ(Rk.nu(), 4);
}

TEST(Operators, TransposeExamples) {
  auto g = systems::grushin();
  auto X11 = OperatorSpec(g.fields, {1, 1}, WordSum::word({0, 0}));
  EXPECT_EQ(operator_transpose(X11), X11);
  auto kol = systems::kolmogorov();
  for (unsigned k = 1; k <= 3; ++k) {
    auto L = make_standard_operator(StandardOperator::hormander_power, kol.fields, {1, 2}, {1, k, std::size_t{1}});
    WordSum minus = (WordSum::word({0, 0}) - WordSum::symbol(1)).pow(k);
    EXPECT_EQ(operator_transpose(L).terms(), minus);
  }
  for (int nu0 : {2, 4}) {
    auto s = systems::monomial_shear(1, 2);
    auto R = make_standard_operator(StandardOperator::rockland_power, s.fields, {1, 2}, {nu0, 1, {}});
    EXPECT_EQ(operator_transpose(R), R);
  }
}

TEST(Operators, TransposeInvolution) {
  auto kol = systems::kolmogorov();
  WordSum w = WordSum::word({0, 0, 1}, Rational(3, 2)) + WordSum::word({1, 0, 0}, -2) + WordSum::word({0, 1, 0});
  OperatorSpec L(kol.fields, {1, 2}, w);
  EXPECT_EQ(operator_transpose(operator_transpose(L)), L);
}

TEST(Operators, TransposeRefusesDivergence) {
  std::vector<Polynomial> c{x(2, 0), Polynomial(2)};
  PolyVectorField bad(c);  // x1 d1 has divergence 1
  OperatorSpec L({bad}, {1}, WordSum::word({0, 0}));
  EXPECT_THROW(operator_transpose(L), HypothesisError);
}

TEST(Operators, ExpandedTransposeMatchesFormalAdjoint) {
  auto kol = systems::kolmogorov();
  auto L = make_standard_operator(StandardOperator::hormander_power, kol.fields, {1, 2}, {1, 2, std::size_t{1}});
  EXPECT_EQ(expand(operator_transpose(L)), formal_adjoint(expand(L)));
  auto g = systems::quadratic_chain(1);
  auto R = make_standard_operator(StandardOperator::sum_of_even_powers, g.fields, {1, 1}, {2, 1, {}});
  EXPECT_EQ(expand(operator_transpose(R)), formal_adjoint(expand(R)));
}

TEST(Operators, ExpansionExample) {
  auto g = systems::grushin();
  auto S = make_standard_operator(StandardOperator::sublaplacian_power, g.fields, {1, 1});
  // X1^2 + X2^2 = D1^2 + x1^2 D2^2
  EXPECT_EQ(expand(S).to_string(), "(1)*D1^2 + (x1^2)*D2^2");
  Polynomial u = x(2, 1).pow(2);
  EXPECT_EQ(expand(S).apply(u), Rational(2) * x(2, 0).pow(2));
}

TEST(Operators, RocklandPatternClassification) {
  auto g = systems::grushin();
  auto L4 = make_standard_operator(StandardOperator::sum_of_even_powers, g.fields, {1, 1}, {2, 1, {}});
  auto m4 = match_positive_rockland_pattern(L4);
  EXPECT_TRUE(m4.matches);
  EXPECT_EQ(m4.nu0, 2);
  EXPECT_EQ(m4.sign, 1);
  auto S = make_standard_operator(StandardOperator::sublaplacian_power, g.fields, {1, 1});
  auto m2 = match_positive_rockland_pattern(S);
  EXPECT_TRUE(m2.matches);
  EXPECT_EQ(m2.nu0, 1);
  EXPECT_EQ(m2.sign, -1);
  auto kol = systems::kolmogorov();
  for (unsigned k = 1; k <= 2; ++k) {
    auto H = make_standard_operator(StandardOperator::hormander_power, kol.fields, {1, 2}, {1, k, std::size_t{1}});
    EXPECT_FALSE(classify_positive_rockland_pattern(H));
  }
}

TEST(Operators, HeatExtension) {
  auto g = systems::grushin();
  auto S = make_standard_operator(StandardOperator::sublaplacian_power, g.fields, {1, 1});
  auto h = heat_extend(S, g.dilation, 1);
  EXPECT_EQ(h.dilation.exponents(), (std::vector<int>{1, 2, 2}));
  EXPECT_EQ(h.dilation.homogeneous_dimension(), 5);
  EXPECT_EQ(h.op.nu(), 2);
  auto L4 = make_standard_operator(StandardOperator::sum_of_even_powers, g.fields, {1, 1}, {2, 1, {}});
  auto h4 = heat_extend(L4, g.dilation, -1);
  EXPECT_EQ(h4.dilation.exponents(), (std::vector<int>{1, 2, 4}));
  EXPECT_EQ(h4.op.nu(), 4);
  EXPECT_EQ(h4.dilation.homogeneous_dimension(), g.dilation.homogeneous_dimension() + 4);
  auto deg = certify_system(h4.op.fields(), h4.dilation);
  EXPECT_EQ(deg, (std::vector<int>{1, 1, 4}));
  EXPECT_EQ(h4.op.terms().terms().at({h4.t_field}), Rational(-1));
  // t inserted before coordinates of larger weight
  auto c = systems::chain(5);
  auto Lc = make_standard_operator(StandardOperator::sum_of_even_powers, c.fields, {1, 1}, {2, 1, {}});
  auto hc = heat_extend(Lc, c.dilation, 1);
  EXPECT_EQ(hc.dilation.exponents(), (std::vector<int>{1, 2, 3, 4, 4, 5}));
  EXPECT_EQ(hc.t_index, 4u);
  EXPECT_EQ(certify_system(hc.op.fields(), hc.dilation), (std::vector<int>{1, 1, 4}));
}
