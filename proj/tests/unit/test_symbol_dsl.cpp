#include <gtest/gtest.h>

#include "hinf/jet.hpp"
#include "hinf/symbol_expr.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace
{
  using hinf::Complex;

  Complex eval1(const hinf::SymbolExpr& s, double x, double xi)
  {
    const double xs[] = {x};
    const double xis[] = {xi};
    return s.evaluate(xs, xis);
  }

  TEST(SymbolDsl, BracketSquareAtOrigin)
  {
    const auto s = hinf::parse_symbol("bracket(xi)^2", 1);
    EXPECT_NEAR(std::abs(eval1(s, 0.0, 0.0) - 1.0), 0.0, 1e-15);
  }

  TEST(SymbolDsl, VariableLaplaceValue)
  {
    const auto s = hinf::parse_symbol("(2+sin(x1))*(1+xi1^2)", 1);
    EXPECT_NEAR(std::abs(eval1(s, hinf::pi / 2, 1.0) - 6.0), 0.0, 1e-14);
  }

  TEST(SymbolDsl, SyntaxErrorOffset)
  {
    try
    {
      hinf::parse_symbol("2+*x1", 1);
      FAIL() << "expected a parse error";
    }
    catch (const hinf::ParseError& e)
    {
      EXPECT_EQ(e.offset(), 2u);
    }
  }

  TEST(SymbolDsl, RejectsUnknownIdentifierAndRange)
  {
    EXPECT_THROW(hinf::parse_symbol("foo+1", 1), hinf::ParseError);
    EXPECT_THROW(hinf::parse_symbol("x3", 2), hinf::ParseError);
    EXPECT_THROW(hinf::parse_symbol("xi", 2), hinf::ParseError);
    EXPECT_THROW(hinf::parse_symbol("sin(x1", 1), hinf::ParseError);
    EXPECT_THROW(hinf::parse_symbol("1+", 1), hinf::ParseError);
  }

  TEST(SymbolDsl, RejectsNonPeriodicAndBranchCuts)
  {
    EXPECT_THROW(hinf::parse_symbol("x1*xi1", 1), hinf::DomainError);
    EXPECT_THROW(hinf::parse_symbol("log(xi1)", 1), hinf::DomainError);
    EXPECT_THROW(hinf::parse_symbol("sqrt(xi1)", 1), hinf::DomainError);
    EXPECT_THROW(hinf::parse_symbol("1/xi1", 1), hinf::DomainError);
    EXPECT_NO_THROW(hinf::parse_symbol("log(bracket(xi))", 1));
    EXPECT_NO_THROW(hinf::parse_symbol("sqrt(2+cos(x1))*xi1^3", 1));
  }

  TEST(SymbolDsl, ExponentIsRightAssociative)
  {
    const auto s = hinf::parse_symbol("2^3^2", 1);
    EXPECT_NEAR(eval1(s, 0, 0).real(), 512.0, 1e-12);
    const auto t = hinf::parse_symbol("-2^2", 1);
    EXPECT_NEAR(eval1(t, 0, 0).real(), -4.0, 1e-12);
  }

  TEST(SymbolDsl, ImaginaryUnitAndPi)
  {
    const auto s = hinf::parse_symbol("exp(i*pi)", 1);
    EXPECT_NEAR(std::abs(eval1(s, 0, 0) + 1.0), 0.0, 1e-15);
  }

  TEST(SymbolDsl, DerivativeExamples)
  {
    const auto a = hinf::parse_symbol("bracket(xi)^2", 1);
    EXPECT_NEAR(eval1(a.differentiate({1}, {0}), 0.0, 3.0).real(), 6.0, 1e-12);

    const auto b = hinf::parse_symbol("2+sin(x1)", 1);
    EXPECT_NEAR(eval1(b.differentiate({0}, {1}), 0.0, 0.0).real(), 1.0, 1e-15);

    const auto c = hinf::parse_symbol("(2+sin(x1))*(1+xi1^2)", 1);
    EXPECT_NEAR(eval1(c.differentiate({1}, {1}), 0.0, 1.0).real(), 2.0, 1e-14);
  }

  TEST(SymbolDsl, DerivativeOrderBudget)
  {
    const auto a = hinf::parse_symbol("bracket(xi)^3", 1);
    EXPECT_NO_THROW(a.differentiate({8}, {0}));
    EXPECT_THROW(a.differentiate({5}, {4}), hinf::DomainError);
    EXPECT_THROW(a.differentiate({4}, {0}).differentiate({5}, {0}), hinf::DomainError);
  }

  TEST(SymbolDsl, MixedDerivativesCommute)
  {
    const auto a = hinf::parse_symbol("exp(i*sin(x1+x2))*bracket(xi)^1.5/(3+cos(x2)*xi1/bracket(xi))", 2);
    const auto d1 = a.differentiate({1, 0}, {0, 0}).differentiate({0, 0}, {0, 1});
    const auto d2 = a.differentiate({0, 0}, {0, 1}).differentiate({1, 0}, {0, 0});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 2 * hinf::pi), uxi(-20.0, 20.0);
    for (int s = 0; s < 100; ++s)
    {
      const double x[] = {ux(rng), ux(rng)};
      const double xi[] = {uxi(rng), uxi(rng)};
      const Complex v1 = d1.evaluate(x, xi);
      const Complex v2 = d2.evaluate(x, xi);
      EXPECT_LE(std::abs(v1 - v2), 1e-12 * std::max(1.0, std::abs(v1)));
    }
  }

  TEST(SymbolDsl, DerivativeMatchesCentralDifferences)
  {
    const auto a = hinf::parse_symbol("(2+sin(x1))*bracket(xi)^2.5+exp(cos(x1))*log(2+xi1^2)", 1);
    const auto dxi = a.differentiate({1}, {0});
    const auto dx = a.differentiate({0}, {1});
    const double h = 1e-4;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 2 * hinf::pi), uxi(-10.0, 10.0);
    for (int s = 0; s < 50; ++s)
    {
      const double x = ux(rng);
      const double xi = uxi(rng);
      const Complex fd_xi = (eval1(a, x, xi + h) - eval1(a, x, xi - h)) / (2 * h);
      const Complex fd_x = (eval1(a, x + h, xi) - eval1(a, x - h, xi)) / (2 * h);
      const Complex ex_xi = eval1(dxi, x, xi);
      const Complex ex_x = eval1(dx, x, xi);
      if (std::abs(ex_xi) > 1e-3) EXPECT_LE(std::abs(fd_xi - ex_xi), 1e-6 * std::abs(ex_xi));
      if (std::abs(ex_x) > 1e-3) EXPECT_LE(std::abs(fd_x - ex_x), 1e-6 * std::abs(ex_x));
    }
  }

  TEST(SymbolDsl, PrintParseRoundTrip)
  {
    const char* texts[] = {"(2+sin(x1))*(1+xi1^2)+5", "exp(0.7*i)*bracket(xi)^2", "-bracket(xi)^-0.5*cos(x1)",
        "pow(2+cos(x1), 1/3)*sqrt(1+xi1^2)-(1-2*i)/(3+xi1^2)", "bracket(sin(x1)*xi1)^3"};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(0.0, 2 * hinf::pi), uxi(-30.0, 30.0);
    for (const char* t : texts)
    {
      const auto a = hinf::parse_symbol(t, 1);
      const auto b = hinf::parse_symbol(a.to_string(), 1);
      for (int s = 0; s < 20; ++s)
      {
        const double x = ux(rng), xi = uxi(rng);
        EXPECT_EQ(eval1(a, x, xi), eval1(b, x, xi)) << t << " -> " << a.to_string();
      }
    }
  }

  TEST(SymbolDsl, MatrixSymbols)
  {
    const auto j = hinf::parse_symbol("[bracket(xi)^2, bracket(xi); 0, bracket(xi)^2]", 1, 2);
    const double x[] = {0.0};
    const double xi[] = {1.0};
    const auto m = j.evaluate_matrix(x, xi);
    EXPECT_NEAR(m(0, 0).real(), 2.0, 1e-14);
    EXPECT_NEAR(m(0, 1).real(), std::sqrt(2.0), 1e-14);
    EXPECT_EQ(m(1, 0), Complex(0.0));
    EXPECT_THROW(hinf::parse_symbol("[1, 2; 3]", 1, 2), hinf::ParseError);
    EXPECT_THROW(hinf::parse_symbol("[1, 2; 3, 4]", 1, 1), hinf::ParseError);
    const auto back = hinf::parse_symbol(j.to_string(), 1, 2);
    EXPECT_EQ(back.evaluate_matrix(x, xi), m);
  }

  TEST(SymbolDsl, Presets)
  {
    const auto p = hinf::preset_symbol("variable_laplace", 1);
    EXPECT_NEAR(eval1(p.symbol, hinf::pi / 2, 1.0).real(), 6.0, 1e-14);
    EXPECT_EQ(p.cls.m, 2.0);
    const auto q = hinf::preset_symbol("-bracket_power 2", 1);
    EXPECT_NEAR(eval1(q.symbol, 0.3, 2.0).real(), -5.0, 1e-13);
    const auto r = hinf::preset_symbol("rotated_phase 0.5", 1);
    EXPECT_NEAR(std::abs(eval1(r.symbol, 0.0, 0.0) - std::polar(1.0, 0.5)), 0.0, 1e-15);
    const auto v2 = hinf::preset_symbol("variable_laplace", 2);
    const double x[] = {hinf::pi / 2, 0.0};
    const double xi[] = {1.0, 1.0};
    EXPECT_NEAR(v2.symbol.evaluate(x, xi).real(), 9.0, 1e-13);
    EXPECT_EQ(hinf::preset_symbol("jordan2").symbol.size(), 2);
    EXPECT_THROW(hinf::preset_symbol("nope"), hinf::DomainError);
  }

  TEST(SymbolDsl, JetMatchesSymbolicDerivatives)
  {
    const auto a = hinf::parse_symbol("(2+sin(x1))*bracket(xi)^2.5/(3+cos(x1)*xi1^2)+exp(i*x1)*log(1+xi1^2)", 1);
    const auto layout = hinf::JetLayout::get(2, 4);
    const double x[] = {0.7};
    const double xi[] = {2.3};
    const auto jet = a.evaluate_jet(x, xi, *layout);
    for (int idx = 0; idx < layout->size(); ++idx)
    {
      const auto e = layout->exponent(idx);
      const auto d = a.differentiate({e[1]}, {e[0]});
      const Complex exact = d.evaluate(x, xi);
      const Complex viajet = jet.derivative_value(e)(0, 0);
      EXPECT_LE(std::abs(exact - viajet), 1e-11 * std::max(1.0, std::abs(exact))) << e[0] << "," << e[1];
    }
  }

  TEST(SymbolDsl, ShiftAddsConstant)
  {
    const auto a = hinf::parse_symbol("bracket(xi)^2", 1);
    const auto b = hinf::shift(a, 1.0);
    EXPECT_NEAR(eval1(b, 0.0, 2.0).real(), 6.0, 1e-14);
    EXPECT_THROW(hinf::shift(a, -1.0), hinf::DomainError);
  }

  TEST(SymbolClass, Validation)
  {
    EXPECT_NO_THROW((hinf::SymbolClassParams{2, 1, 0}.validate_for_hypoellipticity()));
    EXPECT_THROW((hinf::SymbolClassParams{2, 0.5, 0.5}.validate_for_hypoellipticity()), hinf::DomainError);
    EXPECT_NO_THROW((hinf::SymbolClassParams{2, 0.5, 0.5}.validate_for_seminorms()));
    EXPECT_THROW((hinf::SymbolClassParams{-1, 1, 0}.validate_for_hypoellipticity()), hinf::DomainError);
    EXPECT_THROW((hinf::SymbolClassParams{0, 1, 1}.validate_for_seminorms()), hinf::DomainError);
  }
}  // namespace
