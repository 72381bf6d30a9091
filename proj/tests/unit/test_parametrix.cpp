#include <gtest/gtest.h>

#include "hinf/parametrix.hpp"

#include <cmath>

namespace
{
  using hinf::Complex;
  using hinf::Matrix;
  using hinf::pi;

  const char* variable_laplace = "(2+sin(x))*(1+xi^2)";
  const char* default_scene = "(2+sin(x))*(1+xi^2)+5";

  int mode_of(const hinf::TorusGrid& g, int xi)
  {
    const int v[1] = {xi};
    return g.mode_index(v);
  }

  hinf::Parametrix engine(const char* text, int P, int N = 3, int jet_order = -1)
  {
    const hinf::TorusGrid g(1, P);
    return hinf::Parametrix(hinf::parse_symbol(text, 1), g, {N, 0.0, jet_order, pi / 2});
  }

  // sup over |xi| <= Xi - margin
  double window_sup(const hinf::GridSymbol& a, int margin) { return a.sup_norm(margin); }
}  // namespace

TEST(Parametrix, B0OfBracketSquaredAtMinusOne)
{
  const auto eng = engine("bracket(xi)^2", 16);
  const auto b = eng.bj(-1.0);
  ASSERT_EQ(b.size(), 3u);
  const int m0 = mode_of(eng.grid(), 0);
  for (int i = 0; i < eng.grid().size(); ++i) EXPECT_NEAR(std::abs(b[0](i, m0) - 0.5), 0.0, 1e-15);
}

TEST(Parametrix, B1MatchesClosedForm)
{
  const auto eng = engine(variable_laplace, 16);
  const Complex lambda = -1.0;
  const auto b = eng.bj(lambda);
  const int m1 = mode_of(eng.grid(), 1);
  EXPECT_NEAR(std::abs(b[1](0, m1) - Complex(0.0, -0.064)), 0.0, 1e-14);

  // b_1 = -i b_0^3 (d_xi a)(d_x a) at every node
  const hinf::TorusGrid& g = eng.grid();
  double err = 0.0;
  for (int i = 0; i < g.size(); ++i)
    for (int m = 0; m < g.size(); ++m)
    {
      const double x = g.x_axis(i);
      const double xi = g.xi_axis(m);
      const Complex b0 = 1.0 / ((2.0 + std::sin(x)) * (1.0 + xi * xi) - lambda);
      const Complex expect = Complex(0.0, -1.0) * b0 * b0 * b0 * (2.0 * xi * (2.0 + std::sin(x))) * (std::cos(x) * (1.0 + xi * xi));
      err = std::max(err, std::abs(b[1](i, m) - expect) / std::max(1e-300, std::abs(b0)));
    }
  EXPECT_LT(err, 1e-12);
}

TEST(Parametrix, XIndependentSymbolCollapses)
{
  const auto eng = engine("bracket(xi)^2+1", 32);
  const Complex lambda(-3.0, 2.0);
  const auto b = eng.bj(lambda);
  for (std::size_t j = 1; j < b.size(); ++j) EXPECT_EQ(b[j].max_abs(), 0.0) << "j = " << j;

  const hinf::GridSymbol bN = eng.bN(lambda);
  const auto rem = eng.remainder(lambda, bN);
  EXPECT_LT(window_sup(rem.r, 0), 1e-13);

  const auto res = eng.resolvent(lambda);
  ASSERT_TRUE(res.resolvent && res.sN);
  const hinf::TorusGrid& g = eng.grid();
  for (int m = 0; m < g.size(); ++m)
  {
    const Complex expect = 1.0 / (g.bracket(m) * g.bracket(m) + 1.0 - lambda);
    EXPECT_LT(std::abs((*res.resolvent)(0, m) - expect), 1e-14);
  }
  EXPECT_LT(res.sN->max_abs(), 1e-14);
  EXPECT_EQ(eng.find_R(hinf::Sector(pi / 2), 6).R, 1.0);
}

TEST(Parametrix, ResolventResidualDefaultScene)
{
  const auto eng = engine(default_scene, 128);
  const auto res = eng.resolvent(-1.0);
  EXPECT_LE(res.diagnostics.residual, 1e-10);
  EXPECT_EQ(res.diagnostics.path, hinf::ResolventPath::neumann);

  // independent check through the dense inverse
  const hinf::DenseResolvent dense = hinf::dense_resolvent(eng.quantized(), -1.0);
  EXPECT_LT((res.op - dense.X).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Parametrix, PointwiseResolventIdentity)
{
  const auto eng = engine(variable_laplace, 16);
  const Complex l(-2.0, 3.0), mu(-0.5, -7.0);
  const auto bl = eng.bj(l)[0];
  const auto bm = eng.bj(mu)[0];
  double worst = 0.0;
  for (int i = 0; i < eng.grid().size(); ++i)
    for (int m = 0; m < eng.grid().size(); ++m)
    {
      const Complex lhs = bl(i, m) - bm(i, m);
      const Complex rhs = (l - mu) * bl(i, m) * bm(i, m);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
  EXPECT_LT(worst, 1e-12);
}

TEST(Parametrix, BatchedAndNodewiseJetsAgree)
{
  const auto eng = engine(default_scene, 32);
  for (Complex lambda : {Complex(-1.0, 0.0), Complex(0.0, 40.0), Complex(0.0, -900.0)})
  {
    const hinf::GridSymbol bN = eng.bN(lambda);
    double worst = 0.0;
    for (int i = 0; i < eng.grid().size(); i += 3)
      for (int m = 0; m < eng.grid().size(); ++m)
        worst = std::max(worst, std::abs(eng.node_bN(i, m, lambda)(0, 0) - bN(i, m)) / std::abs(bN(i, m)));
    EXPECT_LT(worst, 1e-13) << lambda;
  }
}

TEST(Parametrix, DerivativesMatchSpectralDifferentiation)
{
  const auto eng = engine(variable_laplace, 64, 3, 4);
  const Complex lambda(0.0, 12.0);
  const auto b = eng.bj(lambda);
  for (int j = 0; j < 3; ++j)
  {
    const hinf::GridSymbol exact = eng.bj_derivative(lambda, j, {0}, {1});
    const hinf::GridSymbol spectral = b[j].dx(0);
    EXPECT_LT((exact - spectral).sup_norm(4), 1e-9 * std::max(1.0, spectral.sup_norm(4))) << "j = " << j;
  }
}

TEST(Parametrix, LambdaInsideOmegaRejected)
{
  const auto eng = engine(variable_laplace, 16);
  EXPECT_THROW(eng.check_lambda(Complex(1.0, 0.0)), hinf::DomainError);
  EXPECT_NO_THROW(eng.check_lambda(Complex(0.0, 5.0)));
}

TEST(Parametrix, ZeroOrderRejected)
{
  const hinf::TorusGrid g(1, 16);
  EXPECT_THROW(hinf::Parametrix(hinf::parse_symbol(variable_laplace, 1), g, {0}), hinf::DomainError);
}

TEST(Parametrix, FindRHalvingCheck)
{
  const auto eng = engine(variable_laplace, 64);
  const hinf::FindRResult fr = eng.find_R(hinf::Sector(pi / 2), 12);
  ASSERT_GT(fr.R, 0.0);
  EXPECT_EQ(fr.R, 4.0);
  std::size_t j = 0;
  while (fr.radii[j] < fr.R) ++j;
  ASSERT_LT(j + 1, fr.radii.size());
  EXPECT_LE(fr.norms[j + 1], 0.6 * fr.norms[j]);
}

TEST(Parametrix, ShiftedSymbolHasResolventAtZero)
{
  const hinf::TorusGrid g(1, 64);
  const auto a = hinf::parse_symbol(variable_laplace, 1);
  const double R = hinf::find_R(a, 3, hinf::Sector(pi / 2), g);
  const auto shifted = hinf::shift(a, 2.0 * R);
  const auto qa = hinf::quantize(hinf::sample(shifted, g));
  EXPECT_NO_THROW(hinf::dense_resolvent(qa, 0.0));
}

TEST(Parametrix, ResolventIsHolomorphic)
{
  const auto eng = engine(default_scene, 32);
  const Complex l0(-3.0, 1.0);
  const Matrix R0 = eng.resolvent(l0).op;
  const Matrix target = R0 * R0;  // d/dlambda (a - lambda)^{-#} = (a - lambda)^{-#} # (a - lambda)^{-#}
  auto err = [&](double h) { return ((eng.resolvent(l0 + h).op - R0) / h - target).cwiseAbs().maxCoeff(); };
  const double e2 = err(1e-2), e3 = err(1e-3);
  const double drop = e2 / e3;
  EXPECT_GT(drop, 5.0);
  EXPECT_LT(drop, 20.0);
}

TEST(Parametrix, SweepDecaySlopes)
{
  const auto eng = engine(default_scene, 128);
  const hinf::Sector sector(pi / 2);
  const double R = eng.find_R(sector).R;
  hinf::SweepOptions opt;
  opt.margin = 16;
  opt.left = true;
  const auto fam = hinf::parametrix_sweep(eng, {2.0, 1.0, 0.0}, hinf::ray_sweep(sector, 10.0, 1e4, 20), R, opt);
  EXPECT_NEAR(fam.slope_rN, -1.0, 0.15);
  EXPECT_NEAR(fam.slope_sN, -2.0, 0.2);
  EXPECT_NEAR(fam.slope_bN, 0.0, 0.1);
  double worst_left = 0.0, worst_res = 0.0;
  for (const auto& row : fam.rows)
  {
    worst_left = std::max(worst_left, std::hypot(1.0, std::abs(row.lambda)) * row.left_rN_norm);
    worst_res = std::max(worst_res, row.residual);
  }
  EXPECT_TRUE(std::isfinite(worst_left));
  EXPECT_LE(worst_res, 1e-10);
}
