#include <gtest/gtest.h>

#include "hinf/funcalc.hpp"

#include <cmath>

namespace
{
  using hinf::Complex;
  using hinf::Matrix;
  using hinf::pi;

  const hinf::Sector half_plane(pi / 2);

  hinf::ContourOptions options(double tol, double c0, double lo, double hi)
  {
    hinf::ContourOptions o;
    o.tol = tol;
    o.c0 = c0;
    o.probes = hinf::spectral_probes(lo, hi, 3);
    return o;
  }

  hinf::Parametrix engine(const char* text, int P)
  {
    return hinf::Parametrix(hinf::parse_symbol(text, 1), hinf::TorusGrid(1, P), {3, 0.0, -1, pi / 2});
  }

  double max_rel(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }
}  // namespace

TEST(Contour, CauchyCertificate)
{
  const hinf::HFun f = hinf::s_power(1.0, half_plane);
  hinf::ContourOptions o = options(1e-8, 2.0, 0.5, 20.0);
  o.probes = {0.5, 1.0, 4.0, 20.0};
  const hinf::Contour c = hinf::build_contour(half_plane, f, o);
  EXPECT_NEAR(std::abs(hinf::cauchy_value(c, f, 1.0) - 0.25), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(hinf::cauchy_value(c, f, 4.0) - 0.16), 0.0, 1e-8);
  for (double z : {0.5, 20.0}) EXPECT_LT(std::abs(hinf::cauchy_value(c, f, z) - f(z)), 1e-8) << z;
  EXPECT_LE(c.r_min, c.r_max);
  EXPECT_LE(c.tail_bound + c.near_zero_bound, 0.5 * o.tol * (1.0 + 1e-12));
}

TEST(Contour, CauchyOnNarrowSector)
{
  const hinf::Sector s(pi / 4);
  const hinf::HFun f = hinf::s_power(0.5, s);
  const hinf::Contour c = hinf::build_contour(s, f, options(1e-8, 3.0, 0.1, 100.0));
  for (Complex z : {Complex(0.3, 0.0), Complex(2.0, 0.5), Complex(50.0, -10.0)})
    EXPECT_LT(std::abs(hinf::cauchy_value(c, f, z) - f(z)), 1e-8) << z;
}

TEST(Contour, InvertedRadiiRejected)
{
  hinf::ContourOptions o = options(1e-8, 1.0, 1.0, 10.0);
  o.r_min = 10.0;
  o.r_max = 1.0;
  EXPECT_THROW(hinf::build_contour(half_plane, hinf::s_power(1.0, half_plane), o), hinf::DomainError);
}

TEST(Contour, ProbeInsideSectorRejected)
{
  hinf::ContourOptions o = options(1e-8, 1.0, 1.0, 10.0);
  o.probes = {Complex(-1.0, 0.0)};
  EXPECT_THROW(hinf::build_contour(half_plane, hinf::s_power(1.0, half_plane), o), hinf::DomainError);
}

TEST(Contour, GaussLegendreIntegratesPolynomials)
{
  const auto& gl = hinf::gauss_legendre(8);
  double s = 0.0;
  for (int q = 0; q < 8; ++q) s += gl.w[q] * std::pow(gl.x[q], 14);
  EXPECT_NEAR(s, 2.0 / 15.0, 1e-15);
}

TEST(HFun, RegularizerValue)
{
  EXPECT_NEAR(std::abs(hinf::regularizer(2.0, 1e3) - 0.997505), 0.0, 5e-7);
  EXPECT_NEAR(hinf::regularizer(2.0, 1e3).real(), (2000.0 / 2001.0) / 1.002, 1e-15);
}

TEST(HFun, ImaginaryPowerPrincipalBranch)
{
  const hinf::HFun f = hinf::regularized_imaginary_power(pi, 1e3, half_plane);
  const Complex e = std::exp(1.0);
  EXPECT_LT(std::abs(f(e) + hinf::regularizer(e, 1e3)), 1e-14);
}

TEST(HFun, ValidationRejectsNonDecaying)
{
  const hinf::HFun one{"one", [](Complex) { return Complex(1.0); }, 1.0, 10.0};
  EXPECT_THROW(hinf::validate_hfun(one, half_plane), hinf::DomainError);
  EXPECT_NO_THROW(hinf::validate_hfun(hinf::s_power(1.0, half_plane), half_plane));
}

TEST(HFun, SupNormStableUnderDoubling)
{
  for (const auto& f : {hinf::s_power(0.25, half_plane), hinf::regularized_imaginary_power(3.0, 1e3, half_plane)})
  {
    const double a = hinf::sup_norm(f, half_plane, {1e-12, 1e12, 32});
    const double b = hinf::sup_norm(f, half_plane, {1e-12, 1e12, 64});
    EXPECT_LT(std::abs(b - a), 0.01 * a) << f.name;
  }
}

TEST(HFun, RegularizedImaginaryPowersStayWithinFourTimesTheLimit)
{
  for (double t : {-5.0, -1.0, 0.0, 2.0, 5.0})
  {
    const hinf::HinfFun f = hinf::imaginary_power_function(t, half_plane);
    const double limit = hinf::sup_norm(f.eval, half_plane);
    EXPECT_NEAR(limit, std::exp(half_plane.theta() * std::abs(t)), 1e-6 * limit);
    for (double n : {1.0, 10.0, 1e3, 1e6}) EXPECT_LE(hinf::sup_norm(f.regularize(n), half_plane), 4.0 * limit);
  }
}

TEST(Oracle, HessenbergResolventMatchesDenseLU)
{
  const auto eng = engine("(2+sin(x))*(1+xi^2)+5", 32);
  const hinf::HessenbergResolvent hr(eng.quantized().matrix);
  for (Complex l : {Complex(0.0), Complex(-3.0, 4.0), Complex(0.0, 1e5)})
    EXPECT_LT(max_rel(hr.resolvent(l), hinf::dense_resolvent(eng.quantized(), l).X), 1e-12) << l;
  // bracket(xi)^2 + 5 has the eigenvalue 6 at xi = 0
  const auto flat = engine("bracket(xi)^2+5", 16);
  EXPECT_THROW(hinf::HessenbergResolvent(flat.quantized().matrix).reduced(6.0), hinf::NumericalError);
}

TEST(FunctionalCalculus, XIndependentSymbolIsPointwise)
{
  const auto eng = engine("bracket(xi)^2+1", 32);
  const hinf::HFun f = hinf::s_power(1.0, half_plane);
  const hinf::Contour c = hinf::build_contour(half_plane, f, options(1e-9, 1.5, 1.0, 1000.0));
  const hinf::GridSymbol fa = hinf::f_of_symbol(eng, f, c);
  const hinf::GridSymbol oracle = hinf::extract_symbol(eng.grid(), 1, hinf::f_of_operator_oracle(eng.quantized(), f, c));
  const hinf::TorusGrid& g = eng.grid();
  double worst = 0.0, worst_oracle = 0.0;
  for (int i = 0; i < g.size(); ++i)
    for (int m = 0; m < g.size(); ++m)
    {
      const Complex expect = f(g.bracket(m) * g.bracket(m) + 1.0);
      worst = std::max(worst, std::abs(fa(i, m) - expect));
      worst_oracle = std::max(worst_oracle, std::abs(oracle(i, m) - expect));
    }
  EXPECT_LT(worst, 1e-8);
  EXPECT_LT(worst_oracle, 1e-8);
  const int zero[1] = {0};
  EXPECT_NEAR(std::abs(fa(5, g.mode_index(zero)) - 2.0 / 9.0), 0.0, 1e-8);
}

TEST(FunctionalCalculus, ConstantSymbolImaginaryPower)
{
  const auto eng = engine("exp(1)", 8);
  const double t = pi, n = 1e3;
  const hinf::HFun f = hinf::regularized_imaginary_power(t, n, half_plane);
  const hinf::Contour c = hinf::build_contour(half_plane, f, options(1e-9, 1.5, 0.5, 10.0));
  const hinf::GridSymbol p = hinf::imaginary_power(eng, half_plane, t, n, c);
  EXPECT_LT(std::abs(p(3, 2) + hinf::regularizer(std::exp(1.0), n)), 1e-8);
}

TEST(FunctionalCalculus, Linearity)
{
  const auto eng = engine("(2+sin(x))*(1+xi^2)+5", 32);
  const hinf::HFun f = hinf::s_power(1.0, half_plane);
  const hinf::HFun g = hinf::s_power(0.5, half_plane);
  const Complex alpha(2.0, -1.0), beta(-0.5, 3.0);
  const hinf::HFun h = hinf::make_hfun(
      "combo", [&](Complex z) { return alpha * f(z) + beta * g(z); }, 0.5, half_plane);
  const std::vector<hinf::HFun> fam{f, g, h};
  const hinf::Contour c = hinf::build_contour(half_plane, fam, options(1e-8, 1.5, 6.0, 3000.0));
  const auto out = hinf::f_of_symbol(eng, fam, c);
  const hinf::GridSymbol combo = alpha * out.values[0] + beta * out.values[1];
  EXPECT_LT((out.values[2] - combo).max_abs(), 1e-10 * out.values[2].max_abs());
}

TEST(FunctionalCalculus, SymbolPathMatchesOracle)
{
  const auto eng = engine("(2+sin(x))*(1+xi^2)+5", 32);
  const std::vector<hinf::HFun> fam{hinf::s_power(0.5, half_plane), hinf::s_power(2.0, half_plane)};
  const hinf::ContourOptions o = options(1e-8, 1.5, 6.0, 3000.0);
  const auto sym = hinf::f_of_symbol(eng, fam, hinf::build_contour(half_plane, fam, o));
  const auto orc = hinf::f_of_operator_oracle(
      eng.quantized().matrix, fam, hinf::build_contour(half_plane, fam, hinf::oracle_options(o)));
  for (std::size_t m = 0; m < fam.size(); ++m) EXPECT_LT(hinf::relative_discrepancy(sym.ops[m], orc[m]), 1e-6);
  EXPECT_LE(sym.max_residual, 1e-10);
}

TEST(FunctionalCalculus, OracleMultiplicativity)
{
  const auto eng = engine("(2+sin(x))*(1+xi^2)+5", 32);
  const hinf::HFun f = hinf::s_power(1.0, half_plane);
  const hinf::HFun g = hinf::s_power(0.5, half_plane);
  const hinf::HFun fg = hinf::product(f, g);
  const std::vector<hinf::HFun> fam{f, g, fg};
  const hinf::Contour c = hinf::build_contour(half_plane, fam, options(1e-9, 1.5, 6.0, 3000.0));
  const auto ops = hinf::f_of_operator_oracle(eng.quantized().matrix, fam, c);
  EXPECT_LT(hinf::operator_norm(ops[2] - ops[0] * ops[1]).value, 1e-7);
}

TEST(FunctionalCalculus, ResolventProbeMatchesDirectSolve)
{
  const auto eng = engine("(2+sin(x))*(1+xi^2)+5", 32);
  const Complex mu = -10.0;
  const hinf::HFun f = hinf::resolvent_probe(mu, half_plane);
  const hinf::Contour c = hinf::build_contour(half_plane, f, options(1e-9, 1.5, 6.0, 3000.0));
  const Matrix& A = eng.quantized().matrix;
  const Matrix direct = A * hinf::dense_resolvent(A, mu).X * (-1.0) * hinf::dense_resolvent(A, -1.0).X;
  // (mu - A)^{-1} = -(A - mu)^{-1}, (1 + A)^{-1} = (A + 1)^{-1} = (A - (-1))^{-1}
  EXPECT_LT(hinf::operator_norm(hinf::f_of_operator_oracle(eng.quantized(), f, c) - direct).value, 1e-7);
}

TEST(FunctionalCalculus, DeformedContourReproducesParametrixPart)
{
  const auto eng = engine("(2+sin(x))*(1+xi^2)+5", 32);
  const hinf::HFun f = hinf::s_power(1.0, half_plane);
  const hinf::Contour c = hinf::build_contour(half_plane, f, options(1e-10, 1.5, 6.0, 3000.0));
  hinf::FcalcOptions fo;
  fo.split = true;
  const auto out = hinf::f_of_symbol(eng, std::span<const hinf::HFun>(&f, 1), c, fo);
  const hinf::GridSymbol deformed = hinf::deformed_bN_f(eng, f, half_plane);
  EXPECT_LT((deformed - out.bN_part[0]).max_abs(), 1e-7 * out.bN_part[0].max_abs());
  EXPECT_LT((out.bN_part[0] + out.sN_part[0] - out.values[0]).max_abs(), 1e-14);
}

TEST(FunctionalCalculus, ProbeRatioIsScaleInvariant)
{
  const auto eng = engine("(2+sin(x))*(1+xi^2)+5", 32);
  const hinf::HFun f = hinf::s_power(1.0, half_plane);
  const std::vector<hinf::HFun> fam{f, hinf::scaled(f, 2.0)};
  hinf::ProbeOptions po;
  po.contour = options(1e-8, 1.5, 6.0, 3000.0);
  po.seminorms = {{{0}, {0}}};
  po.margin = 4;
  const auto rep = hinf::hinf_bound_probe(eng, half_plane, fam, po);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_NEAR(rep.rows[1].op_norm, 2.0 * rep.rows[0].op_norm, 1e-10 * rep.rows[0].op_norm);
  EXPECT_NEAR(rep.rows[1].sup_norm, 2.0 * rep.rows[0].sup_norm, 1e-12);
  EXPECT_NEAR(rep.rows[1].ratio, rep.rows[0].ratio, 1e-10 * rep.rows[0].ratio);
  EXPECT_LE(rep.rows[0].ratio, rep.M());
}

TEST(FunctionalCalculus, ImaginaryPowersOfSelfAdjointOperator)
{
  // x-independent real symbol: op(a) is self-adjoint positive, so ||A^{it}|| ~ 1 for every t
  const auto eng = engine("bracket(xi)^2+5", 32);
  const std::vector<double> ts{-2.0, 0.0, 2.0};
  const auto rep = hinf::bip_sweep(eng.quantized().matrix, half_plane, ts, 1e6, options(1e-8, 1.5, 5.0, 1000.0));
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_NEAR(rep.rows[1].norm, 1.0, 1e-3);
  EXPECT_NEAR(rep.rows[0].norm, rep.rows[2].norm, 1e-8);
  EXPECT_LT(rep.rate, 0.01);
}

TEST(FunctionalCalculus, ResolventBoundSlope)
{
  const auto eng = engine("(2+sin(x))*(1+xi^2)+5", 32);
  const auto rep = hinf::resolvent_bound(eng.quantized().matrix, half_plane, 1.0, 1e6, 4);
  EXPECT_NEAR(rep.slope, -1.0, 0.1);
  EXPECT_TRUE(std::isfinite(rep.sup));
}
