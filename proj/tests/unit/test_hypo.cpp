#include <gtest/gtest.h>

#include "hinf/hypo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace
{
  using hinf::Complex;

  TEST(Sector, Membership)
  {
    hinf::Sector s(hinf::pi / 2);
    EXPECT_TRUE(s.contains(0.0));
    EXPECT_TRUE(s.contains(-1.0));
    EXPECT_TRUE(s.contains(Complex(0.0, 2.0)));
    EXPECT_FALSE(s.contains(1.0));
    EXPECT_FALSE(s.contains(Complex(1.0, 1e3)));
    for (double th : {0.1, 1.0, 3.0})
      for (double r : {1e-6, 1.0, 1e6}) EXPECT_FALSE(hinf::Sector(th).contains(r));
    EXPECT_THROW(hinf::Sector(0.0), hinf::DomainError);
    EXPECT_THROW(hinf::Sector(hinf::pi), hinf::DomainError);
  }

  TEST(Sector, BoundaryRaysAreInside)
  {
    for (double theta : {hinf::pi / 4, hinf::pi / 3, hinf::pi / 2, 0.7 * hinf::pi})
    {
      hinf::Sector s(theta);
      for (double r : {1e-3, 1.0, 10.0, 1e4})
      {
        EXPECT_TRUE(s.contains(s.ray(r, true))) << theta << ' ' << r;
        EXPECT_TRUE(s.contains(s.ray(r, false))) << theta << ' ' << r;
      }
      EXPECT_FALSE(s.contains(std::polar(1.0, theta - 1e-9)));
    }
  }

  TEST(SmallEigenvalues, AgainstGeneralSolver)
  {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int k = 1; k <= 4; ++k)
      for (int t = 0; t < 20; ++t)
      {
        hinf::Matrix m(k, k);
        for (int i = 0; i < k * k; ++i) m.data()[i] = Complex(nd(rng), nd(rng)) * 10.0;
        auto ours = hinf::small_eigenvalues(m);
        Eigen::ComplexEigenSolver<hinf::Matrix> es(m);
        std::vector<Complex> ref(es.eigenvalues().data(), es.eigenvalues().data() + k);
        for (const Complex r : ref)
        {
          double best = 1e300;
          for (const Complex o : ours) best = std::min(best, std::abs(o - r));
          EXPECT_LE(best, 1e-10 * std::max(1.0, std::abs(r)));
        }
      }
  }

  TEST(SmallEigenvalues, JordanBlock)
  {
    hinf::Matrix j(2, 2);
    j << 5.0, 2.0, 0.0, 5.0;
    for (const Complex e : hinf::small_eigenvalues(j)) EXPECT_NEAR(std::abs(e - 5.0), 0.0, 1e-12);
    hinf::Matrix j3 = hinf::Matrix::Identity(3, 3) * 2.0;
    j3(0, 1) = 1.0;
    j3(1, 2) = 1.0;
    for (const Complex e : hinf::small_eigenvalues(j3)) EXPECT_NEAR(std::abs(e - 2.0), 0.0, 1e-4);
  }

  TEST(CheckSpectrum, Examples)
  {
    hinf::TorusGrid g(1, 64);
    const auto pass = hinf::check_spectrum(hinf::parse_symbol("bracket(xi)^2", 1), hinf::Sector(hinf::pi / 2), 0.5, 0.0, g);
    EXPECT_TRUE(pass.pass);
    EXPECT_TRUE(pass.violations.empty());

    const auto fail = hinf::check_spectrum(hinf::parse_symbol("-bracket(xi)^2", 1), hinf::Sector(hinf::pi / 2), 0.5, 0.0, g);
    EXPECT_FALSE(fail.pass);
    ASSERT_FALSE(fail.violations.empty());
    for (const auto& v : fail.violations) EXPECT_LT(v.eigenvalue.real(), 0.0);

    const auto vl = hinf::check_spectrum(hinf::preset_symbol("variable_laplace").symbol, hinf::Sector(hinf::pi / 4), 0.5, 0.0, g);
    EXPECT_TRUE(vl.pass);
    EXPECT_NEAR(vl.min_modulus, 1.0, 1e-14);
    EXPECT_EQ(vl.min_x_index, 48);  // x = 3 pi / 2
    EXPECT_EQ(g.xi_axis(vl.min_mode), 0);

    const auto gap = hinf::check_spectrum(hinf::parse_symbol("bracket(xi)^2", 1), hinf::Sector(hinf::pi / 2), 1.0, 0.0, g);
    EXPECT_FALSE(gap.pass);
    const auto cut = hinf::check_spectrum(hinf::parse_symbol("bracket(xi)^2-2", 1), hinf::Sector(hinf::pi / 2), 0.5, 2.0, g);
    EXPECT_TRUE(cut.pass);
  }

  TEST(CheckSpectrum, ShiftAddsToTheGap)
  {
    hinf::TorusGrid g(1, 32);
    const auto a = hinf::preset_symbol("variable_laplace").symbol;
    for (double theta : {hinf::pi / 2, 2.0})
    {
      hinf::Sector s(theta);
      const auto base = hinf::check_spectrum(a, s, 0.5, 0.0, g);
      ASSERT_TRUE(base.pass);
      const double c0 = base.min_modulus;
      for (double c : {0.5, 3.0, 40.0})
      {
        const auto shifted = hinf::check_spectrum(hinf::shift(a, c), s, c + c0 * (1 - 1e-12), 0.0, g);
        EXPECT_TRUE(shifted.pass);
        EXPECT_NEAR(shifted.min_modulus, c + c0, 1e-12 * (c + c0));
      }
    }
  }

  TEST(HypoConstants, BracketSquare)
  {
    hinf::TorusGrid g(1, 128);
    const auto a = hinf::parse_symbol("bracket(xi)^2", 1);
    hinf::Sector s(hinf::pi / 2);
    const auto rep = hinf::estimate_hypo_constants(a, {2, 1, 0}, s, g, hinf::check_spectrum(a, s, 0.5, 0.0, g));
    EXPECT_NEAR(*rep.c_entry({0}, {0}), 1.0, 1e-14);
    const double Xi = g.window();
    EXPECT_NEAR(*rep.c_entry({1}, {0}), 2.0 * Xi / std::sqrt(1 + Xi * Xi), 1e-12);
    EXPECT_LE(*rep.c_entry({0}, {1}), 1e-14);
    ASSERT_TRUE(rep.c0.has_value());
    EXPECT_TRUE(std::isfinite(*rep.c0));
  }

  TEST(HypoConstants, StableUnderRefinement)
  {
    const auto a = hinf::shift(hinf::preset_symbol("variable_laplace").symbol, 1.0);
    hinf::Sector s(hinf::pi / 2);
    const hinf::SymbolClassParams cls{2, 1, 0};
    hinf::TorusGrid g(1, 32), fine(1, 64);
    hinf::HypoConstantsOptions coarse_opt{2, 8}, dense_opt{2, 16};
    const auto r1 = hinf::estimate_hypo_constants(a, cls, s, g, hinf::check_spectrum(a, s, 0.5, 0, g), coarse_opt);
    const auto r2 = hinf::estimate_hypo_constants(a, cls, s, g, hinf::check_spectrum(a, s, 0.5, 0, g), dense_opt);
    const auto r3 = hinf::estimate_hypo_constants(a, cls, s, fine, hinf::check_spectrum(a, s, 0.5, 0, fine), coarse_opt);
    ASSERT_EQ(r1.c_table.size(), r2.c_table.size());
    for (std::size_t t = 0; t < r1.c_table.size(); ++t)
    {
      const double v1 = r1.c_table[t].value;
      EXPECT_GE(r2.c_table[t].value, v1 * (1 - 1e-14));
      EXPECT_LE(r2.c_table[t].value, v1 * 1.01);
      EXPECT_GE(r3.c_table[t].value, v1 * (1 - 1e-14));
    }
    EXPECT_LE(std::abs(*r2.c0 - *r1.c0), 0.01 * *r1.c0);
  }

  TEST(HypoConstants, C0StabilizesWithRange)
  {
    // a = <xi>^2 + 1: c0 computed with the sample range growing by doubling
    const auto a = hinf::parse_symbol("bracket(xi)^2+1", 1);
    hinf::Sector s(hinf::pi / 2);
    std::vector<double> c0s;
    for (int P : {16, 32, 64, 128})
    {
      hinf::TorusGrid g(1, P);
      const auto r = hinf::estimate_hypo_constants(a, {2, 1, 0}, s, g, hinf::check_spectrum(a, s, 0.5, 0, g));
      c0s.push_back(*r.c0);
    }
    for (std::size_t i = 1; i < c0s.size(); ++i)
    {
      EXPECT_GE(c0s[i], c0s[i - 1] * (1 - 1e-12));
      EXPECT_LE(c0s[i], c0s[i - 1] * 1.05);
    }
  }

  TEST(HypoConstants, FarResolventIsDominated)
  {
    // for |lambda| >= 2 ||a||: ||da|| ||(a - lambda)^{-1}|| <= ||da|| ||a^{-1}||
    const auto a = hinf::parse_symbol("[2+sin(x1)+xi1^2, 1; 0.5*cos(x1), 3+xi1^2]", 1, 2);
    const auto da = a.differentiate({1}, {0});
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ux(0, 2 * hinf::pi), uxi(-20, 20), uphi(-hinf::pi, hinf::pi), uf(1, 8);
    for (int t = 0; t < 200; ++t)
    {
      const double x[] = {ux(rng)};
      const double xi[] = {uxi(rng)};
      const hinf::Matrix v = a.evaluate_matrix(x, xi);
      const double dn = hinf::spectral_norm(da.evaluate_matrix(x, xi));
      const Complex lambda = std::polar(2.0 * hinf::spectral_norm(v) * uf(rng), uphi(rng));
      hinf::Matrix s = v;
      s.diagonal().array() -= lambda;
      const double lhs = dn * hinf::spectral_norm(s.inverse());
      const double rhs = dn * hinf::spectral_norm(v.inverse());
      EXPECT_LE(lhs, rhs * (1 + 1e-10));
    }
  }

  TEST(OmegaRegion, Examples)
  {
    const auto a = hinf::parse_symbol("bracket(xi)^2", 1);
    hinf::Sector s(hinf::pi / 2);
    const double x[] = {0.0};
    const double xi0[] = {0.0};
    const double xi1[] = {1.0};
    EXPECT_NEAR(hinf::omega_region(a, s, x, xi0).radius, 2.0, 1e-15);
    const auto w = hinf::omega_region(a, s, x, xi1);
    EXPECT_NEAR(w.radius, 4.0, 1e-14);
    EXPECT_FALSE(w.contains(-1.0));
    EXPECT_TRUE(w.contains(1.0));
    EXPECT_FALSE(w.contains(5.0));
  }

  TEST(HypoReport, CsvAndSummary)
  {
    hinf::TorusGrid g(1, 16);
    const auto a = hinf::parse_symbol("bracket(xi)^2", 1);
    hinf::Sector s(hinf::pi / 2);
    const auto r = hinf::estimate_hypo_constants(a, {2, 1, 0}, s, g, hinf::check_spectrum(a, s, 0.5, 0, g));
    std::ostringstream out;
    r.write_csv(out);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "kind,alpha,beta,x_index,mode,re,im,value");
    EXPECT_NE(out.str().find("c_ab,1,0,,,,,"), std::string::npos);
    EXPECT_NE(r.summary().find("pass true"), std::string::npos);
  }
}  // namespace
