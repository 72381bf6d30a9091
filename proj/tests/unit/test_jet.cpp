#include <gtest/gtest.h>

#include "hinf/jet.hpp"

#include <cmath>

namespace
{
  using hinf::Complex;
  using hinf::JetLayout;
  using hinf::MatJet;

  TEST(Jet, LayoutSizes)
  {
    EXPECT_EQ(JetLayout(2, 4).size(), 15);
    EXPECT_EQ(JetLayout(4, 2).size(), 15);
    JetLayout l(2, 3);
    const int e[] = {1, 2};
    const int idx = l.index_of(e);
    ASSERT_GE(idx, 0);
    EXPECT_EQ(l.degree(idx), 3);
    const int too_high[] = {2, 2};
    EXPECT_EQ(l.index_of(too_high), -1);
  }

  TEST(Jet, InverseOfScalarSeries)
  {
    // 1/(3 + u + 2v) expanded at u = v = 0
    auto layout = JetLayout::get(2, 4);
    MatJet u = MatJet::variable(layout.get(), 0, 0.0);
    MatJet v = MatJet::variable(layout.get(), 1, 0.0);
    MatJet s = u + v * Complex(2.0);
    s.add_identity(3.0);
    const MatJet inv = s.inverse();
    const MatJet one = s * inv;
    EXPECT_NEAR(std::abs(one[0] - 1.0), 0.0, 1e-15);
    for (int i = 1; i < layout->size(); ++i) EXPECT_NEAR(std::abs(one[i]), 0.0, 1e-15);
    // coefficient of u^2 v is 3 * (1)(2) * (-1)^3 / 3^4 ... from multinomial expansion
    const int e[] = {2, 1};
    const double expected = -3.0 * 2.0 / 81.0;
    EXPECT_NEAR(inv[layout->index_of(e)].real(), expected, 1e-15);
  }

  TEST(Jet, MatrixInverseAndNoncommutativeProduct)
  {
    auto layout = JetLayout::get(1, 3);
    hinf::Matrix A0(2, 2), A1(2, 2);
    A0 << 2.0, 1.0, 0.0, 3.0;
    A1 << 0.0, 1.0, 1.0, 0.0;
    MatJet a = MatJet::constant(layout.get(), A0);
    MatJet t = MatJet::variable(layout.get(), 0, 0.0);
    MatJet b = MatJet::constant(layout.get(), A1);
    // a + t*A1: build by entries
    std::vector<MatJet> entries;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
      {
        MatJet e = t * A1(p, q);
        e.add_identity(A0(p, q));
        entries.push_back(e);
      }
    const MatJet m = MatJet::from_entries(2, entries);
    const MatJet prod = m * m.inverse();
    for (int idx = 0; idx < layout->size(); ++idx)
    {
      const hinf::Matrix c = prod.coefficient(idx);
      const hinf::Matrix expected = idx == 0 ? hinf::Matrix(hinf::Matrix::Identity(2, 2)) : hinf::Matrix(hinf::Matrix::Zero(2, 2));
      EXPECT_LE((c - expected).norm(), 1e-14);
    }
    (void)a;
    (void)b;
  }

  TEST(Jet, ComposeExp)
  {
    auto layout = JetLayout::get(1, 6);
    MatJet u = MatJet::variable(layout.get(), 0, 0.5);
    std::vector<Complex> c(7);
    double f = 1.0;
    for (int j = 0; j <= 6; ++j)
    {
      if (j > 0) f *= j;
      c[j] = std::exp(0.5) / f;
    }
    const MatJet e = u.compose(c);
    for (int j = 0; j <= 6; ++j)
    {
      const int ex[] = {j};
      EXPECT_NEAR(e.derivative_value(ex)(0, 0).real(), std::exp(0.5), 1e-13);
    }
  }

  TEST(Jet, DerivativeLowersValidOrder)
  {
    auto layout = JetLayout::get(2, 2);
    MatJet u = MatJet::variable(layout.get(), 0, 1.0);
    const MatJet sq = u * u;
    const MatJet d = sq.derivative(0);
    EXPECT_EQ(d.valid_order(), 1);
    EXPECT_NEAR(d[0].real(), 2.0, 1e-15);
    const MatJet dd = d.derivative(1);
    EXPECT_EQ(dd.valid_order(), 0);
    EXPECT_THROW(dd.derivative(0), hinf::DomainError);
    const int high[] = {1, 0};
    EXPECT_THROW(dd.derivative_value(high), hinf::DomainError);
  }
}  // namespace
