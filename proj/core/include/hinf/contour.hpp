#pragma once

#include "hinf/hfun.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hinf
{
  /// Gauss-Legendre nodes and weights on [-1, 1] (cached).
  struct GaussLegendre
  {
    std::vector<double> x;
    std::vector<double> w;
  };
  const GaussLegendre& gauss_legendre(int n);

  struct ContourNode
  {
    Complex lambda;
    /// Includes i / (2 pi), d lambda and orientation: sum_q weight_q g(lambda_q) approximates
    /// (i / 2 pi) int g(lambda) d lambda.
    Complex weight;
  };

  struct ContourPanel
  {
    double r_lo;
    double r_hi;
    bool upper;
    int nodes;
  };

  /*!
   * \brief Quadrature for the boundary of Lambda(theta), oriented from infinity e^{i theta}
   * through 0 out to infinity e^{-i theta}, truncated to r_min <= |lambda| <= r_max.
   */
  struct Contour
  {
    double theta = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double tol = 0.0;
    std::vector<ContourNode> nodes;
    std::vector<ContourPanel> panels;
    /// Bounds on the omitted pieces |lambda| < r_min and |lambda| > r_max.
    double near_zero_bound = 0.0;
    double tail_bound = 0.0;

    /// sum_q weight_q g(lambda_q)
    Complex integrate(const ScalarFunction& g) const;
  };

  struct ContourOptions
  {
    double tol = 1e-8;
    /// Resolvent constant: <lambda> ||(a - lambda)^{-1}|| <= c0 on Lambda.
    double c0 = 1.0;
    /// Gauss-Legendre points per panel; panels are bisected until this rule matches the doubled one.
    int base_nodes = 8;
    int max_nodes = 20000;  ///< per ray
    /// Node-count multiplier applied after adaptation (the oracle contour uses 4).
    int density = 1;
    /// Points z0 where the scalar Cauchy test steers panel refinement; should span the spectrum.
    std::vector<Complex> probes;
    std::optional<double> r_min;
    std::optional<double> r_max;
  };

  /// Contour shared by a family: d is the smallest exponent, c_f the largest constant, and
  /// every member's Cauchy test drives the refinement.
  Contour build_contour(const Sector& sector, std::span<const HFun> family, const ContourOptions& options);
  Contour build_contour(const Sector& sector, const HFun& f, const ContourOptions& options);

  /// Quadrature of (i / 2 pi) int f(lambda) (z0 - lambda)^{-1} d lambda; should equal f(z0).
  Complex cauchy_value(const Contour& contour, const HFun& f, Complex z0);

  /// tol / 10 and four times the node density.
  ContourOptions oracle_options(ContourOptions options);

  /// Real probes, per_decade log-spaced points in [lo, hi].
  std::vector<Complex> spectral_probes(double lo, double hi, int per_decade = 3);

}  // namespace hinf
