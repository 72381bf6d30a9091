#pragma once

#include "hinf/contour.hpp"
#include "hinf/parametrix.hpp"

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace hinf
{
  struct FcalcOptions
  {
    /// Also accumulate the b^N part and expose f(a) = b^N_f + s^N_f.
    bool split = false;
    ResolventOptions resolvent{1e-11, false, 0.5};
  };

  struct SymbolCalc
  {
    std::vector<GridSymbol> values;  ///< f(a) per family member
    std::vector<Matrix> ops;         ///< quantize(f(a)) per member
    std::vector<GridSymbol> bN_part;
    std::vector<GridSymbol> sN_part;
    int neumann_nodes = 0;
    int dense_nodes = 0;
    double max_residual = 0.0;
  };

  /// f(a) = (i / 2 pi) sum_q w_q f(lambda_q) (a - lambda_q)^{-#}, one Leibniz resolvent per node
  /// shared by all members.
  SymbolCalc f_of_symbol(const Parametrix& engine, std::span<const HFun> family, const Contour& contour,
      const FcalcOptions& options = {});
  GridSymbol f_of_symbol(const Parametrix& engine, const HFun& f, const Contour& contour);

  /// (i / 2 pi) sum_q w_q f(lambda_q) (A - lambda_q)^{-1}, one pivoted LU of the Hessenberg form per node.
  std::vector<Matrix> f_of_operator_oracle(const Matrix& A, std::span<const HFun> family, const Contour& contour);
  Matrix f_of_operator_oracle(const QuantOp& A, const HFun& f, const Contour& contour);

  /// ||S - O|| / ||O|| in operator norm.
  double relative_discrepancy(const Matrix& S, const Matrix& O);

  struct DeformedOptions
  {
    double tol = 1e-8;
    double c0 = 1.0;
    int nodes_per_panel = 8;
    int arc_nodes = 32;
  };

  /*!
   * b^N_f = (i / 2 pi) int f(lambda) b^N(x, xi, lambda) d lambda with the ray contour replaced,
   * node by node, by the boundary of Omega_{x,xi}: the two ray segments of length
   * 2 ||a(x,xi)|| and the arc |lambda| = 2 ||a(x,xi)||, |arg lambda| <= theta.
   */
  GridSymbol deformed_bN_f(const Parametrix& engine, const HFun& f, const Sector& sector,
      const DeformedOptions& options = {});

  /// f_n(a) for f_n(z) = z^{it} psi_n(z); the contour must be built for that function.
  GridSymbol imaginary_power(const Parametrix& engine, const Sector& sector, double t, double n_reg,
      const Contour& contour);

  // ---------------------------------------------------------------------------

  struct BipRow
  {
    double t;
    double norm;      ///< ||A^{it}|| (regularized, oracle)
    double sup_norm;  ///< sampled sup of |z^{it} psi_n|
  };

  struct BipReport
  {
    double theta = 0.0;
    double n_reg = 0.0;
    std::vector<BipRow> rows;
    /// least-squares fit log ||A^{it}|| = intercept + rate |t|
    double rate = 0.0;
    double intercept = 0.0;
    int contour_nodes = 0;

    void write_csv(std::ostream& out) const;
  };

  BipReport bip_sweep(const Matrix& A, const Sector& sector, std::span<const double> ts, double n_reg,
      const ContourOptions& options);

  using SeminormIndex = std::pair<MultiIndex, MultiIndex>;

  struct ProbeRow
  {
    std::string name;
    double sup_norm = 0.0;
    double op_norm = 0.0;  ///< ||f(A)|| from the oracle
    double symbol_op_norm = 0.0;  ///< ||op(f(a))|| from the symbol path (NaN without it)
    double ratio = 0.0;
    std::vector<double> q_ratio;  ///< q(f(a)) / ||f||_inf per seminorm
    double discrepancy = 0.0;     ///< symbol path vs oracle
  };

  struct ProbeOptions
  {
    ContourOptions contour;
    bool symbol_level = true;
    std::vector<SeminormIndex> seminorms;
    /// Symbol class of f(a) used for the seminorm weights (order 0).
    SymbolClassParams cls{0.0, 1.0, 0.0};
    int margin = 16;
  };

  struct ProbeReport
  {
    std::vector<ProbeRow> rows;
    std::vector<SeminormIndex> seminorms;
    int contour_nodes = 0;
    int oracle_nodes = 0;

    /// max ratio over the first `count` members (all when count < 0)
    double M(int count = -1) const;
    double M_q(std::size_t q, int count = -1) const;
    void write_csv(std::ostream& out) const;
  };

  /// M = max ||f(A)|| / ||f||_inf over the family, plus per-seminorm M_q from the symbol path.
  ProbeReport hinf_bound_probe(const Parametrix& engine, const Sector& sector, std::span<const HFun> family,
      const ProbeOptions& options);

  struct ResolventBoundRow
  {
    Complex lambda;
    double norm;  ///< ||(A - lambda)^{-1}||
  };

  struct ResolventBoundReport
  {
    std::vector<ResolventBoundRow> rows;
    double slope = 0.0;  ///< of log ||(A - lambda)^{-1}|| vs log <lambda>, lambda != 0
    double sup = 0.0;    ///< max <lambda> ||(A - lambda)^{-1}||
  };

  /// Samples lambda_samples(sector, lo, hi, per_decade) including lambda = 0.
  ResolventBoundReport resolvent_bound(const Matrix& A, const Sector& sector, double lo, double hi, int per_decade);

}  // namespace hinf
