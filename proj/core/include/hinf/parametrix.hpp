#pragma once

#include "hinf/hypo.hpp"
#include "hinf/jet.hpp"
#include "hinf/quant.hpp"

#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hinf
{
  /// Smooth step: 0 for t <= 1, 1 for t >= 2, C-infinity in between.
  double smooth_step(double t);

  /// Excision phi(xi) = smooth_step(|xi| / C); phi = 1 when C = 0.
  double excision(double xi_norm, double C);

  enum class ResolventPath
  {
    neumann,
    dense
  };

  struct ResolventDiagnostics
  {
    ResolventPath path = ResolventPath::dense;
    double r_norm = 0.0;  ///< ||op(r^N)||; NaN if not computed
    int terms = 0;        ///< Neumann terms used
    double residual = 0.0;  ///< sup |(a - lambda) # result - 1| over all nodes
  };

  struct LeibnizResolvent
  {
    Matrix op;  ///< quantized (a - lambda)^{-#}
    std::optional<GridSymbol> resolvent;
    std::optional<GridSymbol> bN;
    std::optional<GridSymbol> sN;
    ResolventDiagnostics diagnostics;
  };

  struct ResolventOptions
  {
    double tol = 1e-11;
    bool symbols = true;
    /// Neumann series is trusted only below this ||op(r^N)||.
    double neumann_threshold = 0.5;
  };

  struct Remainder
  {
    GridSymbol r;  ///< r^N = (a - lambda) # b^N - 1
    Matrix op;     ///< op(r^N)
    /// q_N - 1 and (a - lambda) # b^N - q_N; present when the split was requested.
    std::optional<GridSymbol> q_minus_one;
    std::optional<GridSymbol> oscillatory;
  };

  struct FindRResult
  {
    double R = 0.0;
    std::vector<double> radii;
    std::vector<double> norms;  ///< max over both rays of ||op(r^N)||
  };

  struct ParametrixOptions
  {
    int N = 3;
    /// Excision radius; hypoellipticity is only used for |xi| >= C.
    double C = 0.0;
    /// Taylor order of the jets; defaults to N - 1 (values of b_j only).
    int jet_order = -1;
    /// Sector angle used to reject lambda inside some Omega_{x,xi}.
    std::optional<double> theta;
  };

  /*!
   * \brief Parameter-dependent parametrix of a - lambda on a torus grid.
   *
   * Holds the Taylor jets of a (and of its xi-derivatives) at every node, which do not
   * depend on lambda, and the cached quantization of a. Jets of order `jet_order` give
   * exact derivatives of b_j up to order jet_order - j.
   */
  class Parametrix
  {
   public:
    Parametrix(const SymbolExpr& a, const TorusGrid& grid, const ParametrixOptions& options = {});

    const SymbolExpr& symbol() const { return a_; }
    const TorusGrid& grid() const { return grid_; }
    int N() const { return N_; }
    double C() const { return C_; }
    int jet_order() const { return layout_->order(); }
    const QuantOp& quantized() const { return qa_; }
    const GridSymbol& sampled() const { return sampled_; }

    /// Throws DomainError when lambda lies in Omega_{x,xi} for some node with |xi| >= C
    /// (needs a sector angle in the options).
    void check_lambda(Complex lambda) const;

    /// b_0 .. b_{N-1}; left = true builds the left parametrix of Remark-type b~ # (a - lambda).
    std::vector<GridSymbol> bj(Complex lambda, bool left = false) const;
    GridSymbol bN(Complex lambda, bool left = false) const;
    /// phi(xi) sum_j b_j(x, xi, lambda) at a single node; lambda may be any point off the
    /// spectrum of a(x, xi).
    Matrix node_bN(int x_index, int mode, Complex lambda) const;
    /// 2 ||a(x, xi)||, the radius of Omega_{x,xi}.
    double omega_radius(int x_index, int mode) const
    {
      return omega_radius_[static_cast<std::size_t>(x_index) * grid_.size() + mode];
    }
    /// d^alpha_xi d^beta_x b_j at every node (exact, from the jets).
    GridSymbol bj_derivative(Complex lambda, int j, const MultiIndex& alpha, const MultiIndex& beta) const;

    /// Right remainder; the q_N split needs jet_order >= 2N - 2.
    Remainder remainder(Complex lambda, const GridSymbol& bN, bool split = false) const;
    /// b~^N # (a - lambda) - 1.
    GridSymbol left_remainder(Complex lambda, const GridSymbol& left_bN) const;

    /// (a - lambda)^{-#} = b^N # (1 + r^N)^{-#}; pass b^N to reuse a computed one.
    LeibnizResolvent resolvent(
        Complex lambda, const ResolventOptions& options = {}, const GridSymbol* bN = nullptr) const;

    /// Smallest 2^j (j = 0..jmax) with ||op(r^N)|| <= 1/2 at all sampled ray points beyond it.
    FindRResult find_R(const Sector& sector, int jmax = 20) const;

   private:
    template <class Jet>
    void recursion(const std::vector<Jet>& J, const Jet& zero, Complex lambda, bool left, std::vector<Jet>& out) const;
    void node_bj(int node, Complex lambda, bool left, std::vector<MatJet>& out) const;

    SymbolExpr a_;
    TorusGrid grid_;
    int N_;
    double C_;
    std::shared_ptr<const JetLayout> layout_;
    std::vector<MultiIndex> alphas_;  // all alpha with 1 <= |alpha| <= N - 1
    struct Term
    {
      MultiIndex alpha;
      int position;   // into alphas_
      Complex factor;  // (-i)^{|alpha|} / alpha!
    };
    std::vector<std::vector<Term>> terms_;  // by |alpha|
    std::vector<std::vector<MatJet>> xi_jets_;  // per node: a, then d^alpha_xi a for alphas_
    std::vector<int> active_;                   // nodes with phi != 0
    // xi_jets_ over active_ in chunks of chunk_ nodes (keeps the arrays cache-sized)
    static constexpr int chunk_ = 512;
    std::vector<std::vector<BatchJet>> batch_jets_;
    std::vector<double> phi_;  // per mode
    std::vector<double> omega_radius_;  // per node (x-major), 2 ||a(x,xi)||
    std::optional<Sector> sector_;
    GridSymbol sampled_;
    QuantOp qa_;
  };

  // Free-function forms of the operations.
  std::vector<GridSymbol> bj_recursion(const SymbolExpr& a, int N, Complex lambda, const TorusGrid& grid);
  GridSymbol assemble_bN(const SymbolExpr& a, int N, Complex lambda, double C, const TorusGrid& grid);
  GridSymbol remainder_rN(const SymbolExpr& a, const GridSymbol& bN, Complex lambda);
  LeibnizResolvent leibniz_resolvent(const SymbolExpr& a, Complex lambda, int N, double tol, const TorusGrid& grid);
  double find_R(const SymbolExpr& a, int N, const Sector& sector, const TorusGrid& grid);

  // ---------------------------------------------------------------------------
  // lambda sweeps

  struct SweepRow
  {
    Complex lambda;
    double bN_sup = 0.0;    ///< sup |b^N| on the interior window
    double rN_norm = 0.0;   ///< weighted sup of r^N on the interior window
    double rN_op = 0.0;     ///< ||op(r^N)||
    double left_rN_norm = std::numeric_limits<double>::quiet_NaN();
    double sN_norm = std::numeric_limits<double>::quiet_NaN();  ///< only for |lambda| >= R
    double residual = std::numeric_limits<double>::quiet_NaN();
    std::string path;
  };

  struct SweepOptions
  {
    /// Norms are taken over |xi_d| <= Xi - margin.
    int margin = 0;
    bool left = false;
    bool keep_symbols = false;
    double tol = 1e-11;
  };

  //! lambda-indexed family of parametrix symbols with decay diagnostics.
  struct ParamSymbolFamily
  {
    int N = 0;
    double R = 0.0;
    /// Exponent w of the weight <xi>^w used for r^N and s^N: w = -(m - N (rho - delta)).
    double weight = 0.0;
    std::vector<SweepRow> rows;
    std::vector<GridSymbol> bN, rN, resolvent, sN;  ///< filled with keep_symbols
    double slope_bN = 0.0;  ///< of <lambda> sup |b^N|
    double slope_rN = 0.0;
    double slope_sN = std::numeric_limits<double>::quiet_NaN();

    void write_csv(std::ostream& out) const;
  };

  /// Evaluate the family at every lambda (each must lie in Lambda).
  ParamSymbolFamily parametrix_sweep(const Parametrix& engine, const SymbolClassParams& cls,
      const std::vector<Complex>& lambdas, double R, const SweepOptions& options = {});

  /// count log-spaced points, alternating between the rays, with |lambda| in [lo, hi], alternating rays.
  std::vector<Complex> ray_sweep(const Sector& sector, double lo, double hi, int count, bool both_rays = true);

}  // namespace hinf
