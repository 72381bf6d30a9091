#pragma once

#include "hinf/grid.hpp"
#include "hinf/symbol_expr.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hinf
{
  //! Closed sector Lambda(theta) = {0} u {lambda : |arg lambda| >= theta}.
  class Sector
  {
   public:
    explicit Sector(double theta);

    double theta() const { return theta_; }
    /// Boundary points produced by ray() count as inside despite rounding in arg.
    bool contains(Complex lambda) const;
    /// Point on the boundary ray at angle +theta (upper = true) or -theta.
    Complex ray(double r, bool upper) const { return std::polar(r, upper ? theta_ : -theta_); }

   private:
    double theta_;
  };

  /// Eigenvalues of a k x k matrix, k <= 4: closed form for k <= 2, polynomial roots otherwise.
  std::vector<Complex> small_eigenvalues(const Matrix& m);

  /// Ray samples lambda = r e^{+-i theta} with r = 10^{j/per_decade} in [lo, hi], plus lambda = 0.
  std::vector<Complex> lambda_samples(const Sector& sector, double lo, double hi, int per_decade);

  struct SpectrumViolation
  {
    int x_index;
    int mode;
    Complex eigenvalue;
  };

  struct SeminormConstant
  {
    MultiIndex alpha;
    MultiIndex beta;
    double value;
  };

  struct HypoReport
  {
    bool pass = false;
    double theta = 0.0;
    double c = 0.0;
    double C = 0.0;
    int window = 0;
    /// Smallest eigenvalue modulus over checked nodes and where it occurs.
    double min_modulus = 0.0;
    int min_x_index = -1;
    int min_mode = -1;
    double max_norm = 0.0;  ///< max ||a(x,xi)|| over checked nodes
    std::vector<SpectrumViolation> violations;

    std::vector<SeminormConstant> c_table;
    std::optional<double> c0;
    std::optional<double> R;
    int lambda_count = 0;

    std::optional<double> c_entry(const MultiIndex& alpha, const MultiIndex& beta) const;
    /// Key/value summary block.
    std::string summary() const;
    /// CSV with one row per quantity (see docs/csv_schemas.md).
    void write_csv(std::ostream& out) const;
  };

  /// Every eigenvalue of a(x,xi) at window nodes with |xi| >= C must avoid Lambda and |z| <= c.
  HypoReport check_spectrum(const SymbolExpr& a, const Sector& sector, double c, double C, const TorusGrid& grid);

  struct HypoConstantsOptions
  {
    int max_order = 2;
    int per_decade = 8;
  };

  /*!
   * Fill c_table and c0 of a passing report. c_{alpha,beta} is the sup over checked nodes
   * and ray samples of |d^alpha_xi d^beta_x a| ||(a - lambda)^{-1}|| <xi>^{rho|alpha| - delta|beta|};
   * c0 is the sup of <lambda> ||(a - lambda)^{-1}|| over the ray samples and over circle
   * points |lambda| = 2||a|| {1, 2, 4} with |arg lambda| < theta.
   */
  HypoReport estimate_hypo_constants(const SymbolExpr& a, const SymbolClassParams& cls, const Sector& sector,
      const TorusGrid& grid, HypoReport base, const HypoConstantsOptions& options = {});

  //! Omega_{x,xi} = {z not in Lambda : |z| < 2 ||a(x,xi)||}.
  struct OmegaRegion
  {
    double radius;
    Sector sector;
    bool contains(Complex z) const { return std::abs(z) < radius && !sector.contains(z); }
  };

  OmegaRegion omega_region(const SymbolExpr& a, const Sector& sector, std::span<const double> x,
      std::span<const double> xi);

}  // namespace hinf
