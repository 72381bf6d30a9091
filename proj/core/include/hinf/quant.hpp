#pragma once

#include "hinf/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace hinf
{
  /*!
   * \brief Dense realization of op(a) on grid functions T^n -> C^k.
   *
   * (op a u)(x) = sum_xi e^{i x xi} a(x, xi) u^(xi), with u^(xi) = P^{-n} sum_j u(x_j) e^{-i x_j xi}.
   * The matrix is (k P^n) x (k P^n) in component-major block layout:
   * block (p, q) acts from component q to component p.
   */
  struct QuantOp
  {
    TorusGrid grid;
    int k = 1;
    Matrix matrix;
    std::string tag;

    int dimension() const { return k * grid.size(); }
  };

  QuantOp quantize(const GridSymbol& a);
  /// a(x_i, xi_m) = e^{-i x_i xi_m} (A e_m)(x_i); exact inverse of quantize.
  GridSymbol extract_symbol(const QuantOp& A);
  /// Same, from a bare matrix on the grid.
  GridSymbol extract_symbol(const TorusGrid& grid, int k, const Matrix& A);

  /// extract(quantize(a) quantize(b)).
  GridSymbol compose_exact(const GridSymbol& a, const GridSymbol& b);

  /*!
   * sum_{|alpha| < K} (1/alpha!) d^alpha_xi a . D^alpha_x b with D_x = -i d_x.
   * The xi-derivatives of a are exact; D_x b is spectral on the tabulation.
   */
  GridSymbol leibniz_truncated(const SymbolExpr& a, const GridSymbol& b, int K);
  GridSymbol leibniz_truncated(const SymbolExpr& a, const SymbolExpr& b, const TorusGrid& grid, int K);

  /*!
   * Leibniz inverse extract(quantize(u)^{-1}). Throws NumericalError when
   * quantize(u) is numerically singular or the two-sided residual exceeds tol.
   */
  GridSymbol leibniz_inverse(const GridSymbol& u, double tol = 1e-10);

  // ---------------------------------------------------------------------------
  // Dense oracle

  struct DenseResolvent
  {
    Matrix X;
    double residual = 0.0;  ///< max-entry norm of (A - lambda) X - I after refinement
    double min_pivot = 0.0; ///< smallest |U_ii| / max |U_ii|
  };

  /// Pivot ratio below which A - lambda is treated as singular.
  inline constexpr double pivot_threshold = 1e-13;

  /// (A - lambda)^{-1} by partial-pivot LU with one step of iterative refinement.
  DenseResolvent dense_resolvent(const Matrix& A, Complex lambda, bool refine = true);
  DenseResolvent dense_resolvent(const QuantOp& A, Complex lambda, bool refine = true);

  /*!
   * \brief Resolvents of one matrix at many points through A = Q H Q^* with H upper Hessenberg.
   *
   * Each (H - lambda)^{-1} comes from an LU factorization with adjacent-row partial pivoting,
   * so a point costs one triangular inversion instead of a full LU and solve.
   */
  class HessenbergResolvent
  {
  public:
    explicit HessenbergResolvent(const Matrix& A);

    /// (H - lambda)^{-1}; throws NumericalError below pivot_threshold.
    Matrix reduced(Complex lambda) const;
    /// Q Y Q^*
    Matrix to_original(const Matrix& Y) const;
    Matrix resolvent(Complex lambda) const { return to_original(reduced(lambda)); }

    const Matrix& H() const { return H_; }
    const Matrix& Q() const { return Q_; }

  private:
    Matrix H_;
    Matrix Q_;
  };

  struct NormEstimate
  {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
  };

  /// Spectral norm by power iteration on A^* A from a fixed pseudo-random start.
  NormEstimate operator_norm(const Matrix& A, double rel_tol = 1e-8, int max_iterations = 20000);

  inline constexpr std::uint64_t default_norm_seed = 20240611;
  /// Seed of the start vector used by operator_norm (process wide).
  void set_norm_seed(std::uint64_t seed);
  std::uint64_t norm_seed();

  /// op(a) u through the FFT of u; u holds k blocks of P^n samples.
  Vector apply_fft(const GridSymbol& a, const Vector& u);

}  // namespace hinf
