#pragma once

#include "hinf/symbol_expr.hpp"
#include "hinf/types.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace hinf
{
  /*!
   * \brief Uniform grid on T^n with its discrete frequency set.
   *
   * x-nodes are x_i = 2 pi i / P per axis. Each axis carries P frequencies: the
   * symmetric window {-Xi, ..., Xi} with Xi = P/2 - 1, followed by one guard mode
   * xi = P/2. The guard mode completes a residue system mod P, which makes
   * quantization an exact algebra isomorphism; window statements (seminorms,
   * spectral checks) ignore it.
   *
   * Flat indices are row major over axes: i = i_1 P^{n-1} + ... + i_n.
   */
  class TorusGrid
  {
   public:
    TorusGrid() = default;
    TorusGrid(int n, int P);

    int dim() const { return n_; }
    int points_per_axis() const { return P_; }
    int window() const { return P_ / 2 - 1; }
    /// P^n; also the number of frequency modes.
    int size() const { return size_; }

    double x_axis(int i) const { return 2.0 * pi * i / P_; }
    int xi_axis(int m) const { return m < P_ - 1 ? m - window() : P_ / 2; }

    /// Per-axis component of a flat index.
    int component(int flat, int axis) const;
    std::vector<double> x(int flat) const;
    std::vector<double> xi(int flat) const;
    double bracket(int flat_mode) const;
    double xi_norm(int flat_mode) const;

    /// True when every component satisfies |xi_d| <= Xi - margin (guard mode excluded).
    bool in_window(int flat_mode, int margin = 0) const;

    /// Flat mode index of the integer frequency vector xi, or -1 if outside the mode set.
    int mode_index(std::span<const int> xi) const;

    friend bool operator==(const TorusGrid& a, const TorusGrid& b) { return a.n_ == b.n_ && a.P_ == b.P_; }

   private:
    int n_ = 1;
    int P_ = 0;
    int size_ = 0;
  };

  /*!
   * \brief Tabulated k x k symbol: entry(p, q)(i, m) = a_pq(x_i, xi_m).
   *
   * Rows index x-nodes, columns index frequency modes.
   */
  class GridSymbol
  {
   public:
    GridSymbol() = default;
    GridSymbol(const TorusGrid& grid, int k, SymbolClassParams cls = {});

    static GridSymbol constant(const TorusGrid& grid, int k, Complex value);

    const TorusGrid& grid() const { return grid_; }
    int size() const { return k_; }
    const SymbolClassParams& cls() const { return cls_; }
    void set_cls(const SymbolClassParams& cls) { cls_ = cls; }

    Matrix& entry(int p, int q) { return entries_[p * k_ + q]; }
    const Matrix& entry(int p, int q) const { return entries_[p * k_ + q]; }

    /// k x k value at (x-node i, mode m).
    Matrix value(int i, int m) const;
    void set_value(int i, int m, const Matrix& v);
    /// Scalar access (k == 1).
    Complex& operator()(int i, int m) { return entries_[0](i, m); }
    Complex operator()(int i, int m) const { return entries_[0](i, m); }

    GridSymbol& operator+=(const GridSymbol& other);
    GridSymbol& operator-=(const GridSymbol& other);
    GridSymbol& operator*=(Complex s);
    /// this += s * other
    GridSymbol& axpy(Complex s, const GridSymbol& other);
    friend GridSymbol operator+(GridSymbol a, const GridSymbol& b) { return a += b; }
    friend GridSymbol operator-(GridSymbol a, const GridSymbol& b) { return a -= b; }
    friend GridSymbol operator*(GridSymbol a, Complex s) { return a *= s; }
    friend GridSymbol operator*(Complex s, GridSymbol a) { return a *= s; }
    /// Pointwise (matrix) product a(x,xi) b(x,xi).
    static GridSymbol pointwise_product(const GridSymbol& a, const GridSymbol& b);

    GridSymbol& add_identity(Complex s);

    bool all_finite() const;
    /// Largest entry modulus over all nodes, guard mode included.
    double max_abs() const;

    /*!
     * max over x-nodes and window modes with |xi_d| <= Xi - margin of
     * |a(x,xi)| <xi>^weight, |.| the spectral norm.
     */
    double sup_norm(int margin = 0, double weight = 0.0) const;

    /// d/dx_axis by exact trigonometric interpolation in x (per mode).
    GridSymbol dx(int axis) const;

    /// CSV: x index tuple, xi tuple, then re/im per entry.
    void write_csv(std::ostream& out) const;

   private:
    TorusGrid grid_;
    int k_ = 1;
    SymbolClassParams cls_;
    std::vector<Matrix> entries_;
  };

  /// values(i, m) = expr(x_i, xi_m) on every node including the guard mode.
  GridSymbol sample(const SymbolExpr& expr, const TorusGrid& grid, const SymbolClassParams& cls = {});

  /// q_{alpha,beta}(a) over the grid window from exact derivatives of expr.
  double seminorm(const SymbolExpr& expr, const MultiIndex& alpha, const MultiIndex& beta,
      const SymbolClassParams& cls, const TorusGrid& grid);

  /*!
   * q_{alpha,beta} of a tabulated symbol: x-derivatives spectral, xi-derivatives by
   * central differences on the integer lattice (nodes whose stencil leaves the window
   * are skipped). The sup runs over |xi_d| <= Xi - |alpha| - margin.
   */
  double seminorm(const GridSymbol& a, const MultiIndex& alpha, const MultiIndex& beta, int margin = 0);

  /// Spectral norm of a small complex matrix (k <= 4); closed form for k = 1.
  double spectral_norm(const Matrix& m);

  /// In-place n-dimensional FFT of P^n samples (forward: sum u_j e^{-2 pi i jk/P}).
  void fft(std::vector<Complex>& data, int n, int P, bool inverse);

}  // namespace hinf
