#include "hinf/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hinf
{
  TorusGrid::TorusGrid(int n, int P) : n_(n), P_(P)
  {
    if (n < 1 || n > 2) throw DomainError("TorusGrid: dimension must be 1 or 2");
    if (P < 4 || (P & (P - 1)) != 0) throw DomainError("TorusGrid: P must be a power of two >= 4");
    size_ = n == 1 ? P : P * P;
  }

  int TorusGrid::component(int flat, int axis) const
  {
    if (n_ == 1) return flat;
    return axis == 0 ? flat / P_ : flat % P_;
  }

  std::vector<double> TorusGrid::x(int flat) const
  {
    std::vector<double> v(n_);
    for (int d = 0; d < n_; ++d) v[d] = x_axis(component(flat, d));
    return v;
  }

  std::vector<double> TorusGrid::xi(int flat) const
  {
    std::vector<double> v(n_);
    for (int d = 0; d < n_; ++d) v[d] = xi_axis(component(flat, d));
    return v;
  }

  double TorusGrid::xi_norm(int flat_mode) const
  {
    double s = 0.0;
    for (int d = 0; d < n_; ++d)
    {
      const double v = xi_axis(component(flat_mode, d));
      s += v * v;
    }
    return std::sqrt(s);
  }

  double TorusGrid::bracket(int flat_mode) const
  {
    const double r = xi_norm(flat_mode);
    return std::sqrt(1.0 + r * r);
  }

  bool TorusGrid::in_window(int flat_mode, int margin) const
  {
    for (int d = 0; d < n_; ++d)
    {
      const int m = component(flat_mode, d);
      if (m == P_ - 1) return false;
      if (std::abs(xi_axis(m)) > window() - margin) return false;
    }
    return true;
  }

  int TorusGrid::mode_index(std::span<const int> xi) const
  {
    int flat = 0;
    for (int d = 0; d < n_; ++d)
    {
      int m;
      if (xi[d] == P_ / 2)
        m = P_ - 1;
      else if (std::abs(xi[d]) <= window())
        m = xi[d] + window();
      else
        return -1;
      flat = flat * P_ + m;
    }
    return flat;
  }

  // ---------------------------------------------------------------------------

  GridSymbol::GridSymbol(const TorusGrid& grid, int k, SymbolClassParams cls)
      : grid_(grid), k_(k), cls_(cls), entries_(static_cast<std::size_t>(k) * k, Matrix::Zero(grid.size(), grid.size()))
  {
  }

  GridSymbol GridSymbol::constant(const TorusGrid& grid, int k, Complex value)
  {
    GridSymbol g(grid, k);
    for (int p = 0; p < k; ++p) g.entry(p, p).setConstant(value);
    return g;
  }

  Matrix GridSymbol::value(int i, int m) const
  {
    Matrix v(k_, k_);
    for (int p = 0; p < k_; ++p)
      for (int q = 0; q < k_; ++q) v(p, q) = entry(p, q)(i, m);
    return v;
  }

  void GridSymbol::set_value(int i, int m, const Matrix& v)
  {
    for (int p = 0; p < k_; ++p)
      for (int q = 0; q < k_; ++q) entry(p, q)(i, m) = v(p, q);
  }

  GridSymbol& GridSymbol::operator+=(const GridSymbol& other)
  {
    if (!(grid_ == other.grid_) || k_ != other.k_) throw DomainError("GridSymbol: shape mismatch");
    for (std::size_t e = 0; e < entries_.size(); ++e) entries_[e] += other.entries_[e];
    return *this;
  }

  GridSymbol& GridSymbol::operator-=(const GridSymbol& other)
  {
    if (!(grid_ == other.grid_) || k_ != other.k_) throw DomainError("GridSymbol: shape mismatch");
    for (std::size_t e = 0; e < entries_.size(); ++e) entries_[e] -= other.entries_[e];
    return *this;
  }

  GridSymbol& GridSymbol::operator*=(Complex s)
  {
    for (auto& e : entries_) e *= s;
    return *this;
  }

  GridSymbol& GridSymbol::axpy(Complex s, const GridSymbol& other)
  {
    if (!(grid_ == other.grid_) || k_ != other.k_) throw DomainError("GridSymbol: shape mismatch");
    for (std::size_t e = 0; e < entries_.size(); ++e) entries_[e] += s * other.entries_[e];
    return *this;
  }

  GridSymbol GridSymbol::pointwise_product(const GridSymbol& a, const GridSymbol& b)
  {
    if (!(a.grid_ == b.grid_) || a.k_ != b.k_) throw DomainError("GridSymbol: shape mismatch");
    GridSymbol r(a.grid_, a.k_, a.cls_);
    const int k = a.k_;
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q)
        for (int l = 0; l < k; ++l) r.entry(p, q).array() += a.entry(p, l).array() * b.entry(l, q).array();
    return r;
  }

  GridSymbol& GridSymbol::add_identity(Complex s)
  {
    for (int p = 0; p < k_; ++p) entry(p, p).array() += s;
    return *this;
  }

  bool GridSymbol::all_finite() const
  {
    for (const auto& e : entries_)
      if (!e.allFinite()) return false;
    return true;
  }

  double GridSymbol::max_abs() const
  {
    double best = 0.0;
    for (const auto& e : entries_) best = std::max(best, e.cwiseAbs().maxCoeff());
    return best;
  }

  double spectral_norm(const Matrix& m)
  {
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }

  double GridSymbol::sup_norm(int margin, double weight) const
  {
    double best = 0.0;
    const int N = grid_.size();
    for (int m = 0; m < N; ++m)
    {
      if (!grid_.in_window(m, margin)) continue;
      const double w = weight == 0.0 ? 1.0 : std::pow(grid_.bracket(m), weight);
      for (int i = 0; i < N; ++i)
      {
        const double v = k_ == 1 ? std::abs(entries_[0](i, m)) : spectral_norm(value(i, m));
        best = std::max(best, v * w);
      }
    }
    return best;
  }

  void fft(std::vector<Complex>& data, int n, int P, bool inverse)
  {
    static thread_local Eigen::FFT<double> engine;
    std::vector<Complex> in(P), out(P);
    auto line = [&](std::size_t start, std::size_t stride)
    {
      for (int j = 0; j < P; ++j) in[j] = data[start + j * stride];
      if (inverse)
        engine.inv(out, in);
      else
        engine.fwd(out, in);
      for (int j = 0; j < P; ++j) data[start + j * stride] = out[j];
    };
    if (n == 1)
    {
      line(0, 1);
      return;
    }
    for (int r = 0; r < P; ++r) line(static_cast<std::size_t>(r) * P, 1);
    for (int c = 0; c < P; ++c) line(c, P);
  }

  GridSymbol GridSymbol::dx(int axis) const
  {
    const int n = grid_.dim();
    const int P = grid_.points_per_axis();
    const int N = grid_.size();
    GridSymbol r(grid_, k_, cls_);
    std::vector<Complex> col(N);
    for (std::size_t e = 0; e < entries_.size(); ++e)
    {
      for (int m = 0; m < N; ++m)
      {
        for (int i = 0; i < N; ++i) col[i] = entries_[e](i, m);
        fft(col, n, P, false);
        for (int f = 0; f < N; ++f)
        {
          const int c = grid_.component(f, axis);
          // Nyquist coefficient has no odd derivative
          const int kappa = c < P / 2 ? c : (c == P / 2 ? 0 : c - P);
          col[f] *= Complex(0.0, kappa);
        }
        fft(col, n, P, true);
        for (int i = 0; i < N; ++i) r.entries_[e](i, m) = col[i];
      }
    }
    return r;
  }

  void GridSymbol::write_csv(std::ostream& out) const
  {
    const int n = grid_.dim();
    for (int d = 0; d < n; ++d) out << "ix" << d + 1 << ',';
    for (int d = 0; d < n; ++d) out << "xi" << d + 1 << ',';
    for (int p = 0; p < k_; ++p)
      for (int q = 0; q < k_; ++q)
      {
        out << "re" << p + 1 << q + 1 << ",im" << p + 1 << q + 1;
        out << ((p == k_ - 1 && q == k_ - 1) ? "\n" : ",");
      }
    char buf[64];
    const int N = grid_.size();
    for (int i = 0; i < N; ++i)
      for (int m = 0; m < N; ++m)
      {
        for (int d = 0; d < n; ++d) out << grid_.component(i, d) << ',';
        for (int d = 0; d < n; ++d) out << grid_.xi_axis(grid_.component(m, d)) << ',';
        for (std::size_t e = 0; e < entries_.size(); ++e)
        {
          const Complex v = entries_[e](i, m);
          std::snprintf(buf, sizeof buf, "%.17g,%.17g", v.real(), v.imag());
          out << buf << (e + 1 == entries_.size() ? "\n" : ",");
        }
      }
  }

  // ---------------------------------------------------------------------------

  GridSymbol sample(const SymbolExpr& expr, const TorusGrid& grid, const SymbolClassParams& cls)
  {
    if (expr.dim() != grid.dim()) throw DomainError("sample: symbol and grid dimensions differ");
    const int N = grid.size();
    const int k = expr.size();
    GridSymbol g(grid, k, cls);
    for (int i = 0; i < N; ++i)
    {
      const auto x = grid.x(i);
      for (int m = 0; m < N; ++m)
      {
        const auto xi = grid.xi(m);
        for (int p = 0; p < k; ++p)
          for (int q = 0; q < k; ++q)
          {
            const Complex v = expr::evaluate(*expr.entry(p, q), x, xi);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
              throw DomainError("sample: symbol is not finite at a grid node");
            g.entry(p, q)(i, m) = v;
          }
      }
    }
    return g;
  }

  double seminorm(const SymbolExpr& expr, const MultiIndex& alpha, const MultiIndex& beta,
      const SymbolClassParams& cls, const TorusGrid& grid)
  {
    cls.validate_for_seminorms();
    if (expr.dim() != grid.dim()) throw DomainError("seminorm: symbol and grid dimensions differ");
    const SymbolExpr d = expr.differentiate(alpha, beta);
    const double power = -cls.m + cls.rho * order(alpha) - cls.delta * order(beta);
    const int N = grid.size();
    double best = 0.0;
    for (int m = 0; m < N; ++m)
    {
      if (!grid.in_window(m)) continue;
      const auto xi = grid.xi(m);
      const double w = std::pow(grid.bracket(m), power);
      for (int i = 0; i < N; ++i)
      {
        const auto x = grid.x(i);
        best = std::max(best, spectral_norm(d.evaluate_matrix(x, xi)) * w);
      }
    }
    return best;
  }

  double seminorm(const GridSymbol& a, const MultiIndex& alpha, const MultiIndex& beta, int margin)
  {
    const auto& cls = a.cls();
    cls.validate_for_seminorms();
    const TorusGrid& grid = a.grid();
    const int n = grid.dim();
    if (static_cast<int>(alpha.size()) != n || static_cast<int>(beta.size()) != n)
      throw DomainError("seminorm: multi-index dimension mismatch");
    GridSymbol d = a;
    for (int ax = 0; ax < n; ++ax)
      for (int j = 0; j < beta[ax]; ++j) d = d.dx(ax);

    const int N = grid.size();
    const int P = grid.points_per_axis();
    for (int ax = 0; ax < n; ++ax)
    {
      for (int j = 0; j < alpha[ax]; ++j)
      {
        GridSymbol e(grid, a.size(), cls);
        for (int m = 0; m < N; ++m)
        {
          if (!grid.in_window(m)) continue;
          const int c = grid.component(m, ax);
          if (c == 0 || c >= P - 2) continue;
          const int step = n == 1 ? 1 : (ax == 0 ? P : 1);
          for (int p = 0; p < a.size(); ++p)
            for (int q = 0; q < a.size(); ++q)
              e.entry(p, q).col(m) = 0.5 * (d.entry(p, q).col(m + step) - d.entry(p, q).col(m - step));
        }
        d = std::move(e);
      }
    }
    const double power = -cls.m + cls.rho * order(alpha) - cls.delta * order(beta);
    return d.sup_norm(order(alpha) + margin, power);
  }

}  // namespace hinf
