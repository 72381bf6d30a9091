#include "hinf/quant.hpp"

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

namespace hinf
{
  namespace
  {
    // E(i, m) = exp(i x_i . xi_m)
    std::shared_ptr<const Matrix> phase_matrix(const TorusGrid& grid)
    {
      static std::mutex mutex;
      static std::map<std::pair<int, int>, std::shared_ptr<const Matrix>> cache;
      std::lock_guard lock(mutex);
      auto& slot = cache[{grid.dim(), grid.points_per_axis()}];
      if (!slot)
      {
        const int N = grid.size();
        const int P = grid.points_per_axis();
        auto E = std::make_shared<Matrix>(N, N);
        for (int i = 0; i < N; ++i)
          for (int m = 0; m < N; ++m)
          {
            // exact integer phase reduction keeps the table symmetric to rounding
            long long phase = 0;
            for (int d = 0; d < grid.dim(); ++d)
              phase += static_cast<long long>(grid.component(i, d)) * grid.xi_axis(grid.component(m, d));
            phase %= P;
            if (phase < 0) phase += P;
            const double t = 2.0 * pi * static_cast<double>(phase) / P;
            (*E)(i, m) = Complex(std::cos(t), std::sin(t));
          }
        slot = std::move(E);
      }
      return slot;
    }

    void require_same(const GridSymbol& a, const GridSymbol& b)
    {
      if (!(a.grid() == b.grid())) throw DomainError("grid mismatch");
      if (a.size() != b.size()) throw DomainError("matrix size mismatch");
    }
  }  // namespace

  QuantOp quantize(const GridSymbol& a)
  {
    const TorusGrid& grid = a.grid();
    const int N = grid.size();
    const int k = a.size();
    const auto E = phase_matrix(grid);
    QuantOp op{grid, k, Matrix(k * N, k * N), {}};
    const Matrix F = E->adjoint() / static_cast<double>(N);
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q)
      {
        const Matrix S = a.entry(p, q).cwiseProduct(*E);
        op.matrix.block(p * N, q * N, N, N).noalias() = S * F;
      }
    return op;
  }

  GridSymbol extract_symbol(const TorusGrid& grid, int k, const Matrix& A)
  {
    const int N = grid.size();
    if (A.rows() != k * N || A.cols() != k * N) throw DomainError("extract_symbol: matrix shape mismatch");
    const auto E = phase_matrix(grid);
    GridSymbol g(grid, k);
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q)
      {
        Matrix AG = A.block(p * N, q * N, N, N) * (*E);
        g.entry(p, q) = AG.cwiseProduct(E->conjugate());
      }
    return g;
  }

  GridSymbol extract_symbol(const QuantOp& A) { return extract_symbol(A.grid, A.k, A.matrix); }

  GridSymbol compose_exact(const GridSymbol& a, const GridSymbol& b)
  {
    require_same(a, b);
    const Matrix AB = quantize(a).matrix * quantize(b).matrix;
    GridSymbol r = extract_symbol(a.grid(), a.size(), AB);
    r.set_cls(a.cls());
    return r;
  }

  GridSymbol leibniz_truncated(const SymbolExpr& a, const GridSymbol& b, int K)
  {
    if (K < 1) throw DomainError("leibniz_truncated: K must be positive");
    if (a.dim() != b.grid().dim() || a.size() != b.size()) throw DomainError("leibniz_truncated: shape mismatch");
    const int n = a.dim();
    const TorusGrid& grid = b.grid();
    GridSymbol sum(grid, b.size(), b.cls());
    for (int total = 0; total < K; ++total)
    {
      for (const auto& alpha : multi_indices(n, total))
      {
        const GridSymbol da = sample(a.differentiate(alpha, MultiIndex(n, 0)), grid);
        GridSymbol db = b;
        for (int d = 0; d < n; ++d)
          for (int j = 0; j < alpha[d]; ++j) db = db.dx(d) * Complex(0.0, -1.0);
        sum.axpy(1.0 / factorial(alpha), GridSymbol::pointwise_product(da, db));
      }
    }
    return sum;
  }

  GridSymbol leibniz_truncated(const SymbolExpr& a, const SymbolExpr& b, const TorusGrid& grid, int K)
  {
    if (K < 1) throw DomainError("leibniz_truncated: K must be positive");
    const int n = a.dim();
    GridSymbol sum(grid, b.size());
    for (int total = 0; total < K; ++total)
    {
      const Complex factor = std::pow(Complex(0.0, -1.0), total);
      for (const auto& alpha : multi_indices(n, total))
      {
        const GridSymbol da = sample(a.differentiate(alpha, MultiIndex(n, 0)), grid);
        const GridSymbol db = sample(b.differentiate(MultiIndex(n, 0), alpha), grid);
        sum.axpy(factor / factorial(alpha), GridSymbol::pointwise_product(da, db));
      }
    }
    return sum;
  }

  GridSymbol leibniz_inverse(const GridSymbol& u, double tol)
  {
    const QuantOp U = quantize(u);
    const DenseResolvent inv = dense_resolvent(U.matrix, 0.0);
    const Matrix I = Matrix::Identity(U.dimension(), U.dimension());
    const double right = extract_symbol(u.grid(), u.size(), U.matrix * inv.X - I).max_abs();
    const double left = extract_symbol(u.grid(), u.size(), inv.X * U.matrix - I).max_abs();
    if (!(right <= tol && left <= tol))
      throw NumericalError("leibniz_inverse: residual " + std::to_string(std::max(left, right)) + " exceeds tolerance");
    GridSymbol v = extract_symbol(u.grid(), u.size(), inv.X);
    v.set_cls(u.cls());
    return v;
  }

  DenseResolvent dense_resolvent(const Matrix& A, Complex lambda, bool refine)
  {
    const Eigen::Index d = A.rows();
    Matrix M = A;
    M.diagonal().array() -= lambda;
    Eigen::PartialPivLU<Matrix> lu(M);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    const double ratio = diag.maxCoeff() > 0.0 ? diag.minCoeff() / diag.maxCoeff() : 0.0;
    if (!(ratio > pivot_threshold))
      throw NumericalError("dense_resolvent: A - lambda is numerically singular (pivot ratio " +
                           std::to_string(ratio) + ")");
    DenseResolvent r;
    r.min_pivot = ratio;
    const Matrix I = Matrix::Identity(d, d);
    r.X = lu.solve(I);
    if (!refine)
    {
      r.residual = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
    Matrix R = I - M * r.X;
    r.X += lu.solve(R);
    R.noalias() = M * r.X;
    R -= I;
    r.residual = R.cwiseAbs().maxCoeff();
    return r;
  }

  DenseResolvent dense_resolvent(const QuantOp& A, Complex lambda, bool refine)
  {
    return dense_resolvent(A.matrix, lambda, refine);
  }

  HessenbergResolvent::HessenbergResolvent(const Matrix& A)
  {
    if (A.rows() != A.cols()) throw DomainError("HessenbergResolvent: matrix must be square");
    Eigen::HessenbergDecomposition<Matrix> hd(A);
    H_ = hd.matrixH();
    Q_ = hd.matrixQ();
  }

  Matrix HessenbergResolvent::reduced(Complex lambda) const
  {
    const Eigen::Index d = H_.rows();
    Matrix U = H_;
    U.diagonal().array() -= lambda;
    // G_{d-2} ... G_0 (H - lambda) = U, with G_k = E_k P_k acting on rows k, k + 1
    std::vector<Complex> mult(d > 0 ? d - 1 : 0);
    std::vector<char> swapped(mult.size(), 0);
    for (Eigen::Index k = 0; k + 1 < d; ++k)
    {
      if (std::abs(U(k + 1, k)) > std::abs(U(k, k)))
      {
        U.row(k).tail(d - k).swap(U.row(k + 1).tail(d - k));
        swapped[k] = 1;
      }
      if (U(k, k) == Complex(0.0)) continue;
      const Complex m = U(k + 1, k) / U(k, k);
      mult[k] = m;
      U.row(k + 1).tail(d - k - 1) -= m * U.row(k).tail(d - k - 1);
      U(k + 1, k) = 0.0;
    }
    const auto diag = U.diagonal().cwiseAbs();
    const double ratio = d > 0 && diag.maxCoeff() > 0.0 ? diag.minCoeff() / diag.maxCoeff() : 0.0;
    if (!(ratio > pivot_threshold))
      throw NumericalError("HessenbergResolvent: H - lambda is numerically singular (pivot ratio " +
                           std::to_string(ratio) + ")");

    // X = U^{-1}, built row by row from the bottom
    Matrix X = Matrix::Zero(d, d);
    for (Eigen::Index i = d - 1; i >= 0; --i)
    {
      const Eigen::Index len = d - i - 1;
      if (len > 0)
        X.row(i).tail(len).noalias() = -(U.row(i).tail(len) * X.bottomRightCorner(len, len));
      X(i, i) = 1.0;
      X.row(i).tail(d - i) /= U(i, i);
    }
    // X G_{d-2} ... G_0
    for (Eigen::Index k = d - 2; k >= 0; --k)
    {
      X.col(k) -= mult[k] * X.col(k + 1);
      if (swapped[k]) X.col(k).swap(X.col(k + 1));
    }
    return X;
  }

  Matrix HessenbergResolvent::to_original(const Matrix& Y) const
  {
    return Q_ * Y * Q_.adjoint();
  }

  namespace
  {
    std::atomic<std::uint64_t> norm_seed_{default_norm_seed};
  }

  void set_norm_seed(std::uint64_t seed) { norm_seed_.store(seed); }
  std::uint64_t norm_seed() { return norm_seed_.load(); }

  NormEstimate operator_norm(const Matrix& A, double rel_tol, int max_iterations)
  {
    NormEstimate est;
    if (A.size() == 0) return est;
    std::mt19937_64 rng(norm_seed());
    std::normal_distribution<double> gauss;
    Vector v(A.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();
    double sigma = 0.0;
    for (int it = 1; it <= max_iterations; ++it)
    {
      const Vector w = A * v;
      const double s = w.norm();
      est.iterations = it;
      if (s == 0.0)
      {
        est.value = 0.0;
        est.converged = true;
        return est;
      }
      Vector z = A.adjoint() * w;
      const double zn = z.norm();
      v = z / zn;
      // ||A^* A v|| / ||A v|| bounds sigma from below and converges faster than ||A v||
      const double next = zn / s;
      if (it > 1 && std::abs(next - sigma) <= rel_tol * next)
      {
        est.value = next;
        est.converged = true;
        return est;
      }
      sigma = next;
    }
    est.value = sigma;
    return est;
  }

  Vector apply_fft(const GridSymbol& a, const Vector& u)
  {
    const TorusGrid& grid = a.grid();
    const int N = grid.size();
    const int k = a.size();
    const int P = grid.points_per_axis();
    if (u.size() != static_cast<Eigen::Index>(k) * N) throw DomainError("apply_fft: shape mismatch");
    const auto E = phase_matrix(grid);

    // fft bin of each mode: xi mod P per axis
    std::vector<int> bin(N);
    for (int m = 0; m < N; ++m)
    {
      int flat = 0;
      for (int d = 0; d < grid.dim(); ++d)
      {
        const int f = ((grid.xi_axis(grid.component(m, d)) % P) + P) % P;
        flat = flat * P + f;
      }
      bin[m] = flat;
    }

    Vector out = Vector::Zero(u.size());
    std::vector<Complex> buf(N);
    for (int q = 0; q < k; ++q)
    {
      for (int j = 0; j < N; ++j) buf[j] = u(q * N + j);
      fft(buf, grid.dim(), P, false);
      Vector uhat(N);
      for (int m = 0; m < N; ++m) uhat(m) = buf[bin[m]] / static_cast<double>(N);
      for (int p = 0; p < k; ++p) out.segment(p * N, N) += a.entry(p, q).cwiseProduct(*E) * uhat;
    }
    return out;
  }

}  // namespace hinf
