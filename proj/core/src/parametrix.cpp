#include "hinf/parametrix.hpp"

#include "hinf/fit.hpp"
#include "hinf/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hinf
{
  double smooth_step(double t)
  {
    auto g = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    if (t <= 1.0) return 0.0;
    if (t >= 2.0) return 1.0;
    const double u = g(t - 1.0);
    return u / (u + g(2.0 - t));
  }

  double excision(double xi_norm, double C)
  {
    if (C < 0.0) throw DomainError("excision: C must be non-negative");
    if (C == 0.0) return 1.0;
    return smooth_step(xi_norm / C);
  }

  namespace
  {
    int alpha_position(const std::vector<MultiIndex>& alphas, const MultiIndex& alpha)
    {
      for (std::size_t t = 0; t < alphas.size(); ++t)
        if (alphas[t] == alpha) return static_cast<int>(t);
      throw Error("alpha_position: multi-index not tabulated");
    }

    template <class Jet>
    Jet differentiate(Jet j, const MultiIndex& alpha, int offset)
    {
      for (std::size_t d = 0; d < alpha.size(); ++d)
        for (int r = 0; r < alpha[d]; ++r) j = j.derivative(offset + static_cast<int>(d));
      return j;
    }

    Complex minus_i_power(int p)
    {
      static const Complex table[4] = {1.0, Complex(0.0, -1.0), -1.0, Complex(0.0, 1.0)};
      return table[p % 4];
    }
  }  // namespace

  Parametrix::Parametrix(const SymbolExpr& a, const TorusGrid& grid, const ParametrixOptions& options)
      : a_(a), grid_(grid), N_(options.N), C_(options.C)
  {
    if (N_ < 1) throw DomainError("Parametrix: N must be at least 1");
    if (C_ < 0.0) throw DomainError("Parametrix: C must be non-negative");
    if (a.dim() != grid.dim()) throw DomainError("Parametrix: symbol and grid dimensions differ");
    const int n = grid.dim();
    const int order = options.jet_order < 0 ? N_ - 1 : options.jet_order;
    if (order < N_ - 1) throw DomainError("Parametrix: jet order must be at least N - 1");
    if (order > a.max_derivative_order())
      throw DomainError("Parametrix: jet order exceeds the derivative budget of the symbol");
    layout_ = JetLayout::get(2 * n, order);
    if (options.theta) sector_.emplace(*options.theta);

    terms_.resize(N_);
    for (int total = 1; total < N_; ++total)
      for (const auto& alpha : multi_indices(n, total))
      {
        terms_[total].push_back({alpha, static_cast<int>(alphas_.size()), minus_i_power(total) / factorial(alpha)});
        alphas_.push_back(alpha);
      }

    const int Nn = grid.size();
    phi_.resize(Nn);
    for (int m = 0; m < Nn; ++m) phi_[m] = excision(grid.xi_norm(m), C_);

    sampled_ = sample(a, grid);
    qa_ = quantize(sampled_);

    xi_jets_.resize(static_cast<std::size_t>(Nn) * Nn);
    omega_radius_.resize(xi_jets_.size());
    parallel_for(Nn,
        [&](int i)
        {
          const auto x = grid_.x(i);
          for (int m = 0; m < Nn; ++m)
          {
            const std::size_t node = static_cast<std::size_t>(i) * Nn + m;
            omega_radius_[node] = 2.0 * spectral_norm(sampled_.value(i, m));
            if (phi_[m] == 0.0) continue;
            const auto xi = grid_.xi(m);
            auto& jets = xi_jets_[node];
            jets.reserve(1 + alphas_.size());
            jets.push_back(a_.evaluate_jet(x, xi, *layout_));
            for (const auto& alpha : alphas_) jets.push_back(differentiate(jets[0], alpha, n));
          }
        });

    for (int node = 0; node < static_cast<int>(xi_jets_.size()); ++node)
      if (phi_[node % Nn] != 0.0) active_.push_back(node);
    for (std::size_t start = 0; start < active_.size(); start += chunk_)
    {
      const std::size_t end = std::min(active_.size(), start + chunk_);
      std::vector<const MatJet*> column(end - start);
      auto& jets = batch_jets_.emplace_back();
      for (std::size_t t = 0; t < 1 + alphas_.size(); ++t)
      {
        for (std::size_t b = start; b < end; ++b) column[b - start] = &xi_jets_[active_[b]][t];
        jets.push_back(BatchJet::gather(column));
      }
    }
  }

  void Parametrix::check_lambda(Complex lambda) const
  {
    if (!sector_) return;
    if (sector_->contains(lambda)) return;
    const int Nn = grid_.size();
    for (int i = 0; i < Nn; ++i)
      for (int m = 0; m < Nn; ++m)
      {
        if (phi_[m] == 0.0) continue;
        if (std::abs(lambda) < omega_radius_[static_cast<std::size_t>(i) * Nn + m])
          throw DomainError("parametrix: lambda lies in Omega_{x,xi} at a grid node");
      }
  }

  template <class Jet>
  void Parametrix::recursion(
      const std::vector<Jet>& J, const Jet& zero, Complex lambda, bool left, std::vector<Jet>& out) const
  {
    const int n = grid_.dim();
    out.resize(N_);
    Jet s = J[0];
    s.add_identity(-lambda);
    out[0] = s.inverse();
    for (int j = 0; j + 1 < N_; ++j)
    {
      Jet acc = zero;
      for (int k = 0; k <= j; ++k)
        for (const Term& term : terms_[j + 1 - k])
        {
          if (!left)
          {
            // d^alpha_xi a . D^alpha_x b_k
            acc += J[1 + term.position] * (differentiate(out[k], term.alpha, 0) * term.factor);
          }
          else
          {
            // d^alpha_xi b~_k . D^alpha_x a
            acc += differentiate(out[k], term.alpha, n) * (differentiate(J[0], term.alpha, 0) * term.factor);
          }
        }
      out[j + 1] = (left ? acc * out[0] : out[0] * acc) * Complex(-1.0);
    }
  }

  void Parametrix::node_bj(int node, Complex lambda, bool left, std::vector<MatJet>& out) const
  {
    recursion(xi_jets_[node], MatJet(layout_.get(), a_.size()), lambda, left, out);
  }

  std::vector<GridSymbol> Parametrix::bj(Complex lambda, bool left) const
  {
    check_lambda(lambda);
    const int Nn = grid_.size();
    const int k = a_.size();
    std::vector<GridSymbol> b(N_, GridSymbol(grid_, k));
    parallel_for(static_cast<int>(batch_jets_.size()),
        [&](int c)
        {
          const auto& chunk = batch_jets_[c];
          std::vector<BatchJet> jets;
          recursion(chunk, BatchJet(layout_.get(), k, chunk[0].batch()), lambda, left, jets);
          const std::size_t offset = static_cast<std::size_t>(c) * chunk_;
          for (int j = 0; j < N_; ++j)
            for (int p = 0; p < k; ++p)
              for (int q = 0; q < k; ++q)
              {
                const Eigen::ArrayXcd& v = jets[j].at(0, p, q);
                Matrix& e = b[j].entry(p, q);
                for (Eigen::Index t = 0; t < v.size(); ++t)
                {
                  const int node = active_[offset + t];
                  e(node / Nn, node % Nn) = v(t);
                }
              }
        });
    return b;
  }

  GridSymbol Parametrix::bN(Complex lambda, bool left) const
  {
    const auto parts = bj(lambda, left);
    GridSymbol sum = parts[0];
    for (int j = 1; j < N_; ++j) sum += parts[j];
    const int Nn = grid_.size();
    for (int p = 0; p < a_.size(); ++p)
      for (int q = 0; q < a_.size(); ++q)
        for (int m = 0; m < Nn; ++m)
          if (phi_[m] != 1.0) sum.entry(p, q).col(m) *= phi_[m];
    return sum;
  }

  Matrix Parametrix::node_bN(int x_index, int mode, Complex lambda) const
  {
    const int k = a_.size();
    if (phi_[mode] == 0.0) return Matrix::Zero(k, k);
    std::vector<MatJet> jets;
    node_bj(x_index * grid_.size() + mode, lambda, false, jets);
    Matrix sum = jets[0].value();
    for (int j = 1; j < N_; ++j) sum += jets[j].value();
    return phi_[mode] * sum;
  }

  GridSymbol Parametrix::bj_derivative(Complex lambda, int j, const MultiIndex& alpha, const MultiIndex& beta) const
  {
    const int n = grid_.dim();
    if (j < 0 || j >= N_) throw DomainError("bj_derivative: j out of range");
    if (order(alpha) + order(beta) > layout_->order() - j)
      throw DomainError("bj_derivative: derivative order exceeds the jet order");
    check_lambda(lambda);
    std::vector<int> e(2 * n);
    for (int d = 0; d < n; ++d)
    {
      e[d] = beta[d];
      e[n + d] = alpha[d];
    }
    const int Nn = grid_.size();
    GridSymbol out(grid_, a_.size());
    parallel_for(Nn,
        [&](int i)
        {
          std::vector<MatJet> jets;
          for (int m = 0; m < Nn; ++m)
          {
            if (phi_[m] == 0.0) continue;
            node_bj(i * Nn + m, lambda, false, jets);
            out.set_value(i, m, jets[j].derivative_value(e));
          }
        });
    return out;
  }

  Remainder Parametrix::remainder(Complex lambda, const GridSymbol& bN, bool split) const
  {
    const int d = qa_.dimension();
    Matrix M = qa_.matrix;
    M.diagonal().array() -= lambda;
    Remainder rem;
    rem.op.noalias() = M * quantize(bN).matrix;
    rem.op.diagonal().array() -= 1.0;
    rem.r = extract_symbol(grid_, a_.size(), rem.op);
    (void)d;
    if (!split) return rem;

    if (layout_->order() < 2 * N_ - 2)
      throw DomainError("remainder: the q_N split needs jet order >= 2N - 2");
    const int n = grid_.dim();
    const int Nn = grid_.size();
    const int k = a_.size();
    GridSymbol q(grid_, k);
    parallel_for(Nn,
        [&](int i)
        {
          std::vector<MatJet> jets;
          std::vector<int> e(2 * n, 0);
          for (int m = 0; m < Nn; ++m)
          {
            if (phi_[m] == 0.0) continue;
            const std::size_t node = static_cast<std::size_t>(i) * Nn + m;
            node_bj(static_cast<int>(node), lambda, false, jets);
            const auto& J = xi_jets_[node];
            Matrix value = Matrix::Zero(k, k);
            for (int total = 0; total < N_; ++total)
              for (const auto& alpha : multi_indices(n, total))
              {
                Matrix da = total == 0 ? J[0].value() : J[1 + alpha_position(alphas_, alpha)].value();
                if (total == 0) da.diagonal().array() -= lambda;
                std::fill(e.begin(), e.end(), 0);
                for (int t = 0; t < n; ++t) e[t] = alpha[t];
                Matrix db = Matrix::Zero(k, k);
                for (int j = 0; j < N_; ++j) db += jets[j].derivative_value(e);
                value += (minus_i_power(total) * phi_[m] / factorial(alpha)) * (da * db);
              }
            q.set_value(i, m, value);
          }
        });
    q.add_identity(-1.0);
    rem.oscillatory = rem.r - q;
    rem.q_minus_one = std::move(q);
    return rem;
  }

  GridSymbol Parametrix::left_remainder(Complex lambda, const GridSymbol& left_bN) const
  {
    Matrix M = qa_.matrix;
    M.diagonal().array() -= lambda;
    Matrix E = quantize(left_bN).matrix * M;
    E.diagonal().array() -= 1.0;
    return extract_symbol(grid_, a_.size(), E);
  }

  LeibnizResolvent Parametrix::resolvent(Complex lambda, const ResolventOptions& options, const GridSymbol* bN_in) const
  {
    LeibnizResolvent out;
    const GridSymbol bN = bN_in ? *bN_in : this->bN(lambda);
    const int dim = qa_.dimension();
    Matrix M = qa_.matrix;
    M.diagonal().array() -= lambda;
    const Matrix B = quantize(bN).matrix;
    Matrix R = M * B;
    R.diagonal().array() -= 1.0;
    // only steers the path choice; the residual check below certifies the result
    const double rho = std::min(R.norm(), 1.05 * operator_norm(R, 1e-3, 60).value);
    out.diagnostics.r_norm = rho;

    auto residual_of = [&](const Matrix& X)
    {
      Matrix E = M * X;
      E.diagonal().array() -= 1.0;
      return extract_symbol(grid_, a_.size(), E).max_abs();
    };

    bool done = false;
    if (rho < options.neumann_threshold)
    {
      // sup of a symbol is at most sqrt(dim) times the operator norm of its quantization
      const double target = options.tol / std::sqrt(static_cast<double>(dim));
      Matrix X = B;
      Matrix T = B;
      int terms = 1;
      double tail = rho / (1.0 - rho);
      while (tail >= target && terms < 200)
      {
        T = (-T * R).eval();
        X += T;
        ++terms;
        tail *= rho;
      }
      const double res = residual_of(X);
      if (res <= options.tol)
      {
        out.op = std::move(X);
        out.diagnostics.path = ResolventPath::neumann;
        out.diagnostics.terms = terms;
        out.diagnostics.residual = res;
        done = true;
      }
    }
    if (!done)
    {
      DenseResolvent dr = dense_resolvent(qa_.matrix, lambda);
      out.diagnostics.path = ResolventPath::dense;
      out.diagnostics.terms = 0;
      out.diagnostics.residual = residual_of(dr.X);
      if (!(out.diagnostics.residual <= options.tol))
        throw NumericalError("leibniz_resolvent: residual " + std::to_string(out.diagnostics.residual) +
                             " exceeds tolerance on both paths");
      out.op = std::move(dr.X);
    }
    if (options.symbols)
    {
      out.resolvent = extract_symbol(grid_, a_.size(), out.op);
      out.sN = *out.resolvent - bN;
      out.bN = bN;
    }
    return out;
  }

  FindRResult Parametrix::find_R(const Sector& sector, int jmax) const
  {
    FindRResult res;
    for (int j = 0; j <= jmax; ++j)
    {
      const double r = std::ldexp(1.0, j);
      double worst = 0.0;
      for (bool upper : {true, false})
      {
        const Complex lambda = sector.ray(r, upper);
        const GridSymbol b = bN(lambda);
        worst = std::max(worst, operator_norm(remainder(lambda, b).op).value);
      }
      res.radii.push_back(r);
      res.norms.push_back(worst);
    }
    int first = jmax + 1;
    for (int j = jmax; j >= 0 && res.norms[j] <= 0.5; --j) first = j;
    if (first > jmax) throw NumericalError("find_R: ||r^N|| stays above 1/2 up to the sampling ceiling");
    res.R = res.radii[first];
    return res;
  }

  // ---------------------------------------------------------------------------

  std::vector<GridSymbol> bj_recursion(const SymbolExpr& a, int N, Complex lambda, const TorusGrid& grid)
  {
    return Parametrix(a, grid, {N, 0.0, -1, {}}).bj(lambda);
  }

  GridSymbol assemble_bN(const SymbolExpr& a, int N, Complex lambda, double C, const TorusGrid& grid)
  {
    return Parametrix(a, grid, {N, C, -1, {}}).bN(lambda);
  }

  GridSymbol remainder_rN(const SymbolExpr& a, const GridSymbol& bN, Complex lambda)
  {
    GridSymbol shifted = sample(a, bN.grid());
    shifted.add_identity(-lambda);
    GridSymbol r = compose_exact(shifted, bN);
    r.add_identity(-1.0);
    return r;
  }

  LeibnizResolvent leibniz_resolvent(const SymbolExpr& a, Complex lambda, int N, double tol, const TorusGrid& grid)
  {
    ResolventOptions options;
    options.tol = tol;
    return Parametrix(a, grid, {N, 0.0, -1, {}}).resolvent(lambda, options);
  }

  double find_R(const SymbolExpr& a, int N, const Sector& sector, const TorusGrid& grid)
  {
    return Parametrix(a, grid, {N, 0.0, -1, sector.theta()}).find_R(sector).R;
  }

  std::vector<Complex> ray_sweep(const Sector& sector, double lo, double hi, int count, bool both_rays)
  {
    if (!(lo > 0.0 && hi > lo && count >= 2)) throw DomainError("ray_sweep: invalid range");
    std::vector<Complex> out;
    for (int j = 0; j < count; ++j)
    {
      const double r = lo * std::pow(hi / lo, static_cast<double>(j) / (count - 1));
      out.push_back(sector.ray(r, !both_rays || j % 2 == 0));
    }
    return out;
  }

  ParamSymbolFamily parametrix_sweep(const Parametrix& engine, const SymbolClassParams& cls,
      const std::vector<Complex>& lambdas, double R, const SweepOptions& options)
  {
    ParamSymbolFamily fam;
    fam.N = engine.N();
    fam.R = R;
    fam.weight = -(cls.m - engine.N() * (cls.rho - cls.delta));
    fam.rows.resize(lambdas.size());
    if (options.keep_symbols)
    {
      fam.bN.resize(lambdas.size());
      fam.rN.resize(lambdas.size());
      fam.resolvent.resize(lambdas.size());
      fam.sN.resize(lambdas.size());
    }
    for (std::size_t t = 0; t < lambdas.size(); ++t)
    {
      const Complex lambda = lambdas[t];
      SweepRow& row = fam.rows[t];
      row.lambda = lambda;
      const GridSymbol b = engine.bN(lambda);
      const Remainder rem = engine.remainder(lambda, b);
      row.bN_sup = b.sup_norm(options.margin);
      row.rN_norm = rem.r.sup_norm(options.margin, fam.weight);
      row.rN_op = operator_norm(rem.op).value;
      if (options.left)
        row.left_rN_norm = engine.left_remainder(lambda, engine.bN(lambda, true)).sup_norm(options.margin, fam.weight);
      if (std::abs(lambda) >= R)
      {
        ResolventOptions ro;
        ro.tol = options.tol;
        const LeibnizResolvent res = engine.resolvent(lambda, ro, &b);
        row.sN_norm = res.sN->sup_norm(options.margin, fam.weight);
        row.residual = res.diagnostics.residual;
        row.path = res.diagnostics.path == ResolventPath::neumann ? "neumann" : "dense";
        if (options.keep_symbols)
        {
          fam.resolvent[t] = *res.resolvent;
          fam.sN[t] = *res.sN;
        }
      }
      if (options.keep_symbols)
      {
        fam.bN[t] = b;
        fam.rN[t] = rem.r;
      }
    }

    auto slope = [&](auto value, bool scale_by_lambda)
    {
      std::vector<double> xs, ys;
      for (const auto& row : fam.rows)
      {
        const double v = value(row);
        if (!(v > 0.0) || !std::isfinite(v)) continue;
        const double br = std::sqrt(1.0 + std::norm(row.lambda));
        xs.push_back(br);
        ys.push_back(scale_by_lambda ? v * br : v);
      }
      if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
      return loglog_slope(xs, ys);
    };
    fam.slope_bN = slope([](const SweepRow& r) { return r.bN_sup; }, true);
    fam.slope_rN = slope([](const SweepRow& r) { return r.rN_norm; }, false);
    fam.slope_sN = slope([](const SweepRow& r) { return r.sN_norm; }, false);
    return fam;
  }

  void ParamSymbolFamily::write_csv(std::ostream& out) const
  {
    auto f = [](double v)
    {
      char buf[40];
      if (std::isnan(v)) return std::string();
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    out << "kind,lambda_re,lambda_im,abs_lambda,bN_sup,rN_norm,rN_op,left_rN_norm,sN_norm,residual,path,value\n";
    for (const auto& r : rows)
      out << "row," << f(r.lambda.real()) << ',' << f(r.lambda.imag()) << ',' << f(std::abs(r.lambda)) << ','
          << f(r.bN_sup) << ',' << f(r.rN_norm) << ',' << f(r.rN_op) << ',' << f(r.left_rN_norm) << ','
          << f(r.sN_norm) << ',' << f(r.residual) << ',' << r.path << ",\n";
    out << "slope_bN_scaled,,,,,,,,,,," << f(slope_bN) << '\n';
    out << "slope_rN,,,,,,,,,,," << f(slope_rN) << '\n';
    out << "slope_sN,,,,,,,,,,," << f(slope_sN) << '\n';
    out << "R,,,,,,,,,,," << f(R) << '\n';
    out << "N,,,,,,,,,,," << N << '\n';
    out << "weight,,,,,,,,,,," << f(weight) << '\n';
  }

}  // namespace hinf
