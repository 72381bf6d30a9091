#include "hinf/hypo.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace hinf
{
  Sector::Sector(double theta) : theta_(theta)
  {
    if (!(theta > 0.0 && theta < pi)) throw DomainError("Sector: theta must lie in (0, pi)");
  }

  bool Sector::contains(Complex lambda) const
  {
    if (lambda == 0.0) return true;
    return std::abs(std::arg(lambda)) >= theta_ - 1e-12;
  }

  namespace
  {
    // p(z) = sum c[j] z^j and p'(z)
    void horner(const std::vector<Complex>& c, Complex z, Complex& p, Complex& dp)
    {
      p = 0.0;
      dp = 0.0;
      for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j)
      {
        dp = dp * z + p;
        p = p * z + c[j];
      }
    }

    std::vector<Complex> polynomial_roots(const std::vector<Complex>& c)
    {
      const int n = static_cast<int>(c.size()) - 1;
      double bound = 0.0;
      for (int j = 0; j < n; ++j) bound = std::max(bound, std::abs(c[j] / c[n]));
      bound += 1.0;
      std::vector<Complex> z(n);
      for (int i = 0; i < n; ++i) z[i] = std::polar(bound, 2.0 * pi * i / n + 0.4);

      for (int it = 0; it < 500; ++it)
      {
        double change = 0.0;
        for (int i = 0; i < n; ++i)
        {
          Complex p, dp;
          horner(c, z[i], p, dp);
          if (p == 0.0) continue;
          const Complex ratio = p / dp;
          Complex repel = 0.0;
          for (int j = 0; j < n; ++j)
            if (j != i) repel += 1.0 / (z[i] - z[j]);
          const Complex w = ratio / (1.0 - ratio * repel);
          z[i] -= w;
          change = std::max(change, std::abs(w) / std::max(1.0, std::abs(z[i])));
        }
        if (change < 1e-15) break;
      }
      for (auto& r : z)
      {
        for (int polish = 0; polish < 3; ++polish)
        {
          Complex p, dp;
          horner(c, r, p, dp);
          if (dp == 0.0 || p == 0.0) break;
          r -= p / dp;
        }
      }
      return z;
    }
  }  // namespace

  std::vector<Complex> small_eigenvalues(const Matrix& m)
  {
    const int k = static_cast<int>(m.rows());
    if (k == 1) return {m(0, 0)};
    if (k == 2)
    {
      const Complex half_tr = 0.5 * (m(0, 0) + m(1, 1));
      const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      const Complex disc = std::sqrt(half_tr * half_tr - det);
      const Complex l1 = half_tr + disc;
      const Complex l2 = half_tr - disc;
      // avoid cancellation in the smaller root
      if (std::abs(l1) >= std::abs(l2))
        return {l1, l1 == 0.0 ? l2 : det / l1};
      return {det / l2, l2};
    }
    if (k > 4) throw DomainError("small_eigenvalues: matrix size must not exceed 4");
    // Faddeev-LeVerrier characteristic polynomial
    std::vector<Complex> c(k + 1);
    c[k] = 1.0;
    Matrix M = Matrix::Zero(k, k);
    const Matrix I = Matrix::Identity(k, k);
    for (int j = 1; j <= k; ++j)
    {
      M = m * M + c[k - j + 1] * I;
      c[k - j] = -(m * M).trace() / static_cast<double>(j);
    }
    return polynomial_roots(c);
  }

  std::vector<Complex> lambda_samples(const Sector& sector, double lo, double hi, int per_decade)
  {
    if (!(lo > 0.0 && hi >= lo && per_decade > 0)) throw DomainError("lambda_samples: invalid range");
    std::vector<Complex> out{0.0};
    const int j0 = static_cast<int>(std::ceil(std::log10(lo) * per_decade - 1e-9));
    const int j1 = static_cast<int>(std::floor(std::log10(hi) * per_decade + 1e-9));
    for (int j = j0; j <= j1; ++j)
    {
      const double r = std::pow(10.0, static_cast<double>(j) / per_decade);
      out.push_back(sector.ray(r, true));
      out.push_back(sector.ray(r, false));
    }
    return out;
  }

  std::optional<double> HypoReport::c_entry(const MultiIndex& alpha, const MultiIndex& beta) const
  {
    for (const auto& e : c_table)
      if (e.alpha == alpha && e.beta == beta) return e.value;
    return std::nullopt;
  }

  namespace
  {
    std::string fmt(double v)
    {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return buf;
    }

    std::string index_text(const MultiIndex& a)
    {
      std::string s;
      for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ";" : "") + std::to_string(a[i]);
      return s;
    }

    bool include_node(const TorusGrid& grid, int m, double C)
    {
      return grid.in_window(m) && grid.xi_norm(m) >= C;
    }
  }  // namespace

  std::string HypoReport::summary() const
  {
    std::ostringstream s;
    s << "pass " << (pass ? "true" : "false") << '\n';
    s << "theta " << fmt(theta) << '\n';
    s << "c " << fmt(c) << '\n';
    s << "C " << fmt(C) << '\n';
    s << "window " << window << " (class membership certified on |xi_d| <= window only)\n";
    s << "min_modulus " << fmt(min_modulus) << '\n';
    s << "violations " << violations.size() << '\n';
    if (c0) s << "c0 " << fmt(*c0) << '\n';
    if (R) s << "R " << fmt(*R) << '\n';
    for (const auto& e : c_table)
      s << "c[" << index_text(e.alpha) << "|" << index_text(e.beta) << "] " << fmt(e.value) << '\n';
    return s.str();
  }

  void HypoReport::write_csv(std::ostream& out) const
  {
    out << "kind,alpha,beta,x_index,mode,re,im,value\n";
    out << "pass,,,,,,," << (pass ? 1 : 0) << '\n';
    out << "theta,,,,,,," << fmt(theta) << '\n';
    out << "c,,,,,,," << fmt(c) << '\n';
    out << "C,,,,,,," << fmt(C) << '\n';
    out << "window,,,,,,," << window << '\n';
    out << "min_modulus,,," << min_x_index << ',' << min_mode << ",,," << fmt(min_modulus) << '\n';
    out << "max_norm,,,,,,," << fmt(max_norm) << '\n';
    if (c0) out << "c0,,,,,,," << fmt(*c0) << '\n';
    if (R) out << "R,,,,,,," << fmt(*R) << '\n';
    for (const auto& e : c_table)
      out << "c_ab," << index_text(e.alpha) << ',' << index_text(e.beta) << ",,,,," << fmt(e.value) << '\n';
    for (const auto& v : violations)
      out << "violation,,," << v.x_index << ',' << v.mode << ',' << fmt(v.eigenvalue.real()) << ','
          << fmt(v.eigenvalue.imag()) << ",\n";
  }

  HypoReport check_spectrum(const SymbolExpr& a, const Sector& sector, double c, double C, const TorusGrid& grid)
  {
    if (a.dim() != grid.dim()) throw DomainError("check_spectrum: symbol and grid dimensions differ");
    if (a.size() > 4) throw DomainError("check_spectrum: matrix size must not exceed 4");
    if (!(c > 0.0) || !(C >= 0.0)) throw DomainError("check_spectrum: require c > 0 and C >= 0");
    HypoReport r;
    r.theta = sector.theta();
    r.c = c;
    r.C = C;
    r.window = grid.window();
    r.min_modulus = std::numeric_limits<double>::infinity();
    const int N = grid.size();
    for (int m = 0; m < N; ++m)
    {
      if (!include_node(grid, m, C)) continue;
      const auto xi = grid.xi(m);
      for (int i = 0; i < N; ++i)
      {
        const auto x = grid.x(i);
        const Matrix v = a.evaluate_matrix(x, xi);
        r.max_norm = std::max(r.max_norm, spectral_norm(v));
        for (const Complex ev : small_eigenvalues(v))
        {
          const double mod = std::abs(ev);
          if (mod < r.min_modulus)
          {
            r.min_modulus = mod;
            r.min_x_index = i;
            r.min_mode = m;
          }
          if (mod <= c || sector.contains(ev)) r.violations.push_back({i, m, ev});
        }
      }
    }
    r.pass = r.violations.empty();
    return r;
  }

  HypoReport estimate_hypo_constants(const SymbolExpr& a, const SymbolClassParams& cls, const Sector& sector,
      const TorusGrid& grid, HypoReport base, const HypoConstantsOptions& options)
  {
    cls.validate_for_hypoellipticity();
    if (!base.pass) throw DomainError("estimate_hypo_constants: spectrum check did not pass");
    const int n = a.dim();
    const int k = a.size();
    const int N = grid.size();

    std::vector<std::pair<MultiIndex, MultiIndex>> indices;
    std::vector<SymbolExpr> derivs;
    for (int total = 0; total <= options.max_order; ++total)
      for (int s = 0; s <= total; ++s)
        for (const auto& alpha : multi_indices(n, s))
          for (const auto& beta : multi_indices(n, total - s))
          {
            indices.emplace_back(alpha, beta);
            derivs.push_back(a.differentiate(alpha, beta));
          }
    std::vector<double> table(indices.size(), 0.0);

    const auto lambdas = lambda_samples(sector, base.c, 10.0 * std::max(base.max_norm, base.c), options.per_decade);
    double c0 = 0.0;
    const double circle_factor[] = {1.0, 2.0, 4.0};
    const int angles = 16;

    std::vector<double> dnorm(indices.size());
    for (int m = 0; m < N; ++m)
    {
      if (!include_node(grid, m, base.C)) continue;
      const auto xi = grid.xi(m);
      const double br = grid.bracket(m);
      for (int i = 0; i < N; ++i)
      {
        const auto x = grid.x(i);
        const Matrix v = a.evaluate_matrix(x, xi);
        for (std::size_t t = 0; t < indices.size(); ++t)
        {
          const double w = std::pow(br, cls.rho * order(indices[t].first) - cls.delta * order(indices[t].second));
          dnorm[t] = spectral_norm(derivs[t].evaluate_matrix(x, xi)) * w;
        }
        auto resolvent_norm = [&](Complex lambda)
        {
          if (k == 1)
          {
            const Complex d = v(0, 0) - lambda;
            if (d == 0.0) throw NumericalError("estimate_hypo_constants: a - lambda is singular at a sample");
            return 1.0 / std::abs(d);
          }
          Matrix s = v;
          s.diagonal().array() -= lambda;
          Eigen::JacobiSVD<Matrix> svd(s);
          const double smin = svd.singularValues()(k - 1);
          if (!(smin > 0.0)) throw NumericalError("estimate_hypo_constants: a - lambda is singular at a sample");
          return 1.0 / smin;
        };
        for (const Complex lambda : lambdas)
        {
          const double rn = resolvent_norm(lambda);
          for (std::size_t t = 0; t < indices.size(); ++t) table[t] = std::max(table[t], dnorm[t] * rn);
          c0 = std::max(c0, std::sqrt(1.0 + std::norm(lambda)) * rn);
        }
        const double rad = 2.0 * spectral_norm(v);
        for (double f : circle_factor)
          for (int j = 1; j < angles; ++j)
          {
            const double phi = -sector.theta() + 2.0 * sector.theta() * j / angles;
            const Complex lambda = std::polar(rad * f, phi);
            c0 = std::max(c0, std::sqrt(1.0 + std::norm(lambda)) * resolvent_norm(lambda));
          }
      }
    }
    base.c_table.clear();
    for (std::size_t t = 0; t < indices.size(); ++t)
      base.c_table.push_back({indices[t].first, indices[t].second, table[t]});
    base.c0 = c0;
    base.lambda_count = static_cast<int>(lambdas.size());
    return base;
  }

  OmegaRegion omega_region(const SymbolExpr& a, const Sector& sector, std::span<const double> x,
      std::span<const double> xi)
  {
    return {2.0 * spectral_norm(a.evaluate_matrix(x, xi)), sector};
  }

}  // namespace hinf
