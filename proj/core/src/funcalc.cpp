#include "hinf/funcalc.hpp"

#include "hinf/fit.hpp"
#include "hinf/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>

namespace hinf
{
  namespace
  {
    // empty field for quantities that were not computed
    std::string fmt(double v)
    {
      if (std::isnan(v)) return {};
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

    // commas would split the csv field
    std::string csv_name(std::string s)
    {
      for (char& c : s)
        if (c == ',') c = ';';
      return s;
    }

    // sum_q c_{q,m} Y_q for all members m, flushed through one product per batch of nodes
    class NodeSum
    {
    public:
      NodeSum(Eigen::Index dim, std::size_t members)
          : dim_(dim), Y_(dim * dim, batch_), C_(batch_, static_cast<Eigen::Index>(members)),
            S_(Matrix::Zero(dim * dim, static_cast<Eigen::Index>(members)))
      {
      }

      void add(const Matrix& Y, const std::vector<Complex>& c)
      {
        Y_.col(used_) = Eigen::Map<const Vector>(Y.data(), Y.size());
        for (std::size_t m = 0; m < c.size(); ++m) C_(used_, static_cast<Eigen::Index>(m)) = c[m];
        if (++used_ == batch_) flush();
      }

      std::vector<Matrix> result()
      {
        flush();
        std::vector<Matrix> out;
        for (Eigen::Index m = 0; m < S_.cols(); ++m) out.emplace_back(Eigen::Map<const Matrix>(S_.col(m).data(), dim_, dim_));
        return out;
      }

    private:
      void flush()
      {
        if (used_ == 0) return;
        S_.noalias() += Y_.leftCols(used_) * C_.topRows(used_);
        used_ = 0;
      }

      static constexpr Eigen::Index batch_ = 16;
      Eigen::Index dim_;
      Matrix Y_;
      Matrix C_;
      Matrix S_;
      Eigen::Index used_ = 0;
    };
  }  // namespace

  SymbolCalc f_of_symbol(const Parametrix& engine, std::span<const HFun> family, const Contour& contour,
      const FcalcOptions& options)
  {
    if (family.empty()) throw DomainError("f_of_symbol: empty function family");
    const TorusGrid& grid = engine.grid();
    const int k = engine.symbol().size();
    const int dim = engine.quantized().dimension();
    SymbolCalc out;
    NodeSum sum(dim, family.size());
    std::vector<Complex> coeff(family.size());
    if (options.split) out.bN_part.assign(family.size(), GridSymbol(grid, k));
    ResolventOptions ro = options.resolvent;
    ro.symbols = false;

    for (const auto& node : contour.nodes)
    {
      const GridSymbol b = engine.bN(node.lambda);
      const LeibnizResolvent res = engine.resolvent(node.lambda, ro, &b);
      (res.diagnostics.path == ResolventPath::neumann ? out.neumann_nodes : out.dense_nodes) += 1;
      out.max_residual = std::max(out.max_residual, res.diagnostics.residual);
      for (std::size_t m = 0; m < family.size(); ++m)
      {
        coeff[m] = node.weight * family[m](node.lambda);
        if (options.split) out.bN_part[m].axpy(coeff[m], b);
      }
      sum.add(res.op, coeff);
    }
    out.ops = sum.result();
    for (std::size_t m = 0; m < family.size(); ++m)
    {
      out.values.push_back(extract_symbol(grid, k, out.ops[m]));
      if (options.split) out.sN_part.push_back(out.values[m] - out.bN_part[m]);
    }
    return out;
  }

  GridSymbol f_of_symbol(const Parametrix& engine, const HFun& f, const Contour& contour)
  {
    return std::move(f_of_symbol(engine, std::span<const HFun>(&f, 1), contour).values[0]);
  }

  std::vector<Matrix> f_of_operator_oracle(const Matrix& A, std::span<const HFun> family, const Contour& contour)
  {
    if (family.empty()) throw DomainError("f_of_operator_oracle: empty function family");
    const HessenbergResolvent hr(A);
    NodeSum sum(A.rows(), family.size());
    std::vector<Complex> coeff(family.size());
    for (const auto& node : contour.nodes)
    {
      for (std::size_t m = 0; m < family.size(); ++m) coeff[m] = node.weight * family[m](node.lambda);
      sum.add(hr.reduced(node.lambda), coeff);
    }
    std::vector<Matrix> out = sum.result();
    for (auto& M : out) M = hr.to_original(M);
    return out;
  }

  Matrix f_of_operator_oracle(const QuantOp& A, const HFun& f, const Contour& contour)
  {
    return std::move(f_of_operator_oracle(A.matrix, std::span<const HFun>(&f, 1), contour)[0]);
  }

  double relative_discrepancy(const Matrix& S, const Matrix& O)
  {
    const double base = operator_norm(O).value;
    if (!(base > 0.0)) throw NumericalError("relative_discrepancy: reference operator vanishes");
    return operator_norm(S - O).value / base;
  }

  // ---------------------------------------------------------------------------

  namespace
  {
    // boundary of {|u| < 1, |arg u| < theta}, counterclockwise, truncated at 10^{-decades}
    const std::vector<ContourNode>& unit_omega_contour(double theta, int decades, int per_panel, int arc_nodes)
    {
      static std::mutex mutex;
      static std::map<std::tuple<double, int, int, int>, std::vector<ContourNode>> cache;
      std::lock_guard lock(mutex);
      auto& nodes = cache[{theta, decades, per_panel, arc_nodes}];
      if (!nodes.empty()) return nodes;
      const Complex c = Complex(0.0, 1.0 / (2.0 * pi));
      const GaussLegendre& gl = gauss_legendre(per_panel);
      for (bool upper : {true, false})
      {
        std::vector<ContourNode> seg;
        const Complex dir = std::polar(1.0, upper ? theta : -theta);
        const Complex orient = (upper ? -1.0 : 1.0) * dir * c;
        for (int j = 0; j < decades; ++j)
        {
          const double a = std::log(std::pow(10.0, -j - 1.0));
          const double b = std::log(std::pow(10.0, -j));
          for (int q = 0; q < per_panel; ++q)
          {
            const double r = std::exp(0.5 * (a + b) + 0.5 * (b - a) * gl.x[q]);
            seg.push_back({r * dir, orient * (0.5 * (b - a) * gl.w[q] * r)});
          }
        }
        nodes.insert(nodes.end(), seg.begin(), seg.end());
      }
      const int arc_panels = 4;
      const int per_arc = std::max(1, arc_nodes / arc_panels);
      const GaussLegendre& ga = gauss_legendre(per_arc);
      for (int p = 0; p < arc_panels; ++p)
      {
        const double a = -theta + 2.0 * theta * p / arc_panels;
        const double b = -theta + 2.0 * theta * (p + 1) / arc_panels;
        for (int q = 0; q < per_arc; ++q)
        {
          const double phi = 0.5 * (a + b) + 0.5 * (b - a) * ga.x[q];
          const Complex u = std::polar(1.0, phi);
          nodes.push_back({u, c * Complex(0.0, 1.0) * u * (0.5 * (b - a) * ga.w[q])});
        }
      }
      return nodes;
    }
  }  // namespace

  GridSymbol deformed_bN_f(const Parametrix& engine, const HFun& f, const Sector& sector,
      const DeformedOptions& options)
  {
    const double scale = f.c_f * options.c0;
    const double r_min = std::pow(options.tol * (f.d + 1.0) * pi / (4.0 * scale), 1.0 / (f.d + 1.0));
    const TorusGrid& grid = engine.grid();
    const int Nn = grid.size();
    GridSymbol out(grid, engine.symbol().size());
    parallel_for(Nn,
        [&](int i)
        {
          for (int m = 0; m < Nn; ++m)
          {
            const double R = engine.omega_radius(i, m);
            if (!(R > 0.0)) throw NumericalError("deformed_bN_f: a(x, xi) vanishes at a node");
            const int decades = std::max(1, static_cast<int>(std::ceil(std::log10(R / r_min))));
            const auto& unit = unit_omega_contour(sector.theta(), decades, options.nodes_per_panel, options.arc_nodes);
            Matrix sum = Matrix::Zero(out.size(), out.size());
            for (const auto& node : unit)
            {
              const Complex lambda = R * node.lambda;
              sum += (R * node.weight * f(lambda)) * engine.node_bN(i, m, lambda);
            }
            out.set_value(i, m, sum);
          }
        });
    return out;
  }

  GridSymbol imaginary_power(const Parametrix& engine, const Sector& sector, double t, double n_reg,
      const Contour& contour)
  {
    return f_of_symbol(engine, regularized_imaginary_power(t, n_reg, sector), contour);
  }

  // ---------------------------------------------------------------------------

  BipReport bip_sweep(const Matrix& A, const Sector& sector, std::span<const double> ts, double n_reg,
      const ContourOptions& options)
  {
    if (ts.empty()) throw DomainError("bip_sweep: no t values");
    std::vector<HFun> family;
    for (double t : ts) family.push_back(regularized_imaginary_power(t, n_reg, sector));
    const Contour contour = build_contour(sector, family, options);
    const auto ops = f_of_operator_oracle(A, family, contour);
    BipReport rep;
    rep.theta = sector.theta();
    rep.n_reg = n_reg;
    rep.contour_nodes = static_cast<int>(contour.nodes.size());
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < ts.size(); ++j)
    {
      BipRow row{ts[j], operator_norm(ops[j]).value, sup_norm(family[j], sector)};
      rep.rows.push_back(row);
      xs.push_back(std::abs(row.t));
      ys.push_back(std::log(row.norm));
    }
    if (xs.size() >= 2)
    {
      const LineFit fit = linear_fit(xs, ys);
      rep.rate = fit.slope;
      rep.intercept = fit.intercept;
    }
    return rep;
  }

  void BipReport::write_csv(std::ostream& out) const
  {
    out << "kind,t,value\n";
    for (const auto& r : rows)
    {
      out << "norm," << fmt(r.t) << ',' << fmt(r.norm) << '\n';
      out << "sup_norm," << fmt(r.t) << ',' << fmt(r.sup_norm) << '\n';
    }
    out << "rate,," << fmt(rate) << '\n';
    out << "intercept,," << fmt(intercept) << '\n';
    out << "theta,," << fmt(theta) << '\n';
    out << "rate_bound,," << fmt(theta + 0.2) << '\n';
    out << "n_reg,," << fmt(n_reg) << '\n';
    out << "contour_nodes,," << contour_nodes << '\n';
  }

  double ProbeReport::M(int count) const
  {
    const std::size_t n = count < 0 ? rows.size() : std::min<std::size_t>(count, rows.size());
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, rows[j].ratio);
    return m;
  }

  double ProbeReport::M_q(std::size_t q, int count) const
  {
    const std::size_t n = count < 0 ? rows.size() : std::min<std::size_t>(count, rows.size());
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (q < rows[j].q_ratio.size()) m = std::max(m, rows[j].q_ratio[q]);
    return m;
  }

  void ProbeReport::write_csv(std::ostream& out) const
  {
    out << "kind,name,sup_norm,op_norm,symbol_op_norm,ratio,discrepancy";
    for (const auto& s : seminorms) out << ",q[" << index_text(s.first) << "|" << index_text(s.second) << "]";
    out << '\n';
    for (const auto& r : rows)
    {
      out << "member," << csv_name(r.name) << ',' << fmt(r.sup_norm) << ',' << fmt(r.op_norm) << ','
          << fmt(r.symbol_op_norm) << ',' << fmt(r.ratio) << ',' << fmt(r.discrepancy);
      for (double q : r.q_ratio) out << ',' << fmt(q);
      out << '\n';
    }
    out << "summary,M,,,," << fmt(M()) << ',';
    for (std::size_t q = 0; q < seminorms.size(); ++q) out << ',' << fmt(M_q(q));
    out << '\n';
  }

  ProbeReport hinf_bound_probe(const Parametrix& engine, const Sector& sector, std::span<const HFun> family,
      const ProbeOptions& options)
  {
    if (family.empty()) throw DomainError("hinf_bound_probe: empty function family");
    for (const auto& f : family) validate_hfun(f, sector);
    ProbeReport rep;
    rep.seminorms = options.seminorms;
    const Contour oracle_contour = build_contour(sector, family, oracle_options(options.contour));
    rep.oracle_nodes = static_cast<int>(oracle_contour.nodes.size());
    const auto oracle = f_of_operator_oracle(engine.quantized().matrix, family, oracle_contour);

    std::optional<SymbolCalc> calc;
    if (options.symbol_level)
    {
      const Contour contour = build_contour(sector, family, options.contour);
      rep.contour_nodes = static_cast<int>(contour.nodes.size());
      calc = f_of_symbol(engine, family, contour);
    }
    for (std::size_t m = 0; m < family.size(); ++m)
    {
      ProbeRow row;
      row.name = family[m].name;
      row.sup_norm = sup_norm(family[m], sector);
      row.op_norm = operator_norm(oracle[m]).value;
      row.ratio = row.op_norm / row.sup_norm;
      row.discrepancy = std::numeric_limits<double>::quiet_NaN();
      row.symbol_op_norm = std::numeric_limits<double>::quiet_NaN();
      if (calc)
      {
        GridSymbol v = calc->values[m];
        v.set_cls(options.cls);
        for (const auto& s : options.seminorms)
          row.q_ratio.push_back(seminorm(v, s.first, s.second, options.margin) / row.sup_norm);
        row.symbol_op_norm = operator_norm(calc->ops[m]).value;
        row.discrepancy = relative_discrepancy(calc->ops[m], oracle[m]);
      }
      rep.rows.push_back(std::move(row));
    }
    return rep;
  }

  ResolventBoundReport resolvent_bound(const Matrix& A, const Sector& sector, double lo, double hi, int per_decade)
  {
    ResolventBoundReport rep;
    std::vector<double> xs, ys;
    for (const Complex lambda : lambda_samples(sector, lo, hi, per_decade))
    {
      const double norm = operator_norm(dense_resolvent(A, lambda).X).value;
      rep.rows.push_back({lambda, norm});
      const double br = std::sqrt(1.0 + std::norm(lambda));
      rep.sup = std::max(rep.sup, br * norm);
      if (lambda != 0.0)
      {
        xs.push_back(br);
        ys.push_back(norm);
      }
    }
    rep.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
    return rep;
  }

}  // namespace hinf
