#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

namespace hinfcalc
{
  namespace
  {
    std::ofstream open_csv(const CommandContext& ctx, const char* name)
    {
      std::filesystem::create_directories(ctx.out);
      const auto path = ctx.out / name;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + path.string());
      return out;
    }

    template <class... Args>
    void say(const CommandContext& ctx, const char* format, Args... args)
    {
      if (!ctx.log) return;
      char buf[512];
      std::snprintf(buf, sizeof buf, format, args...);
      *ctx.log << buf << '\n';
    }

    void say(const CommandContext& ctx, const std::string& text)
    {
      if (ctx.log) *ctx.log << text << '\n';
    }

    struct Checked
    {
      hinf::PresetSymbol symbol;
      hinf::HypoReport report;
    };

    // every command starts from the spectral check; a failing symbol stops here
    bool run_check(const RunConfig& config, const CommandContext& ctx, Checked& out)
    {
      out.symbol = config.symbol();
      const hinf::TorusGrid grid = config.grid();
      out.report = hinf::check_spectrum(out.symbol.symbol, config.sector(), config.hypo.c, config.hypo.C, grid);
      say(ctx, "check_spectrum: %s (min |eigenvalue| %.6g, %zu violations)", out.report.pass ? "pass" : "fail",
          out.report.min_modulus, out.report.violations.size());
      return out.report.pass;
    }

    hinf::ContourOptions contour_options(const RunConfig& config, const hinf::Parametrix& engine,
        const hinf::HypoReport& report)
    {
      hinf::ContourOptions o;
      o.tol = config.contour.tol;
      o.c0 = config.contour.c0;
      o.base_nodes = config.contour.nodes_per_panel;
      // probes span the symbol's range on the whole grid, guard mode included
      const double hi = 1.1 * std::max(engine.sampled().max_abs(), report.max_norm);
      const double lo = 0.9 * std::max(report.min_modulus, 1e-6);
      o.probes = hinf::spectral_probes(lo, std::max(hi, lo), 3);
      return o;
    }

    std::vector<hinf::SeminormIndex> default_seminorms(int n)
    {
      std::vector<hinf::SeminormIndex> out;
      const hinf::MultiIndex zero(n, 0);
      out.emplace_back(zero, zero);
      for (int d = 0; d < n; ++d)
      {
        hinf::MultiIndex e = zero;
        e[d] = 1;
        out.emplace_back(e, zero);
      }
      for (int d = 0; d < n; ++d)
      {
        hinf::MultiIndex e = zero;
        e[d] = 1;
        out.emplace_back(zero, e);
      }
      return out;
    }

    hinf::Parametrix make_engine(const RunConfig& config, const Checked& checked)
    {
      return hinf::Parametrix(checked.symbol.symbol, config.grid(), {config.N, config.C, -1, config.theta});
    }
  }  // namespace

  int cmd_check(const RunConfig& config, const CommandContext& ctx)
  {
    Checked c;
    const bool pass = run_check(config, ctx, c);
    hinf::HypoReport report = c.report;
    if (pass)
      report = hinf::estimate_hypo_constants(c.symbol.symbol, c.symbol.cls, config.sector(), config.grid(), report,
          {config.hypo.max_order, config.hypo.per_decade});
    auto out = open_csv(ctx, "hypo_report.csv");
    report.write_csv(out);
    say(ctx, report.summary());
    return pass ? exit_ok : exit_check_failed;
  }

  int cmd_parametrix(const RunConfig& config, const CommandContext& ctx)
  {
    Checked c;
    if (!run_check(config, ctx, c)) return exit_check_failed;
    const hinf::Parametrix engine = make_engine(config, c);
    const hinf::Sector sector = config.sector();
    const hinf::FindRResult fr = engine.find_R(sector);
    say(ctx, "R = %g", fr.R);
    hinf::SweepOptions opt;
    opt.margin = config.sweep.margin;
    opt.left = config.sweep.left;
    const auto lambdas = hinf::ray_sweep(sector, config.sweep.lo, config.sweep.hi, config.sweep.count);
    const hinf::ParamSymbolFamily fam = hinf::parametrix_sweep(engine, c.symbol.cls, lambdas, fr.R, opt);
    auto out = open_csv(ctx, "parametrix_sweep.csv");
    fam.write_csv(out);
    say(ctx, "slopes: <lambda> b^N %.4f, r^N %.4f, s^N %.4f", fam.slope_bN, fam.slope_rN, fam.slope_sN);
    return exit_ok;
  }

  int cmd_calc(const RunConfig& config, const CommandContext& ctx)
  {
    if (config.family.empty()) throw ConfigError("family: at least one function is required");
    Checked c;
    if (!run_check(config, ctx, c)) return exit_check_failed;
    const hinf::Parametrix engine = make_engine(config, c);
    const auto family = config.functions();
    hinf::ProbeOptions po;
    po.contour = contour_options(config, engine, c.report);
    po.seminorms = default_seminorms(config.n);
    po.cls = {0.0, c.symbol.cls.rho, c.symbol.cls.delta};
    po.margin = config.seminorm_margin;
    const auto t0 = std::chrono::steady_clock::now();
    const hinf::ProbeReport rep = hinf::hinf_bound_probe(engine, config.sector(), family, po);
    auto out = open_csv(ctx, "fcalc_report.csv");
    rep.write_csv(out);
    for (const auto& row : rep.rows)
      say(ctx, "%-28s |f| %.6g  ||f(A)|| %.6g  ratio %.6g  discrepancy %.3g", row.name.c_str(), row.sup_norm,
          row.op_norm, row.ratio, row.discrepancy);
    say(ctx, "M = %.6g (%d symbol nodes, %d oracle nodes, %.1f s)", rep.M(), rep.contour_nodes, rep.oracle_nodes,
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return exit_ok;
  }

  int cmd_bip(const RunConfig& config, const CommandContext& ctx)
  {
    Checked c;
    if (!run_check(config, ctx, c)) return exit_check_failed;
    const hinf::Parametrix engine = make_engine(config, c);
    const hinf::BipReport rep = hinf::bip_sweep(engine.quantized().matrix, config.sector(), config.bip.t,
        config.bip.n_reg, contour_options(config, engine, c.report));
    auto out = open_csv(ctx, "imaginary_powers.csv");
    rep.write_csv(out);
    for (const auto& row : rep.rows) say(ctx, "t = %5g  ||A^{it}|| = %.6g", row.t, row.norm);
    say(ctx, "growth rate %.4f (theta + 0.2 = %.4f)", rep.rate, rep.theta + 0.2);
    return exit_ok;
  }

}  // namespace hinfcalc
