#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
  using namespace hinfcalc;

  CLI::App app{"hinfcalc: H-infinity calculus of sectorial pseudodifferential symbols on the torus"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = hinf::default_norm_seed;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides the config's 'output')");
  app.add_option("--seed", seed, "seed of the power-iteration start vector")->capture_default_str();
  app.add_flag("-v,--verbose", verbose, "print progress and summaries to stderr");

  auto* check = app.add_subcommand("check", "spectral hypoellipticity check and constants -> hypo_report.csv");
  auto* parametrix = app.add_subcommand("parametrix", "lambda sweep of b^N, r^N, s^N -> parametrix_sweep.csv");
  auto* calc = app.add_subcommand("calc", "f(a) vs f(A) for the function family -> fcalc_report.csv");
  auto* bip = app.add_subcommand("bip", "norms of regularized imaginary powers -> imaginary_powers.csv");
  for (auto* sub : {check, parametrix, calc, bip}) sub->fallthrough();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try
  {
    const RunConfig config = load_config(config_path);
    CommandContext ctx;
    ctx.out = !out_dir.empty() ? out_dir : (!config.output.empty() ? config.output : ".");
    ctx.verbose = verbose;
    ctx.log = verbose ? &std::cerr : nullptr;
    hinf::set_norm_seed(seed);

    int code = exit_ok;
    if (check->parsed()) code = cmd_check(config, ctx);
    else if (parametrix->parsed()) code = cmd_parametrix(config, ctx);
    else if (calc->parsed()) code = cmd_calc(config, ctx);
    else if (bip->parsed()) code = cmd_bip(config, ctx);
    if (code == exit_check_failed) std::cerr << "hinfcalc: hypoellipticity check failed\n";
    return code;
  }
  catch (const ConfigError& e)
  {
    std::cerr << "hinfcalc: " << e.what() << '\n';
    return exit_usage;
  }
  catch (const hinf::ParseError& e)
  {
    std::cerr << "hinfcalc: " << e.what() << '\n';
    return exit_usage;
  }
  catch (const hinf::DomainError& e)
  {
    std::cerr << "hinfcalc: " << e.what() << '\n';
    return exit_usage;
  }
  catch (const hinf::NumericalError& e)
  {
    std::cerr << "hinfcalc: numerical failure: " << e.what() << " (a larger shift may help)\n";
    return exit_numerical;
  }
  catch (const std::exception& e)
  {
    std::cerr << "hinfcalc: " << e.what() << '\n';
    return exit_numerical;
  }
}
