#include <gtest/gtest.h>

#include "commands.hpp"
#include "config.hpp"

#include <fstream>
#include <sstream>

namespace
{
  using hinfcalc::ConfigError;
  using hinfcalc::parse_config;

  std::string read_file(const std::filesystem::path& p)
  {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::filesystem::path scratch(const char* name)
  {
    auto p = std::filesystem::temp_directory_path() / "hinfcalc_unit" / name;
    std::filesystem::remove_all(p);
    return p;
  }
}  // namespace

TEST(CliConfig, DefaultsFillTheDefaultScene)
{
  const auto c = parse_config(R"({"symbol": {"preset": "variable_laplace"}, "shift": 5})");
  EXPECT_EQ(c.P, 128);
  EXPECT_EQ(c.N, 3);
  EXPECT_DOUBLE_EQ(c.theta, hinf::pi / 2);
  EXPECT_EQ(c.family.size(), 4u);
  EXPECT_EQ(c.sweep.margin, 16);
  const auto sym = c.symbol();
  const double x[1] = {hinf::pi / 2}, xi[1] = {1.0};
  EXPECT_NEAR(std::abs(sym.symbol.evaluate(x, xi) - hinf::Complex(11.0)), 0.0, 1e-14);
}

TEST(CliConfig, SchemaViolationsAreRejected)
{
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"grid": {"P": 128}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace"}, "gird": {}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace"}, "grid": {"P": 96}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace"}, "grid": {"P": 128, "Xi": 64}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace"}, "parametrix": {"N": 0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace"}, "sector": {"theta": 4}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"expression": "1", "class": {"m": 0, "rho": 0.5, "delta": 0.5}}})"),
      ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace", "expression": "1"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace"}, "family": [{"type": "cosh"}]})"),
      ConfigError);
}

TEST(CliConfig, DenseSizeIsCapped)
{
  EXPECT_NO_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace"}, "grid": {"P": 512}})"));
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "variable_laplace"}, "grid": {"P": 1024}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "jordan2", "k": 2}, "grid": {"P": 512}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"symbol": {"preset": "bracket_power 2", "n": 2}, "grid": {"P": 32}})"), ConfigError);
}

TEST(CliConfig, FamilyMembers)
{
  const auto c = parse_config(R"({"symbol": {"preset": "variable_laplace"}, "family": [
      {"type": "s_power", "s": 0.5, "factor": 2},
      {"type": "imaginary_power", "t": -1, "n": 100},
      {"type": "resolvent_probe", "mu": [-10, 0]}]})");
  const auto f = c.functions();
  ASSERT_EQ(f.size(), 3u);
  const hinf::HFun base = hinf::s_power(0.5, c.sector());
  EXPECT_NEAR(std::abs(f[0](2.0) - 2.0 * base(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f[1](1.0) - hinf::regularizer(1.0, 100.0)), 0.0, 1e-15);
}

TEST(CliCommands, CheckExitCodes)
{
  hinfcalc::CommandContext ctx;
  ctx.out = scratch("check");
  const auto good = parse_config(
      R"({"symbol": {"preset": "variable_laplace"}, "sector": {"theta_over_pi": 0.25}, "grid": {"P": 32}})");
  EXPECT_EQ(hinfcalc::cmd_check(good, ctx), hinfcalc::exit_ok);
  EXPECT_NE(read_file(ctx.out / "hypo_report.csv").find("pass,,,,,,,1"), std::string::npos);
  const auto bad = parse_config(R"({"symbol": {"preset": "-bracket_power 2"}, "grid": {"P": 32}})");
  EXPECT_EQ(hinfcalc::cmd_check(bad, ctx), hinfcalc::exit_check_failed);
  EXPECT_EQ(hinfcalc::cmd_parametrix(bad, ctx), hinfcalc::exit_check_failed);
}

TEST(CliCommands, EmptyFamilyIsAConfigError)
{
  const auto c = parse_config(R"({"symbol": {"preset": "variable_laplace"}, "grid": {"P": 16}, "family": []})");
  hinfcalc::CommandContext ctx;
  ctx.out = scratch("empty");
  EXPECT_THROW(hinfcalc::cmd_calc(c, ctx), ConfigError);
}

TEST(CliCommands, XIndependentSweepHasVanishingRemainders)
{
  const auto c = parse_config(R"({"symbol": {"expression": "bracket(xi)^2+1"}, "grid": {"P": 32},
      "sweep": {"lo": 10, "hi": 1000, "count": 4}})");
  hinfcalc::CommandContext ctx;
  ctx.out = scratch("flat");
  ASSERT_EQ(hinfcalc::cmd_parametrix(c, ctx), hinfcalc::exit_ok);
  std::istringstream csv(read_file(ctx.out / "parametrix_sweep.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line))
  {
    if (line.rfind("row,", 0) != 0) continue;
    ++rows;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    EXPECT_LT(std::stod(fields[5]), 1e-12) << line;  // rN_norm
  }
  EXPECT_EQ(rows, 4);
}
