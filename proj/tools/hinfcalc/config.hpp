#pragma once

#include "hinf/funcalc.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hinfcalc
{
  //! Unreadable file or schema violation; maps to exit code 1.
  class ConfigError : public std::runtime_error
  {
   public:
    using std::runtime_error::runtime_error;
  };

  struct FunctionSpec
  {
    std::string type;  // s_power | imaginary_power | resolvent_probe
    double s = 1.0;
    double t = 0.0;
    double n = 1e3;
    hinf::Complex mu = -10.0;
    double factor = 1.0;
  };

  struct RunConfig
  {
    // symbol
    std::string preset;
    std::string expression;
    int n = 1;
    int k = 1;
    hinf::SymbolClassParams cls{2.0, 1.0, 0.0};
    double shift = 0.0;

    double theta = hinf::pi / 2;
    int P = 128;
    int N = 3;
    double C = 0.0;

    struct
    {
      double c = 0.5;
      double C = 0.0;
      int max_order = 2;
      int per_decade = 8;
    } hypo;

    struct
    {
      double tol = 1e-8;
      double c0 = 1.5;
      int nodes_per_panel = 8;
    } contour;

    std::vector<FunctionSpec> family;
    int seminorm_margin = -1;  // -1: min(16, P / 8)

    struct
    {
      double lo = 10.0;
      double hi = 1e4;
      int count = 20;
      int margin = -1;  // -1: min(16, P / 8)
      bool left = true;
    } sweep;

    struct
    {
      std::vector<double> t{-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5};
      double n_reg = 1e6;
    } bip;

    std::string output;

    /// Symbol with the shift applied.
    hinf::PresetSymbol symbol() const;
    hinf::TorusGrid grid() const { return hinf::TorusGrid(n, P); }
    hinf::Sector sector() const { return hinf::Sector(theta); }
    std::vector<hinf::HFun> functions() const;
  };

  /// Parse and validate; throws ConfigError.
  RunConfig load_config(const std::filesystem::path& path);
  RunConfig parse_config(const std::string& text);

}  // namespace hinfcalc
