#pragma once

#include "config.hpp"

#include <filesystem>
#include <ostream>

namespace hinfcalc
{
  enum ExitCode
  {
    exit_ok = 0,
    exit_usage = 1,
    exit_check_failed = 2,
    exit_numerical = 3
  };

  struct CommandContext
  {
    std::filesystem::path out = ".";
    bool verbose = false;
    std::ostream* log = nullptr;  // progress and summaries; null when quiet
  };

  /// hypo_report.csv; exit_check_failed on spectral violations.
  int cmd_check(const RunConfig& config, const CommandContext& ctx);
  /// parametrix_sweep.csv
  int cmd_parametrix(const RunConfig& config, const CommandContext& ctx);
  /// fcalc_report.csv
  int cmd_calc(const RunConfig& config, const CommandContext& ctx);
  /// imaginary_powers.csv
  int cmd_bip(const RunConfig& config, const CommandContext& ctx);

}  // namespace hinfcalc
