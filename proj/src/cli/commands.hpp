#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pppks::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

struct CommonOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  bool no_plots = false;
};

/// One observation per line; blank lines and '#' comments are skipped.
/// Throws DataError naming the line.
std::vector<double> read_observations(const std::filesystem::path& path);

/// --workers, else PPPKS_WORKERS, else 1. Throws ConfigError.
unsigned resolve_workers(std::optional<unsigned> flag);

int cmd_ppp(const CommonOptions& opt, const std::optional<std::filesystem::path>& data_path);
int cmd_calibration(const CommonOptions& opt);
int cmd_power(const CommonOptions& opt);
int cmd_selftest(const std::optional<std::filesystem::path>& out, double tolerance_scale);

/// Entry point of the pppks tool; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace pppks::cli
