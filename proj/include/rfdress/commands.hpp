#pragma once

#include "rfdress/config.hpp"

#include <filesystem>
#include <stdexcept>

namespace rfdress {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised after outputs are written when a result is incomplete.
class IncompleteResultError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNonConvergence = 3, kExitIo = 4 };

/// Maps an in-flight exception to an exit code. Call from inside a catch block.
int exit_code_for_current_exception(std::string& message);

// Each command writes resolved_config.ini plus its own products into `out`.
void run_potential(const RunConfig& cfg, const std::filesystem::path& out);
void run_analyze(const RunConfig& cfg, const std::filesystem::path& out);
void run_sweep(const RunConfig& cfg, const std::filesystem::path& out);
void run_image(const RunConfig& cfg, const std::filesystem::path& out);

/// Mean distance from the z-axis of the per-azimuth lowest nodes of a z = const
/// grid slice, binned in `n_bins` azimuthal sectors. NaN when no bin is filled.
double min_locus_radius(const ScalarGrid& grid, int n_bins = 64);

}  // namespace rfdress
