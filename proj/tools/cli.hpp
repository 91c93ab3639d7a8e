#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace tsroa::cli {

enum class Command { kAnalyze, kSweep, kVerify, kExport };

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitViolations = 3;

/// Parsed command line. Unset overrides fall back to `option` lines in the
/// system file, then to built-in defaults.
struct RunConfig {
  Command command = Command::kAnalyze;
  std::filesystem::path input_path;
  std::filesystem::path output_dir = ".";
  std::optional<double> eps;
  std::optional<double> step;
  std::optional<double> t_max;
  std::optional<std::size_t> mc_samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> boundary_points;
  std::optional<std::size_t> verify_samples;
  std::optional<std::size_t> auto_count;
};

/// Fully resolved numeric settings, recorded in every JSON output.
struct ResolvedOptions {
  double eps = 1e-6;
  double step = 1e-3;
  double t_max = 50.0;
  std::size_t mc_samples = 1000000;
  std::uint64_t seed = 1;
  std::size_t boundary_points = 256;
  std::size_t verify_samples = 500;
};

/// Writes result.json and (when certified) boundary.csv.
int cmd_analyze(const RunConfig& config);
/// Writes sweep.json and union_boundary.csv.
int cmd_sweep(const RunConfig& config);
/// Reads result.json or sweep.json; writes verify.json.
int cmd_verify(const RunConfig& config);
/// Reads result.json or sweep.json; writes boundary.csv.
int cmd_export(const RunConfig& config);

int run(const RunConfig& config);

/// Entry point shared by the executable and tests. Returns the exit code.
int main_with_args(int argc, const char* const* argv);

/// FNV-1a 64-bit digest rendered as "fnv1a64:<16 hex digits>".
std::string content_hash(const std::string& bytes);

}  // namespace tsroa::cli
