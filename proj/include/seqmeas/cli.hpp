// Command-line surface: sweep tables and their CSV / JSON encodings.
#ifndef SEQMEAS_CLI_HPP
#define SEQMEAS_CLI_HPP

#include "seqmeas/measurement.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace seqmeas::cli {

enum class Format { csv, json };

enum ExitCode : int {
  kSuccess = 0,
  kInvalidConfig = 1,
  kIoFailure = 2,
  kNonConvergence = 3,
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  std::string command;
  int psi_steps = 51;
  int k_bar_steps = 101;
  int n = 2;
  std::string strategy = "all";
  double werner_p = 1.0;
  std::optional<double> pbs_th;
  std::optional<double> pbs_rv;
  std::uint64_t shots = 0;  // 0 = analytic
  std::uint64_t seed = 42;
  std::string output_path;  // empty or "-" = stdout
  Format format = Format::csv;

  /// Throws ConfigError.
  void validate() const;
  std::optional<PbsImperfection> pbs() const;
};

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool flagged = false;  // some row failed to converge
};

Table sweep_single(const SweepConfig& config);
Table sweep_strategies(const SweepConfig& config);
Table adaptive_angles(const SweepConfig& config);
Table accumulation(const SweepConfig& config);
Table montecarlo(const SweepConfig& config);

/// Dispatches on config.command.
Table run_command(const SweepConfig& config);

/// Header row, 12 significant digits, LF line endings.
std::string to_csv(const Table& table);
/// {"config": {...}, "rows": [{column: value, ...}, ...]}
std::string to_json(const Table& table, const SweepConfig& config);

/// Writes to config.output_path (stdout when empty or "-"). Throws IoError.
void write_output(const Table& table, const SweepConfig& config);

/// Full CLI entry point; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace seqmeas::cli

#endif  // SEQMEAS_CLI_HPP
