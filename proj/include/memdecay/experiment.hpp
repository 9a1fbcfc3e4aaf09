#pragma once

// The check, run, oracle-compare and init subcommands.

#include <iosfwd>
#include <string>
#include <vector>

#include "memdecay/config.hpp"
#include "memdecay/error.hpp"
#include "memdecay/kernels.hpp"
#include "memdecay/operators.hpp"

namespace memdecay {

/// Process exit codes; stable across releases.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  config = 2,
  hypothesis = 3,
  cfl = 4,
  instability = 5,
  fit_domain = 6,
  improved_bound_unavailable = 7,
  verification_failed = 8,
};

ExitCode exit_code_for(ErrorKind kind) noexcept;

struct CheckResult {
  HypothesisReport hypotheses;
  CoercivityConstants coercivity{};
  CaseConstants cases{};
  double cfl_number = 0.0;
  bool cfl_ok = false;
  double e2_0 = 0.0;
  /// One line per failed cross-field check.
  std::vector<std::string> problems;
  ExitCode code = ExitCode::ok;
};

/// Mass condition, kernel inequality, CFL, admissible p and the case conditions of the
/// requested bounds. Writes a summary to `log`.
CheckResult cmd_check(const Experiment& experiment, std::ostream& log);

struct VerificationRow {
  std::string family;
  double exponent = 0.0;
  double c_star = 0.0;
  double drift = 0.0;
  double slope = 0.0;
  double slope_residual = 0.0;
  bool pass = false;
  std::string note;
};

struct RunResult {
  CheckResult check;
  double e0 = 0.0;
  double e2_0 = 0.0;
  std::vector<VerificationRow> rows;
  ExitCode code = ExitCode::ok;
};

/// Writes trajectory.csv, energy.csv, verification.csv and report.txt into
/// `out_dir`. Errors propagate as memdecay::Error.
RunResult cmd_run(const Experiment& experiment, const std::string& out_dir, std::ostream& log);

struct ConvergenceRow {
  double dt = 0.0;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  /// Error at the previous (coarser) step over this one; 0 on the first row.
  double ratio = 0.0;
};

struct OracleResult {
  std::vector<ConvergenceRow> rows;
  ExitCode code = ExitCode::ok;
};

/// Compares the solver with the augmented-ODE oracle at dt, dt/2 and dt/4;
/// writes comparison.csv (at dt) and convergence.csv. Ratios outside
/// [3.3, 4.7] give verification_failed.
OracleResult cmd_oracle_compare(const Experiment& experiment, const std::string& out_dir,
                                std::ostream& log);

/// Writes the annotated configuration of a preset to `path`.
void cmd_init(const std::string& preset, const std::string& path);

}  // namespace memdecay
