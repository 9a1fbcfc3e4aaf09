#pragma once

// Experiment configuration: an INI file with [kernel], [xi], [operators],
// [history], [simulation], [bounds] and [output] sections.

#include <cstddef>
#include <string>
#include <vector>

#include "memdecay/history.hpp"
#include "memdecay/kernels.hpp"
#include "memdecay/operators.hpp"
#include "memdecay/simulator.hpp"

namespace memdecay {

struct KernelSection {
  std::string family = "polynomial";  // polynomial | exponential | tabulated
  double amplitude = 1.0;
  double exponent = 3.0;
  double rate = 1.0;
  std::string table;  // "s,g" CSV for tabulated kernels

  bool operator==(const KernelSection&) const = default;
};

struct XiSection {
  std::string mode = "auto";  // auto | constant | tabulated
  double value = 1.0;
  double p = 1.0;
  std::string table;  // "t,xi" CSV

  bool operator==(const XiSection&) const = default;
};

struct OperatorSection {
  std::string generator = "laplacian_1d";  // laplacian_1d | explicit
  std::size_t modes = 16;
  double length = 1.0;
  std::string b = "same";  // same | identity
  std::vector<double> a_values;
  std::vector<double> b_values;

  bool operator==(const OperatorSection&) const = default;
};

struct HistorySection {
  std::string family = "exponential";  // constant | exponential | bump
  /// Per-mode coefficients; when empty, c_k = scale * k^power (k from 1).
  std::vector<double> coefficients;
  double scale = 1.0;
  double power = -3.0;
  /// Per-mode initial velocities; empty means zero.
  std::vector<double> velocities;
  double decay = 1.0;

  bool operator==(const HistorySection&) const = default;
};

struct SimulationSection {
  double dt = 0.01;
  double horizon = 200.0;
  double tail_tolerance = 0.0;

  bool operator==(const SimulationSection&) const = default;
};

struct BoundsSection {
  std::vector<std::string> families;
  /// Envelope window start and end; fit_end <= 0 means the horizon.
  double fit_start = 0.0;
  double fit_end = 0.0;
  /// Slope window; slope_end <= 0 selects the final 25% of log(1 + t).
  double slope_start = 0.0;
  double slope_end = 0.0;
  double t_min = 1.0;
  /// Exponent of the lemma1 family.
  double alpha = 1.0;
  double big_m = 10.0;
  double alpha0 = 1.0;

  bool operator==(const BoundsSection&) const = default;
};

struct ExperimentConfig {
  std::string name = "custom";
  KernelSection kernel;
  XiSection xi;
  OperatorSection operators;
  HistorySection history;
  SimulationSection simulation;
  BoundsSection bounds;
  std::string output_directory = "out";
  /// Directory that relative table paths are resolved against.
  std::string base_directory = ".";

  bool operator==(const ExperimentConfig& other) const;
};

/// Throws config on syntax errors, unknown sections or keys, and bad values.
ExperimentConfig parse_config(const std::string& text, const std::string& base_directory = ".");
ExperimentConfig load_config(const std::string& path);

/// INI text; parse_config(serialize_config(c)) == c. With `annotate`, every
/// key is preceded by a comment describing it and its default.
std::string serialize_config(const ExperimentConfig& config, bool annotate = false);

/// "paper-example-q3", "zero-history" or "exponential-oracle".
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Objects built from a configuration.
struct Experiment {
  ExperimentConfig config;
  Kernel kernel;
  XiCertificate certificate;
  ModalOperatorPair pair;
  HistoryData history;
  SimConfig sim;
};

/// Builds the kernel, xi, operator pair and history. Throws config (or the
/// underlying parameter error) on inconsistent settings; hypotheses and CFL
/// are checked separately.
Experiment build_experiment(const ExperimentConfig& config, unsigned workers = 1);

}  // namespace memdecay
