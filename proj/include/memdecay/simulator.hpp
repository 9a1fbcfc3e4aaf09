#pragma once

// Per-mode integration of u_k'' + a_k u_k - b_k int_0^inf g(s) u_k(t-s) ds = 0
// on a uniform grid. The memory integral is split at s = t: the stored part
// uses the composite trapezoid rule on the time grid, the prescribed-past
// part is integrated from the analytic history.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "memdecay/history.hpp"
#include "memdecay/kernels.hpp"
#include "memdecay/operators.hpp"

namespace memdecay {

struct SimConfig {
  static constexpr double cfl_limit = 1.9;

  Kernel kernel;
  ModalOperatorPair pair;
  HistoryData history;
  double dt = 1e-3;
  double horizon = 1.0;
  /// Non-positive selects default_tail_tolerance(history).
  double tail_tolerance = 0.0;
  /// Threads used to integrate modes concurrently.
  unsigned workers = 1;

  /// Number of steps N = horizon / dt; throws config unless integral.
  std::size_t steps() const;
  double effective_tail_tolerance() const;
  /// Mode counts agree, dt > 0, N integral and dt sqrt(max a) <= cfl_limit.
  void validate() const;
};

/// Displacement and velocity samples u_k(t_n), v_k(t_n), n = 0..N, plus the
/// prescribed past used for t < 0.
class ModalTrajectory {
 public:
  ModalTrajectory(double dt, std::size_t steps, HistoryData history);

  double dt() const noexcept { return dt_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t samples() const noexcept { return steps_ + 1; }
  std::size_t modes() const noexcept { return history_.modes(); }
  double time(std::size_t n) const noexcept { return static_cast<double>(n) * dt_; }
  const HistoryData& history() const noexcept { return history_; }

  double u(std::size_t mode, std::size_t n) const { return u_[mode * samples() + n]; }
  double v(std::size_t mode, std::size_t n) const { return v_[mode * samples() + n]; }
  std::span<const double> displacement(std::size_t mode) const {
    return {u_.data() + mode * samples(), samples()};
  }
  std::span<const double> velocity(std::size_t mode) const {
    return {v_.data() + mode * samples(), samples()};
  }
  std::span<double> displacement(std::size_t mode) {
    return {u_.data() + mode * samples(), samples()};
  }
  std::span<double> velocity(std::size_t mode) {
    return {v_.data() + mode * samples(), samples()};
  }

  /// u_k(t) for any t <= T: the history for t < 0, linear interpolation
  /// between grid samples otherwise.
  double displacement_at(std::size_t mode, double t) const;

  bool operator==(const ModalTrajectory& other) const;

 private:
  double dt_;
  std::size_t steps_;
  HistoryData history_;
  std::vector<double> u_;
  std::vector<double> v_;
};

/// int_0^inf g(s) u_k(t_n - s) ds: trapezoid over stored samples plus the
/// exact history part.
double memory_convolution(const ModalTrajectory& traj, const Kernel& kernel,
                          const HistoryData& history, std::size_t mode, std::size_t n,
                          double tail_tolerance = 0.0);

/// Advances every mode from step n to n + 1 (n >= 1) in place. Velocities
/// are not touched; simulate() fills them once the displacements are known.
void step(ModalTrajectory& traj, const SimConfig& config, std::size_t n);

/// Full run over [0, horizon]. Throws InstabilityError naming the first
/// step that produced a non-finite sample.
ModalTrajectory simulate(const SimConfig& config);

/// Reference solution for g = a e^{-lambda s}: w(t) = int_0^inf g(s) u(t-s) ds
/// obeys w' = a u - lambda w, which closes (u, u', w) into an ODE integrated
/// with classical RK4 at dt / substeps.
ModalTrajectory exponential_oracle(const SimConfig& config, unsigned substeps = 10);

/// CSV "t,mode,u,v", one row per (t_n, k) with modes numbered from 1.
void write_trajectory_csv(const ModalTrajectory& traj, const std::string& path);

}  // namespace memdecay
