#pragma once

// Energy functionals along a modal trajectory. The relative history
// eta^t(s) = u(t) - u(t-s) is reconstructed from the stored samples for
// s <= t and from the analytic past for s > t.

#include <cstddef>
#include <string>
#include <vector>

#include "memdecay/history.hpp"
#include "memdecay/kernels.hpp"
#include "memdecay/operators.hpp"
#include "memdecay/simulator.hpp"

namespace memdecay {

struct FunctionalValues {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
};

struct EnergyOptions {
  /// Constants of the perturbed functional I3 = (M + alpha0) E + I1 + (g0/2) I2.
  double big_m = 10.0;
  double alpha0 = 1.0;
  /// Non-positive selects default_tail_tolerance(history).
  double tail_tolerance = 0.0;
  unsigned workers = 1;
};

struct EnergyTrace {
  std::vector<double> t;
  std::vector<double> e;
  std::vector<double> e2;
  /// E'(t) from the dissipation identity, not a difference quotient.
  std::vector<double> e_prime;
  std::vector<double> i1;
  std::vector<double> i2;
  std::vector<double> i3;
  /// ((1 - a0 g0)/2)(||A^{1/2}u||^2 + ||u'||^2 + int g ||B^{1/2} eta||^2).
  std::vector<double> floor;
  double big_m = 10.0;
  double alpha0 = 1.0;

  std::size_t size() const noexcept { return t.size(); }
};

double energy(const ModalTrajectory& traj, const ModalOperatorPair& pair, const Kernel& kernel,
              const HistoryData& history, std::size_t n);

/// (1/2) sum_k b_k int_0^inf g'(s) eta_k(s)^2 ds.
double energy_rate_identity(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                            const Kernel& kernel, const HistoryData& history, std::size_t n);

double energy2(const ModalTrajectory& traj, const ModalOperatorPair& pair, const Kernel& kernel,
               const HistoryData& history, std::size_t n);

double coercivity_floor(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                        const Kernel& kernel, const HistoryData& history, std::size_t n);

FunctionalValues functionals(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                             const Kernel& kernel, const HistoryData& history, std::size_t n,
                             double big_m = 10.0, double alpha0 = 1.0);

/// Every quantity at every sample; O(N^2) per mode.
EnergyTrace energy_trace(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                         const Kernel& kernel, const HistoryData& history,
                         const EnergyOptions& options = {});

/// CSV "t,E,E2,Eprime,I1,I2,I3".
void write_energy_csv(const EnergyTrace& trace, const std::string& path);

}  // namespace memdecay
