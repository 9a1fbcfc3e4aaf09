#pragma once

// Prescribed past u(-s) = u0(s), s >= 0, and initial velocity, in modal
// coordinates. Every mode shares one catalog profile phi scaled by a
// per-mode coefficient: u0_k(s) = c_k phi(s), with phi(0) = 1 and |phi|
// nonincreasing, so sup_s |u0_k(s)| = |c_k|.

#include <cstddef>
#include <vector>

#include "memdecay/kernels.hpp"
#include "memdecay/operators.hpp"

namespace memdecay {

enum class HistoryFamily {
  constant,     // phi(s) = 1
  exponential,  // phi(s) = exp(-decay s)
  bump,         // phi(s) = max(0, 1 - s/decay)
};

const char* to_string(HistoryFamily family) noexcept;

class HistoryData {
 public:
  /// `decay` is the rate for the exponential family and the support width
  /// for the bump; ignored for constants.
  HistoryData(HistoryFamily family, std::vector<double> coefficients,
              std::vector<double> velocities, double decay = 1.0);

  /// All-zero constant history with zero velocities.
  static HistoryData zero(std::size_t modes);

  HistoryFamily family() const noexcept { return family_; }
  double decay() const noexcept { return decay_; }
  std::size_t modes() const noexcept { return coefficients_.size(); }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  const std::vector<double>& velocities() const noexcept { return velocities_; }

  double shape(double s) const;
  /// sup_{s >= r} |phi(s)|.
  double shape_sup_from(double r) const;
  double value(std::size_t mode, double s) const { return coefficients_[mode] * shape(s); }
  double initial_displacement(std::size_t mode) const { return coefficients_[mode]; }
  double initial_velocity(std::size_t mode) const { return velocities_[mode]; }
  /// max_k sup_s |u0_k(s)|.
  double sup_abs() const noexcept;

 private:
  HistoryFamily family_;
  std::vector<double> coefficients_;
  std::vector<double> velocities_;
  double decay_;
};

/// sqrt(sum_k b_k c_k^2): bound on ||B^{1/2} u0(s)||.
double m0_case1(const HistoryData& history, const ModalOperatorPair& pair);
/// sqrt(sum_k a_k b_k c_k^2): bound on ||A^{1/2} B^{1/2} u0(s)||.
double m0_case2(const HistoryData& history, const ModalOperatorPair& pair);

/// 1e-10 (1 + sup |u0|).
double default_tail_tolerance(const HistoryData& history);

/// int_t^inf w(s) phi(s - t)^m ds for w in {g, g'} and m in {1, 2}. These are
/// per unit coefficient; the memory integrals over the prescribed past are
/// assembled from them mode by mode.
struct HistoryMoments {
  double g_phi = 0.0;
  double g_phi2 = 0.0;
  double dg_phi = 0.0;
  double dg_phi2 = 0.0;
};

/// Moments at time t. The integration range [t, t + S] is cut where
/// sup|u0| * sup_{r>=S}|phi(r)| * max(G(t+S), g(t+S)) <= tolerance.
HistoryMoments history_moments(const HistoryData& history, const Kernel& kernel, double t,
                               double tolerance);

/// Only the g_phi moment; the simulator needs nothing else per step.
double history_shape_tail(const HistoryData& history, const Kernel& kernel, double t,
                          double tolerance);

/// int_t^inf g(s) u0_k(s - t) ds, the part of the memory term where u is
/// prescribed data. A non-positive tolerance selects the default.
double history_tail_integral(const HistoryData& history, const Kernel& kernel, double t,
                             std::size_t mode, double tolerance = 0.0);

}  // namespace memdecay
