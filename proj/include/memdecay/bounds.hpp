#pragma once

// Decay-bound evaluators, the comparison-lemma verifier and envelope fits.
// Every bound is evaluated with its multiplicative constant set to 1; the
// constant is measured afterwards as C* = sup E / bound over a window.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memdecay/energy.hpp"
#include "memdecay/kernels.hpp"
#include "memdecay/numerics.hpp"

namespace memdecay {

enum class BoundFamily {
  lemma1,
  thm_case1_first,
  thm_case1_improved,
  thm_case2_first,
  thm_case2_improved,
  example_case1,
  example_case2,
  prior_case1,
  prior_case2,
};

const char* to_string(BoundFamily family) noexcept;
/// Throws config for unknown names.
BoundFamily parse_bound_family(const std::string& name);

using TailFunction = std::function<double(double)>;

/// (1+t)^{-1/alpha} xi^{-(alpha+1)/alpha}(t)
///   * [1 + int_0^t (1+s)^{1/alpha} xi^{(alpha+1)/alpha}(s) h^{alpha+1}(s) ds]
/// on `grid` (grid[0] == 0, increasing); the inner integral is a running
/// trapezoid sum over the grid.
std::vector<double> lemma1_bound(double alpha, const XiWeight& xi, const TailFunction& h,
                                 std::span<const double> grid);

/// Single-point version; the inner integral uses adaptive quadrature.
double lemma1_bound(double alpha, const XiWeight& xi, const TailFunction& h, double t);

/// First case-1 bound: the lemma-1 form with alpha = 2p - 2. p = 1 throws
/// family_undefined.
std::vector<double> thm_case1_first(double p, const XiWeight& xi, const TailFunction& h,
                                    std::span<const double> grid);

/// Improved case-1 bound: the lemma-1 form with alpha = p - 1.
std::vector<double> thm_case1_improved(double p, const XiWeight& xi, const TailFunction& h,
                                       std::span<const double> grid);

enum class Case2Variant { first, improved };

/// ((E2(0) + E(0)^m + int_0^t h^m) / int_0^t xi^m)^{1/m} with m = 2p - 1
/// (first) or m = p (improved). Entries with grid[n] < t_min are NaN.
std::vector<double> thm_case2(double p, const XiWeight& xi, const TailFunction& h, double e0,
                              double e2_0, std::span<const double> grid, Case2Variant variant,
                              double t_min = 1.0);

/// Single-point case-2 quotient; throws domain for t < t_min.
double thm_case2(double p, const XiWeight& xi, const TailFunction& h, double e0, double e2_0,
                 double t, Case2Variant variant, double t_min = 1.0);

struct IntegrabilityCheck {
  bool integrable = false;
  /// Trapezoid integral of the bound over [t_start, horizon].
  double value = 0.0;
  /// Ratios of integral increments over the last three doublings of 1 + t.
  std::vector<double> increment_ratios;
};

/// Whether the first case-1 bound is integrable on [0, inf): required
/// before the improved case-1 bound may be used.
IntegrabilityCheck case1_integrability(double p, const XiWeight& xi, const TailFunction& h,
                                       double horizon = 1e8);

/// Whether the first case-2 quotient is integrable on [t_min, inf).
IntegrabilityCheck case2_integrability(double p, const XiWeight& xi, const TailFunction& h,
                                       double e0, double e2_0, double horizon = 1e8,
                                       double t_min = 1.0);

/// Decay exponents for the polynomial kernel a(1+t)^{-q}, q > 2.
struct PriorWorkBounds {
  double q = 0.0;
  /// Supremum of admissible exponents of the earlier convex-function
  /// approach: case 1 any exponent below (q-1)/2, case 2 below (q-1)/(q+1).
  double prior_case1_sup = 0.0;
  double prior_case2_sup = 0.0;
  /// Exponents delivered by the improved bounds: (q^2-q-1)/q and q/(q+1).
  double new_case1 = 0.0;
  double new_case2 = 0.0;
  bool case1_improves = false;
  bool case2_improves = false;
  /// (q^2-q-1)/2, the value appearing in the original comparison sentence;
  /// it disagrees with new_case1 whenever q != 2.
  double comparison_sentence_value = 0.0;
};

PriorWorkBounds prior_work_bounds(double q);

/// Inputs for building any bound family on a grid.
struct BoundParams {
  double p = 1.0;
  XiWeight xi = XiWeight::constant(1.0);
  TailFunction h = [](double) { return 0.0; };
  double e0 = 0.0;
  double e2_0 = 0.0;
  /// Polynomial kernel exponent for the example and prior families.
  double q = 0.0;
  /// Exponent alpha of the lemma-1 family.
  double alpha = 1.0;
  double t_min = 1.0;
  double integrability_horizon = 1e8;
};

class DecayBound {
 public:
  BoundFamily family;
  std::vector<double> grid;
  std::vector<double> values;
  /// Smallest t where the bound is defined.
  double t_min = 0.0;
  /// Closed-form asymptotic exponent where one exists (example/prior).
  std::optional<double> nominal_exponent;
  /// Integrability precondition of an improved bound, when it has one.
  std::optional<IntegrabilityCheck> precondition;

  /// Throws domain when grid[n] < t_min.
  double value(std::size_t n) const;
  std::size_t first_index() const;
  /// Nonincreasing on [t_min, end] up to relative slack `rel_tol`.
  bool nonincreasing(double rel_tol = 1e-12) const;
};

/// Builds a bound on `grid` (grid[0] == 0). The improved case-1 bound throws
/// improved_bound_unavailable when the first bound is not integrable; the
/// improved case-2 bound records its precondition without throwing.
DecayBound make_bound(BoundFamily family, const BoundParams& params,
                      std::span<const double> grid);

struct FitWindow {
  /// Envelope window [t_lo, t_hi]; t_hi <= 0 means the end of the trace.
  double t_lo = 0.0;
  double t_hi = 0.0;
  /// Slope window; slope_hi <= 0 selects the final 25% of log(1 + t).
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  /// Number of nested horizons t_hi, t_hi/2, ... in the C* series.
  std::size_t levels = 3;
};

struct FitReport {
  /// max over the window of E / bound.
  double c_star = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  /// Horizons in increasing order and C* on [t_lo, horizon].
  std::vector<double> horizons;
  std::vector<double> c_star_series;
  /// (C*(T) - C*(T/2)) / C*(T).
  double drift = 0.0;
  /// (C*(T) - C*(T/4)) / C*(T), when the series is long enough.
  double drift_two_doublings = 0.0;
  /// Least-squares slope of log E against log(1 + t) on the slope window.
  double slope = 0.0;
  double slope_residual = 0.0;
  double slope_lo = 0.0;
  double slope_hi = 0.0;
};

/// Fits C* of `bound` against samples (t, e). Throws fit_domain if any
/// sample in the window has e <= 0 or bound <= 0.
FitReport fit_envelope(std::span<const double> t, std::span<const double> e,
                       std::span<const double> bound, const FitWindow& window);

FitReport fit_envelope(const EnergyTrace& trace, const DecayBound& bound, const FitWindow& window);

/// Least-squares log-log slope of positive samples y(t) on [lo, hi].
LineFit loglog_slope(std::span<const double> t, std::span<const double> y, double lo, double hi);

struct Lemma1Report {
  FitReport fit;
  /// C* changed by at most 5% over the last two horizon doublings.
  bool stable = false;
  /// phi = xi^{(alpha+1)/alpha} F satisfied its own differential
  /// inequality (within discretization slack) at every step.
  bool phi_inequality_holds = false;
  double phi_worst_margin = 0.0;
  std::vector<double> t;
  std::vector<double> f;
  std::vector<double> bound;
};

/// Integrates F' = -c1 xi^{alpha+1} F^{alpha+1} + c2 h^{alpha+1}, F(0) = f0,
/// with the two-stage Gauss-Legendre method (order 4, A-stable) on steps of
/// relative size `step_fraction`, and measures C* against lemma1_bound.
Lemma1Report lemma1_verify(double alpha, const XiWeight& xi, const TailFunction& h, double c1,
                           double c2, double f0, double horizon, double step_fraction = 1e-3);

}  // namespace memdecay
