#pragma once

// Relaxation kernels g, the weight xi of the kernel inequality
// g'(t) <= -xi(t) g(t)^p, and the kernel-derived quantities used by the
// decay bounds.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace memdecay {

enum class KernelFamily { polynomial, exponential, tabulated };

const char* to_string(KernelFamily family) noexcept;

/// A positive nonincreasing relaxation function with its derivative and
/// tail integral G(t) = int_t^inf g(s) ds. Immutable; cheap to copy.
class Kernel {
 public:
  struct Polynomial {
    double amplitude;
    double exponent;
  };
  struct Exponential {
    double amplitude;
    double rate;
  };
  struct Tabulated;

  KernelFamily family() const noexcept;

  double value(double t) const;
  double derivative(double t) const;
  /// G(t). Throws tail_undefined for a tabulated kernel whose last decade
  /// does not fit a decaying power law.
  double tail(double t) const;
  /// g0 = G(0).
  double mass() const { return tail(0.0); }

  /// Nullptr unless the kernel belongs to that family.
  const Polynomial* polynomial() const noexcept { return std::get_if<Polynomial>(&rep_); }
  const Exponential* exponential() const noexcept { return std::get_if<Exponential>(&rep_); }
  /// Fitted tail model (amplitude, exponent) for tabulated kernels; the
  /// exponent is <= 1 when no decaying tail exists.
  Polynomial tabulated_tail_model() const;

  friend Kernel make_polynomial_kernel(double a, double q);
  friend Kernel make_exponential_kernel(double a, double rate);
  friend Kernel make_tabulated_kernel(std::vector<double> s, std::vector<double> g);

 private:
  using Rep = std::variant<Polynomial, Exponential, std::shared_ptr<const Tabulated>>;
  explicit Kernel(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

/// g(t) = a (1+t)^-q. Requires a > 0 and q > 1.
Kernel make_polynomial_kernel(double a, double q);

/// g(t) = a e^{-rate t}. Requires rate > 0 and a >= 0; a = 0 is the
/// memoryless kernel g = 0 used for conservation checks.
Kernel make_exponential_kernel(double a, double rate);

/// Monotone piecewise-cubic interpolant of positive nonincreasing samples,
/// continued past the last sample by a power law a(1+t)^-q fitted to the
/// last decade of samples. The first sample must be at s = 0.
Kernel make_tabulated_kernel(std::vector<double> s, std::vector<double> g);

/// Loads a "s,g" CSV and builds a tabulated kernel.
Kernel load_tabulated_kernel(const std::string& path);

/// Positive nonincreasing weight xi(t). Constant, or piecewise linear through
/// samples (held constant past the last sample).
class XiWeight {
 public:
  enum class Family { constant, tabulated };

  static XiWeight constant(double value);
  static XiWeight tabulated(std::vector<double> t, std::vector<double> xi);

  Family family() const noexcept { return family_; }
  double value(double t) const;
  /// One-sided slope of the interpolant (0 for constants and past the table).
  double derivative(double t) const;
  /// Sample abscissae for tabulated weights; empty for constants.
  std::span<const double> knots() const noexcept { return t_; }

 private:
  XiWeight() = default;
  Family family_ = Family::constant;
  double constant_ = 1.0;
  std::vector<double> t_;
  std::vector<double> xi_;
};

XiWeight load_tabulated_xi(const std::string& path);

/// The weight and exponent certifying the kernel inequality for a kernel.
struct XiCertificate {
  XiWeight xi;
  double p;
};

/// Closed-form pair for g = a(1+t)^-q: xi = q a^{-1/q}, p = (q+1)/q, which
/// makes g' = -xi g^p an identity. Requires q > 2 so that p < 3/2.
XiCertificate admissible_xi_p(const Kernel& kernel);

struct HypothesisReport {
  bool h2_pass = false;
  bool h3_pass = false;
  /// 1/a0 - g0.
  double h2_margin = 0.0;
  /// min over grid of -g'(t) - xi(t) g(t)^p.
  double h3_margin = 0.0;
  double tolerance = 0.0;
  bool xi_nonincreasing = false;
  bool p_admissible = false;
  double g0 = 0.0;
  std::vector<double> grid;
  /// Grid points where the pointwise kernel-inequality margin fell below -tolerance.
  std::vector<double> h3_failures;

  bool all_pass() const noexcept { return h2_pass && h3_pass; }
};

/// 512 log-spaced points on [0, 1e3].
std::vector<double> default_hypothesis_grid();

HypothesisReport check_hypotheses(const Kernel& kernel, const XiWeight& xi, double p,
                                  double a0, std::span<const double> grid);

/// h(t) = xi(t) G(t).
double tail_h(const Kernel& kernel, const XiWeight& xi, double t);

struct Lemma2Result {
  /// int_0^horizon xi g^{1-sigma}.
  double value = 0.0;
  /// value plus the geometric-series estimate of the remaining tail, when
  /// the doubling increments are geometric.
  double extrapolated = 0.0;
  bool converged = false;
  /// Ratios of successive doubling increments (last three doublings).
  std::vector<double> increment_ratios;
};

/// Numerical integral of xi(t) g(t)^{1-sigma} on [0, horizon]; convergence
/// is judged on the increments over the last doublings of (1 + horizon).
Lemma2Result lemma2_integral(const Kernel& kernel, const XiWeight& xi, double p,
                             double sigma, double horizon = 1e7);

}  // namespace memdecay
