#include "memdecay/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "memdecay/error.hpp"
#include "memdecay/numerics.hpp"

namespace memdecay {

namespace {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

struct Kernel::Tabulated {
  std::vector<double> s;
  std::vector<double> g;
  std::unique_ptr<Pchip> interp;
  // tail_after[i] = int_{s[i]}^{s.back()} of the interpolant.
  std::vector<double> tail_after;
  Polynomial model{0.0, 0.0};

  bool has_tail() const { return model.exponent > 1.0; }

  double model_value(double t) const {
    return model.amplitude * std::pow(1.0 + t, -model.exponent);
  }
  double model_derivative(double t) const {
    return -model.amplitude * model.exponent * std::pow(1.0 + t, -model.exponent - 1.0);
  }
  double model_tail(double t) const {
    return model.amplitude * std::pow(1.0 + t, 1.0 - model.exponent) / (model.exponent - 1.0);
  }
};

const char* to_string(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::polynomial: return "polynomial";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::tabulated: return "tabulated";
  }
  return "unknown";
}

KernelFamily Kernel::family() const noexcept {
  switch (rep_.index()) {
    case 0: return KernelFamily::polynomial;
    case 1: return KernelFamily::exponential;
    default: return KernelFamily::tabulated;
  }
}

double Kernel::value(double t) const {
  return std::visit(
      Overloaded{
          [t](const Polynomial& k) { return k.amplitude * std::pow(1.0 + t, -k.exponent); },
          [t](const Exponential& k) { return k.amplitude * std::exp(-k.rate * t); },
          [t](const std::shared_ptr<const Tabulated>& k) {
            if (t >= k->s.back()) return k->model_value(t);
            return (*k->interp)(t);
          },
      },
      rep_);
}

double Kernel::derivative(double t) const {
  return std::visit(
      Overloaded{
          [t](const Polynomial& k) {
            return -k.amplitude * k.exponent * std::pow(1.0 + t, -k.exponent - 1.0);
          },
          [t](const Exponential& k) { return -k.amplitude * k.rate * std::exp(-k.rate * t); },
          [t](const std::shared_ptr<const Tabulated>& k) {
            if (t >= k->s.back()) return k->model_derivative(t);
            return k->interp->prime(t);
          },
      },
      rep_);
}

double Kernel::tail(double t) const {
  return std::visit(
      Overloaded{
          [t](const Polynomial& k) {
            return k.amplitude * std::pow(1.0 + t, 1.0 - k.exponent) / (k.exponent - 1.0);
          },
          [t](const Exponential& k) { return k.amplitude * std::exp(-k.rate * t) / k.rate; },
          [t](const std::shared_ptr<const Tabulated>& k) {
            if (!k->has_tail()) {
              throw Error(ErrorKind::tail_undefined,
                          "tabulated kernel: last decade of samples does not decay faster "
                          "than 1/t, tail integral undefined");
            }
            if (t >= k->s.back()) return k->model_tail(t);
            const auto it = std::upper_bound(k->s.begin(), k->s.end(), t);
            const auto i = static_cast<std::size_t>(it - k->s.begin());
            const double partial = boost::math::quadrature::gauss<double, 7>::integrate(
                [&k](double x) { return (*k->interp)(x); }, t, k->s[i]);
            return partial + k->tail_after[i] + k->model_tail(k->s.back());
          },
      },
      rep_);
}

Kernel::Polynomial Kernel::tabulated_tail_model() const {
  const auto* k = std::get_if<std::shared_ptr<const Tabulated>>(&rep_);
  if (k == nullptr) throw Error(ErrorKind::parameter_domain, "kernel is not tabulated");
  return (*k)->model;
}

Kernel make_polynomial_kernel(double a, double q) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorKind::parameter_domain, "polynomial kernel needs amplitude a > 0");
  }
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw Error(ErrorKind::parameter_domain, "polynomial kernel needs exponent q > 1");
  }
  return Kernel(Kernel::Polynomial{a, q});
}

Kernel make_exponential_kernel(double a, double rate) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw Error(ErrorKind::parameter_domain, "exponential kernel needs amplitude a >= 0");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorKind::parameter_domain, "exponential kernel needs rate > 0");
  }
  return Kernel(Kernel::Exponential{a, rate});
}

Kernel make_tabulated_kernel(std::vector<double> s, std::vector<double> g) {
  if (s.size() != g.size() || s.size() < 4) {
    throw Error(ErrorKind::parameter_domain, "tabulated kernel needs at least 4 (s, g) samples");
  }
  if (s.front() != 0.0) {
    throw Error(ErrorKind::parameter_domain, "tabulated kernel must start at s = 0");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(g[i] > 0.0)) throw Error(ErrorKind::parameter_domain, "tabulated g must be positive");
    if (i > 0 && !(s[i] > s[i - 1])) {
      throw Error(ErrorKind::parameter_domain, "tabulated s must be strictly increasing");
    }
    if (i > 0 && g[i] > g[i - 1]) {
      throw Error(ErrorKind::parameter_domain, "tabulated g must be nonincreasing");
    }
  }

  auto tab = std::make_shared<Kernel::Tabulated>();
  tab->s = s;
  tab->g = g;

  // Tail model from the last decade, pinned to the last sample for continuity.
  const double s_last = s.back();
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= s_last / 10.0) {
      x.push_back(std::log1p(s[i]));
      y.push_back(std::log(g[i]));
    }
  }
  if (x.size() >= 2) {
    const double q = -fit_line(x, y).slope;
    tab->model = {g.back() * std::pow(1.0 + s_last, q), q};
  }

  tab->interp = std::make_unique<Pchip>(std::move(s), std::move(g));
  const auto& knots = tab->s;
  tab->tail_after.assign(knots.size(), 0.0);
  for (std::size_t i = knots.size() - 1; i-- > 0;) {
    const double piece = boost::math::quadrature::gauss<double, 7>::integrate(
        [&tab](double t) { return (*tab->interp)(t); }, knots[i], knots[i + 1]);
    tab->tail_after[i] = tab->tail_after[i + 1] + piece;
  }
  return Kernel(std::shared_ptr<const Kernel::Tabulated>(std::move(tab)));
}

Kernel load_tabulated_kernel(const std::string& path) {
  auto [s, g] = read_two_column_csv(path, "s,g");
  return make_tabulated_kernel(std::move(s), std::move(g));
}

XiWeight XiWeight::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::parameter_domain, "xi must be positive");
  }
  XiWeight w;
  w.family_ = Family::constant;
  w.constant_ = value;
  return w;
}

XiWeight XiWeight::tabulated(std::vector<double> t, std::vector<double> xi) {
  if (t.size() != xi.size() || t.size() < 2) {
    throw Error(ErrorKind::parameter_domain, "tabulated xi needs at least 2 samples");
  }
  if (t.front() != 0.0) throw Error(ErrorKind::parameter_domain, "tabulated xi must start at t = 0");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(xi[i] > 0.0)) throw Error(ErrorKind::parameter_domain, "xi must be positive");
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw Error(ErrorKind::parameter_domain, "tabulated xi abscissae must be increasing");
    }
    if (i > 0 && xi[i] > xi[i - 1]) {
      throw Error(ErrorKind::parameter_domain, "xi must be nonincreasing");
    }
  }
  XiWeight w;
  w.family_ = Family::tabulated;
  w.t_ = std::move(t);
  w.xi_ = std::move(xi);
  return w;
}

double XiWeight::value(double t) const {
  if (family_ == Family::constant) return constant_;
  if (t <= t_.front()) return xi_.front();
  if (t >= t_.back()) return xi_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto i = static_cast<std::size_t>(it - t_.begin());
  const double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
  return (1.0 - w) * xi_[i - 1] + w * xi_[i];
}

double XiWeight::derivative(double t) const {
  if (family_ == Family::constant || t < t_.front() || t >= t_.back()) return 0.0;
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const auto i = static_cast<std::size_t>(it - t_.begin());
  return (xi_[i] - xi_[i - 1]) / (t_[i] - t_[i - 1]);
}

XiWeight load_tabulated_xi(const std::string& path) {
  auto [t, xi] = read_two_column_csv(path, "t,xi");
  return XiWeight::tabulated(std::move(t), std::move(xi));
}

XiCertificate admissible_xi_p(const Kernel& kernel) {
  const auto* poly = kernel.polynomial();
  if (poly == nullptr) {
    throw Error(ErrorKind::admissibility,
                "closed-form (xi, p) exists only for the polynomial kernel family");
  }
  const double q = poly->exponent;
  if (!(q > 2.0)) {
    throw Error(ErrorKind::admissibility,
                "polynomial kernel needs q > 2 so that p = (q+1)/q < 3/2");
  }
  const double b = q * std::pow(poly->amplitude, -1.0 / q);
  return {XiWeight::constant(b), (q + 1.0) / q};
}

std::vector<double> default_hypothesis_grid() { return log_spaced_grid(1e3, 512); }

HypothesisReport check_hypotheses(const Kernel& kernel, const XiWeight& xi, double p,
                                  double a0, std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::parameter_domain, "hypothesis grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::parameter_domain, "hypothesis grid must be increasing");
    }
  }
  HypothesisReport report;
  report.grid.assign(grid.begin(), grid.end());
  report.g0 = kernel.mass();
  report.h2_margin = 1.0 / a0 - report.g0;
  report.h2_pass = report.g0 > 0.0 && report.h2_margin > 0.0;

  report.tolerance = 1e-9 * std::max(1.0, kernel.value(0.0));
  report.p_admissible = p >= 1.0 && p < 1.5;
  report.xi_nonincreasing = true;
  report.h3_margin = std::numeric_limits<double>::infinity();
  double previous_xi = std::numeric_limits<double>::infinity();
  for (const double t : grid) {
    const double w = xi.value(t);
    if (!(w > 0.0) || w > previous_xi) report.xi_nonincreasing = false;
    previous_xi = w;
    const double margin = -kernel.derivative(t) - w * std::pow(kernel.value(t), p);
    report.h3_margin = std::min(report.h3_margin, margin);
    if (margin < -report.tolerance) report.h3_failures.push_back(t);
  }
  report.h3_pass = report.p_admissible && report.xi_nonincreasing && report.h3_failures.empty();
  return report;
}

double tail_h(const Kernel& kernel, const XiWeight& xi, double t) {
  if (t < 0.0) throw Error(ErrorKind::domain, "h(t) is defined for t >= 0");
  return xi.value(t) * kernel.tail(t);
}

Lemma2Result lemma2_integral(const Kernel& kernel, const XiWeight& xi, double /*p*/,
                             double sigma, double horizon) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw Error(ErrorKind::parameter_domain, "lemma2_integral needs 0 < sigma < 1");
  }
  if (!(horizon > 16.0)) {
    throw Error(ErrorKind::parameter_domain, "lemma2_integral needs horizon > 16");
  }
  const auto integrand = [&](double t) {
    return xi.value(t) * std::pow(kernel.value(t), 1.0 - sigma);
  };
  // Panels [2^j - 1, 2^{j+1} - 1] up to the last three doublings of 1 + horizon.
  const double top = 1.0 + horizon;
  const std::array<double, 4> levels = {top / 8.0 - 1.0, top / 4.0 - 1.0, top / 2.0 - 1.0, horizon};
  const auto panel = [&](double lo, double hi) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 20,
                                                                          1e-13, &err);
  };
  double head = 0.0;
  for (double lo = 0.0; lo < levels[0];) {
    const double hi = std::min(2.0 * (1.0 + lo) - 1.0, levels[0]);
    head += panel(lo, hi);
    lo = hi;
  }
  std::array<double, 3> increments{};
  for (std::size_t j = 0; j < 3; ++j) increments[j] = panel(levels[j], levels[j + 1]);

  Lemma2Result result;
  result.value = head + increments[0] + increments[1] + increments[2];
  result.converged = true;
  for (std::size_t j = 1; j < 3; ++j) {
    // Increments that underflow to zero (exponential kernels) count as ratio 0.
    const double ratio = increments[j] == 0.0 ? 0.0 : increments[j] / increments[j - 1];
    result.increment_ratios.push_back(ratio);
    if (!(ratio < 0.9)) result.converged = false;
  }
  result.extrapolated = result.value;
  if (result.converged) {
    const double r = result.increment_ratios.back();
    result.extrapolated += increments[2] * r / (1.0 - r);
  }
  return result;
}

}  // namespace memdecay
