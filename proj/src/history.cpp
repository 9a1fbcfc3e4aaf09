#include "memdecay/history.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "memdecay/error.hpp"

namespace memdecay {

namespace {

double integrate(const auto& f, double lo, double hi) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 25, 1e-13,
                                                                        &err);
}

// Length S of the integration window past t, per the tolerance rule.
double cutoff(const HistoryData& history, const Kernel& kernel, double t, double tolerance) {
  if (history.family() == HistoryFamily::bump) return history.decay();
  const double scale = std::max(history.sup_abs(), 1e-300);
  const auto remainder = [&](double s) {
    return scale * history.shape_sup_from(s) *
           std::max(kernel.tail(t + s), kernel.value(t + s));
  };
  double s = history.family() == HistoryFamily::exponential ? 1.0 / history.decay() : 1.0;
  for (int i = 0; i < 200 && remainder(s) > tolerance; ++i) s *= 2.0;
  return s;
}

}  // namespace

const char* to_string(HistoryFamily family) noexcept {
  switch (family) {
    case HistoryFamily::constant: return "constant";
    case HistoryFamily::exponential: return "exponential";
    case HistoryFamily::bump: return "bump";
  }
  return "unknown";
}

HistoryData::HistoryData(HistoryFamily family, std::vector<double> coefficients,
                         std::vector<double> velocities, double decay)
    : family_(family),
      coefficients_(std::move(coefficients)),
      velocities_(std::move(velocities)),
      decay_(decay) {
  if (coefficients_.empty() || coefficients_.size() != velocities_.size()) {
    throw Error(ErrorKind::parameter_domain,
                "history needs one coefficient and one velocity per mode");
  }
  for (std::size_t k = 0; k < coefficients_.size(); ++k) {
    if (!std::isfinite(coefficients_[k]) || !std::isfinite(velocities_[k])) {
      throw Error(ErrorKind::parameter_domain, "history data must be finite");
    }
  }
  if (family_ != HistoryFamily::constant && !(decay_ > 0.0 && std::isfinite(decay_))) {
    throw Error(ErrorKind::parameter_domain, "history decay parameter must be positive");
  }
}

HistoryData HistoryData::zero(std::size_t modes) {
  return HistoryData(HistoryFamily::constant, std::vector<double>(modes, 0.0),
                     std::vector<double>(modes, 0.0));
}

double HistoryData::shape(double s) const {
  switch (family_) {
    case HistoryFamily::constant: return 1.0;
    case HistoryFamily::exponential: return std::exp(-decay_ * s);
    case HistoryFamily::bump: return std::max(0.0, 1.0 - s / decay_);
  }
  return 0.0;
}

double HistoryData::shape_sup_from(double r) const { return std::abs(shape(std::max(r, 0.0))); }

double HistoryData::sup_abs() const noexcept {
  double m = 0.0;
  for (const double c : coefficients_) m = std::max(m, std::abs(c));
  return m;
}

double m0_case1(const HistoryData& history, const ModalOperatorPair& pair) {
  double sum = 0.0;
  for (std::size_t k = 0; k < history.modes(); ++k) {
    const double c = history.coefficients()[k];
    sum += pair.b()[k] * c * c;
  }
  return std::sqrt(sum);
}

double m0_case2(const HistoryData& history, const ModalOperatorPair& pair) {
  double sum = 0.0;
  for (std::size_t k = 0; k < history.modes(); ++k) {
    const double c = history.coefficients()[k];
    sum += pair.a()[k] * pair.b()[k] * c * c;
  }
  return std::sqrt(sum);
}

double default_tail_tolerance(const HistoryData& history) {
  return 1e-10 * (1.0 + history.sup_abs());
}

HistoryMoments history_moments(const HistoryData& history, const Kernel& kernel, double t,
                               double tolerance) {
  if (t < 0.0) throw Error(ErrorKind::domain, "history moments need t >= 0");
  HistoryMoments m;
  if (history.family() == HistoryFamily::constant) {
    m.g_phi = m.g_phi2 = kernel.tail(t);
    m.dg_phi = m.dg_phi2 = -kernel.value(t);
    return m;
  }
  const double s = cutoff(history, kernel, t, tolerance);
  m.g_phi = integrate([&](double x) { return kernel.value(x) * history.shape(x - t); }, t, t + s);
  m.g_phi2 = integrate(
      [&](double x) {
        const double p = history.shape(x - t);
        return kernel.value(x) * p * p;
      },
      t, t + s);
  m.dg_phi =
      integrate([&](double x) { return kernel.derivative(x) * history.shape(x - t); }, t, t + s);
  m.dg_phi2 = integrate(
      [&](double x) {
        const double p = history.shape(x - t);
        return kernel.derivative(x) * p * p;
      },
      t, t + s);
  return m;
}

double history_shape_tail(const HistoryData& history, const Kernel& kernel, double t,
                          double tolerance) {
  if (t < 0.0) throw Error(ErrorKind::domain, "history tail needs t >= 0");
  if (history.family() == HistoryFamily::constant) return kernel.tail(t);
  const double s = cutoff(history, kernel, t, tolerance);
  return integrate([&](double x) { return kernel.value(x) * history.shape(x - t); }, t, t + s);
}

double history_tail_integral(const HistoryData& history, const Kernel& kernel, double t,
                             std::size_t mode, double tolerance) {
  if (mode >= history.modes()) throw Error(ErrorKind::parameter_domain, "mode out of range");
  const double c = history.coefficients()[mode];
  if (c == 0.0) return 0.0;
  if (!(tolerance > 0.0)) tolerance = default_tail_tolerance(history);
  return c * history_shape_tail(history, kernel, t, tolerance);
}

}  // namespace memdecay
