#include "memdecay/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "memdecay/error.hpp"

namespace memdecay {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FamilyName {
  BoundFamily family;
  const char* name;
};

constexpr std::array<FamilyName, 9> kFamilyNames = {{
    {BoundFamily::lemma1, "lemma1"},
    {BoundFamily::thm_case1_first, "thm_case1_first"},
    {BoundFamily::thm_case1_improved, "thm_case1_improved"},
    {BoundFamily::thm_case2_first, "thm_case2_first"},
    {BoundFamily::thm_case2_improved, "thm_case2_improved"},
    {BoundFamily::example_case1, "example_case1"},
    {BoundFamily::example_case2, "example_case2"},
    {BoundFamily::prior_case1, "prior_case1"},
    {BoundFamily::prior_case2, "prior_case2"},
}};

void check_grid(std::span<const double> grid) {
  if (grid.empty() || grid.front() != 0.0) {
    throw Error(ErrorKind::parameter_domain, "bound grids must start at t = 0");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::parameter_domain, "bound grids must be strictly increasing");
    }
  }
}

// int_0^t f over panels [2^j - 1, 2^{j+1} - 1].
template <class F>
double integrate_doubling(const F& f, double t) {
  double total = 0.0;
  for (double lo = 0.0; lo < t;) {
    const double hi = std::min(2.0 * (1.0 + lo) - 1.0, t);
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-13,
                                                                           &err);
    lo = hi;
  }
  return total;
}

// Exponents of the case-1 bounds, validated.
double case1_first_alpha(double p) {
  if (p == 1.0) {
    throw Error(ErrorKind::family_undefined,
                "p = 1 makes the algebraic bound singular; use an exponential-type bound");
  }
  if (!(p > 1.0 && p < 1.5)) throw Error(ErrorKind::parameter_domain, "bounds need 1 < p < 3/2");
  return 2.0 * p - 2.0;
}

double case1_improved_alpha(double p) {
  case1_first_alpha(p);
  return p - 1.0;
}

double case2_exponent(double p, Case2Variant variant) {
  if (!(p >= 1.0 && p < 1.5)) throw Error(ErrorKind::parameter_domain, "bounds need 1 <= p < 3/2");
  return variant == Case2Variant::first ? 2.0 * p - 1.0 : p;
}

// Grid with 64 points per doubling of 1 + t, ending at the first power of
// two at or above 1 + horizon; every doubling point is a grid point.
std::vector<double> doubling_grid(double horizon, std::size_t& doublings) {
  doublings = static_cast<std::size_t>(std::ceil(std::log2(1.0 + horizon)));
  constexpr std::size_t per = 64;
  std::vector<double> grid(doublings * per + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::exp2(static_cast<double>(i) / per) - 1.0;
  }
  grid.front() = 0.0;
  return grid;
}

IntegrabilityCheck integrability(std::span<const double> grid, std::span<const double> values,
                                 std::size_t doublings, std::size_t start) {
  constexpr std::size_t per = 64;
  std::vector<double> integral(grid.size(), 0.0);
  for (std::size_t i = start + 1; i < grid.size(); ++i) {
    integral[i] = integral[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  }
  IntegrabilityCheck check;
  check.value = integral.back();
  std::array<double, 3> increments{};
  for (std::size_t j = 0; j < 3; ++j) {
    const std::size_t hi = (doublings - 2 + j) * per;
    increments[j] = integral[hi] - integral[hi - per];
  }
  check.integrable = true;
  for (std::size_t j = 1; j < 3; ++j) {
    const double ratio = increments[j] / increments[j - 1];
    check.increment_ratios.push_back(ratio);
    // A power-law integrand (1+t)^-g gives ratio 2^{1-g}.
    if (!(ratio < 1.0 - 1e-3)) check.integrable = false;
  }
  return check;
}

void check_horizon(double horizon) {
  if (!(horizon >= 64.0)) {
    throw Error(ErrorKind::parameter_domain, "integrability horizons must be at least 64");
  }
}

}  // namespace

const char* to_string(BoundFamily family) noexcept {
  for (const auto& entry : kFamilyNames) {
    if (entry.family == family) return entry.name;
  }
  return "unknown";
}

BoundFamily parse_bound_family(const std::string& name) {
  for (const auto& entry : kFamilyNames) {
    if (name == entry.name) return entry.family;
  }
  throw Error(ErrorKind::config, "unknown bound family \"" + name + "\"");
}

std::vector<double> lemma1_bound(double alpha, const XiWeight& xi, const TailFunction& h,
                                 std::span<const double> grid) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::parameter_domain, "lemma1_bound needs alpha > 0");
  check_grid(grid);
  const double beta = (alpha + 1.0) / alpha;
  std::vector<double> integrand(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    integrand[i] =
        std::pow(1.0 + s, 1.0 / alpha) * std::pow(xi.value(s), beta) * std::pow(h(s), alpha + 1.0);
  }
  const std::vector<double> bracket = cumulative_trapezoid(grid, integrand);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    out[i] = std::pow(1.0 + t, -1.0 / alpha) * std::pow(xi.value(t), -beta) * (1.0 + bracket[i]);
  }
  return out;
}

double lemma1_bound(double alpha, const XiWeight& xi, const TailFunction& h, double t) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::parameter_domain, "lemma1_bound needs alpha > 0");
  if (!(t >= 0.0)) throw Error(ErrorKind::domain, "lemma1_bound needs t >= 0");
  const double beta = (alpha + 1.0) / alpha;
  const double bracket = integrate_doubling(
      [&](double s) {
        return std::pow(1.0 + s, 1.0 / alpha) * std::pow(xi.value(s), beta) *
               std::pow(h(s), alpha + 1.0);
      },
      t);
  return std::pow(1.0 + t, -1.0 / alpha) * std::pow(xi.value(t), -beta) * (1.0 + bracket);
}

std::vector<double> thm_case1_first(double p, const XiWeight& xi, const TailFunction& h,
                                    std::span<const double> grid) {
  return lemma1_bound(case1_first_alpha(p), xi, h, grid);
}

std::vector<double> thm_case1_improved(double p, const XiWeight& xi, const TailFunction& h,
                                       std::span<const double> grid) {
  return lemma1_bound(case1_improved_alpha(p), xi, h, grid);
}

std::vector<double> thm_case2(double p, const XiWeight& xi, const TailFunction& h, double e0,
                              double e2_0, std::span<const double> grid, Case2Variant variant,
                              double t_min) {
  const double m = case2_exponent(p, variant);
  if (!(t_min > 0.0)) throw Error(ErrorKind::parameter_domain, "case-2 bounds need t_min > 0");
  if (!(e0 >= 0.0) || !(e2_0 >= 0.0) || !std::isfinite(e2_0)) {
    throw Error(ErrorKind::parameter_domain, "case-2 bounds need finite E(0), E2(0) >= 0");
  }
  check_grid(grid);
  std::vector<double> hm(grid.size());
  std::vector<double> xim(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    hm[i] = std::pow(h(grid[i]), m);
    xim[i] = std::pow(xi.value(grid[i]), m);
  }
  const std::vector<double> num = cumulative_trapezoid(grid, hm);
  const std::vector<double> den = cumulative_trapezoid(grid, xim);
  const double constant = e2_0 + std::pow(e0, m);
  std::vector<double> out(grid.size(), kNaN);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < t_min) continue;
    out[i] = std::pow((constant + num[i]) / den[i], 1.0 / m);
  }
  return out;
}

double thm_case2(double p, const XiWeight& xi, const TailFunction& h, double e0, double e2_0,
                 double t, Case2Variant variant, double t_min) {
  const double m = case2_exponent(p, variant);
  if (!(t >= t_min) || !(t_min > 0.0)) {
    throw Error(ErrorKind::domain, "case-2 bounds are defined for t >= t_min > 0");
  }
  const double num = integrate_doubling([&](double s) { return std::pow(h(s), m); }, t);
  const double den = integrate_doubling([&](double s) { return std::pow(xi.value(s), m); }, t);
  return std::pow((e2_0 + std::pow(e0, m) + num) / den, 1.0 / m);
}

IntegrabilityCheck case1_integrability(double p, const XiWeight& xi, const TailFunction& h,
                                       double horizon) {
  check_horizon(horizon);
  std::size_t doublings = 0;
  const std::vector<double> grid = doubling_grid(horizon, doublings);
  const std::vector<double> values = thm_case1_first(p, xi, h, grid);
  return integrability(grid, values, doublings, 0);
}

IntegrabilityCheck case2_integrability(double p, const XiWeight& xi, const TailFunction& h,
                                       double e0, double e2_0, double horizon, double t_min) {
  check_horizon(horizon);
  std::size_t doublings = 0;
  const std::vector<double> grid = doubling_grid(horizon, doublings);
  const std::vector<double> values =
      thm_case2(p, xi, h, e0, e2_0, grid, Case2Variant::first, t_min);
  const auto first = std::find_if(grid.begin(), grid.end(), [&](double t) { return t >= t_min; });
  const auto start = static_cast<std::size_t>(first - grid.begin());
  if (start + 3 * 64 >= grid.size()) {
    throw Error(ErrorKind::parameter_domain, "integrability horizon too short for t_min");
  }
  return integrability(grid, values, doublings, start);
}

PriorWorkBounds prior_work_bounds(double q) {
  if (!(q > 2.0)) throw Error(ErrorKind::domain, "prior-work exponents need q > 2");
  PriorWorkBounds out;
  out.q = q;
  out.prior_case1_sup = (q - 1.0) / 2.0;
  out.prior_case2_sup = (q - 1.0) / (q + 1.0);
  out.new_case1 = (q * q - q - 1.0) / q;
  out.new_case2 = q / (q + 1.0);
  out.case1_improves = out.new_case1 > out.prior_case1_sup;
  out.case2_improves = out.new_case2 > out.prior_case2_sup;
  out.comparison_sentence_value = (q * q - q - 1.0) / 2.0;
  return out;
}

double DecayBound::value(std::size_t n) const {
  if (grid.at(n) < t_min) throw Error(ErrorKind::domain, "bound evaluated below t_min");
  return values.at(n);
}

std::size_t DecayBound::first_index() const {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t_min);
  return static_cast<std::size_t>(it - grid.begin());
}

bool DecayBound::nonincreasing(double rel_tol) const {
  for (std::size_t n = first_index() + 1; n < values.size(); ++n) {
    if (values[n] > values[n - 1] * (1.0 + rel_tol)) return false;
  }
  return true;
}

DecayBound make_bound(BoundFamily family, const BoundParams& params, std::span<const double> grid) {
  check_grid(grid);
  DecayBound bound;
  bound.family = family;
  bound.grid.assign(grid.begin(), grid.end());
  const auto power_law = [&](double exponent, double shift) {
    bound.nominal_exponent = exponent;
    bound.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      bound.values[i] = grid[i] < bound.t_min ? kNaN : std::pow(shift + grid[i], exponent);
    }
  };
  switch (family) {
    case BoundFamily::lemma1:
      bound.values = lemma1_bound(params.alpha, params.xi, params.h, grid);
      break;
    case BoundFamily::thm_case1_first:
      bound.values = thm_case1_first(params.p, params.xi, params.h, grid);
      break;
    case BoundFamily::thm_case1_improved: {
      IntegrabilityCheck check =
          case1_integrability(params.p, params.xi, params.h, params.integrability_horizon);
      if (!check.integrable) {
        throw Error(ErrorKind::improved_bound_unavailable,
                    "the first case-1 bound is not integrable; the improved bound does not apply");
      }
      bound.precondition = std::move(check);
      bound.values = thm_case1_improved(params.p, params.xi, params.h, grid);
      break;
    }
    case BoundFamily::thm_case2_first:
    case BoundFamily::thm_case2_improved: {
      const bool improved = family == BoundFamily::thm_case2_improved;
      bound.t_min = params.t_min;
      if (improved) {
        bound.precondition = case2_integrability(params.p, params.xi, params.h, params.e0,
                                                 params.e2_0, params.integrability_horizon,
                                                 params.t_min);
      }
      bound.values = thm_case2(params.p, params.xi, params.h, params.e0, params.e2_0, grid,
                               improved ? Case2Variant::improved : Case2Variant::first,
                               params.t_min);
      break;
    }
    case BoundFamily::example_case1:
      power_law(-prior_work_bounds(params.q).new_case1, 1.0);
      break;
    case BoundFamily::example_case2:
      bound.t_min = params.t_min;
      power_law(-prior_work_bounds(params.q).new_case2, 0.0);
      break;
    case BoundFamily::prior_case1:
      power_law(-prior_work_bounds(params.q).prior_case1_sup, 1.0);
      break;
    case BoundFamily::prior_case2:
      power_law(-prior_work_bounds(params.q).prior_case2_sup, 1.0);
      break;
  }
  return bound;
}

LineFit loglog_slope(std::span<const double> t, std::span<const double> y, double lo, double hi) {
  std::vector<double> x;
  std::vector<double> ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo || t[i] > hi) continue;
    if (!(y[i] > 0.0)) {
      throw Error(ErrorKind::fit_domain, "log-log fit over a non-positive sample");
    }
    x.push_back(std::log1p(t[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(x, ly);
}

FitReport fit_envelope(std::span<const double> t, std::span<const double> e,
                       std::span<const double> bound, const FitWindow& window) {
  if (t.size() != e.size() || t.size() != bound.size() || t.empty()) {
    throw Error(ErrorKind::internal, "fit_envelope: size mismatch");
  }
  FitReport report;
  report.t_lo = window.t_lo;
  report.t_hi = window.t_hi > 0.0 ? window.t_hi : t.back();
  if (!(report.t_hi > report.t_lo)) throw Error(ErrorKind::fit_domain, "empty fit window");

  std::vector<double> ratio_t;
  std::vector<double> ratio;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < report.t_lo || t[i] > report.t_hi) continue;
    if (!(e[i] > 0.0) || !(bound[i] > 0.0)) {
      throw Error(ErrorKind::fit_domain, "energy and bound must be positive on the fit window");
    }
    ratio_t.push_back(t[i]);
    ratio.push_back(e[i] / bound[i]);
  }
  if (ratio.empty()) throw Error(ErrorKind::fit_domain, "no samples in the fit window");

  const std::size_t levels = std::max<std::size_t>(window.levels, 2);
  for (std::size_t j = levels; j-- > 0;) {
    const double horizon = report.t_hi / std::exp2(static_cast<double>(j));
    if (horizon <= report.t_lo) continue;
    double best = 0.0;
    for (std::size_t i = 0; i < ratio.size() && ratio_t[i] <= horizon; ++i) {
      best = std::max(best, ratio[i]);
    }
    report.horizons.push_back(horizon);
    report.c_star_series.push_back(best);
  }
  report.c_star = report.c_star_series.back();
  const std::size_t count = report.c_star_series.size();
  if (count >= 2 && report.c_star > 0.0) {
    report.drift = (report.c_star - report.c_star_series[count - 2]) / report.c_star;
  }
  if (count >= 3 && report.c_star > 0.0) {
    report.drift_two_doublings = (report.c_star - report.c_star_series[count - 3]) / report.c_star;
  }

  report.slope_hi = window.slope_hi > 0.0 ? window.slope_hi : report.t_hi;
  report.slope_lo = window.slope_hi > 0.0
                        ? window.slope_lo
                        : std::expm1(0.75 * std::log1p(report.slope_hi));
  const LineFit fit = loglog_slope(t, e, report.slope_lo, report.slope_hi);
  report.slope = fit.slope;
  report.slope_residual = fit.rms_residual;
  return report;
}

FitReport fit_envelope(const EnergyTrace& trace, const DecayBound& bound, const FitWindow& window) {
  if (bound.grid.size() != trace.size()) {
    throw Error(ErrorKind::internal, "bound grid does not match the energy trace");
  }
  FitWindow adjusted = window;
  adjusted.t_lo = std::max(window.t_lo, bound.t_min);
  return fit_envelope(trace.t, trace.e, bound.values, adjusted);
}

namespace {

struct Lemma1Rhs {
  double alpha;
  const XiWeight& xi;
  const TailFunction& h;
  double c1;
  double c2;

  double decay(double t) const { return c1 * std::pow(xi.value(t), alpha + 1.0); }
  double forcing(double t) const { return c2 * std::pow(h(t), alpha + 1.0); }
  double f(double t, double y) const {
    return -decay(t) * std::pow(std::max(y, 0.0), alpha + 1.0) + forcing(t);
  }
  double dfdy(double t, double y) const {
    return -decay(t) * (alpha + 1.0) * std::pow(std::max(y, 0.0), alpha);
  }
};

// One two-stage Gauss-Legendre step; false when Newton does not converge.
bool gauss_legendre_step(const Lemma1Rhs& rhs, double t, double y, double dt, double& out) {
  static const double r = std::sqrt(3.0) / 6.0;
  const double c[2] = {0.5 - r, 0.5 + r};
  const double a[2][2] = {{0.25, 0.25 - r}, {0.25 + r, 0.25}};
  double k[2];
  k[0] = k[1] = rhs.f(t, y);
  for (int iter = 0; iter < 30; ++iter) {
    double res[2];
    double jac[2];
    for (int i = 0; i < 2; ++i) {
      const double yi = y + dt * (a[i][0] * k[0] + a[i][1] * k[1]);
      res[i] = k[i] - rhs.f(t + c[i] * dt, yi);
      jac[i] = rhs.dfdy(t + c[i] * dt, yi);
    }
    const double m00 = 1.0 - dt * jac[0] * a[0][0];
    const double m01 = -dt * jac[0] * a[0][1];
    const double m10 = -dt * jac[1] * a[1][0];
    const double m11 = 1.0 - dt * jac[1] * a[1][1];
    const double det = m00 * m11 - m01 * m10;
    if (!(std::abs(det) > 1e-300)) return false;
    const double d0 = (res[0] * m11 - res[1] * m01) / det;
    const double d1 = (m00 * res[1] - m10 * res[0]) / det;
    k[0] -= d0;
    k[1] -= d1;
    const double scale = std::abs(k[0]) + std::abs(k[1]) + std::abs(y) / dt * 1e-3;
    if (std::abs(d0) + std::abs(d1) <= 1e-14 * scale) {
      out = y + 0.5 * dt * (k[0] + k[1]);
      return std::isfinite(out) && out >= 0.0;
    }
  }
  return false;
}

}  // namespace

Lemma1Report lemma1_verify(double alpha, const XiWeight& xi, const TailFunction& h, double c1,
                           double c2, double f0, double horizon, double step_fraction) {
  if (!(alpha > 0.0) || !(c1 > 0.0) || !(c2 >= 0.0) || !(f0 >= 0.0) || !(horizon > 0.0) ||
      !(step_fraction > 0.0 && step_fraction < 0.1)) {
    throw Error(ErrorKind::parameter_domain, "lemma1_verify: invalid parameters");
  }
  const Lemma1Rhs rhs{alpha, xi, h, c1, c2};
  Lemma1Report report;
  report.t.push_back(0.0);
  report.f.push_back(f0);

  // Steps resolve the time scale (1 + t), the relaxation scale F/|F'| and,
  // in the stiff regime, keep |dt f_y| moderate.
  double t = 0.0;
  double y = f0;
  while (t < horizon) {
    const double slope = std::abs(rhs.f(t, y));
    double dt = 1.0 + t;
    if (slope > 0.0) dt = std::min(dt, std::max(y, slope * step_fraction * (1.0 + t)) / slope);
    dt *= step_fraction;
    const double stiff = std::abs(rhs.dfdy(t, y));
    if (stiff > 0.0) dt = std::min(dt, std::max(20.0 / stiff, step_fraction * step_fraction * (1.0 + t)));
    dt = std::min(dt, horizon - t);
    double next = 0.0;
    int halvings = 0;
    while (!gauss_legendre_step(rhs, t, y, dt, next)) {
      dt *= 0.5;
      if (++halvings > 40) throw Error(ErrorKind::internal, "lemma1_verify: step failure");
    }
    t = (horizon - t == dt) ? horizon : t + dt;
    y = next;
    report.t.push_back(t);
    report.f.push_back(y);
  }

  report.bound = lemma1_bound(alpha, xi, h, report.t);

  // phi = xi^beta F against phi' <= -c1 phi^{alpha+1} + c2 xi^beta h^{alpha+1},
  // integrated over each step by the trapezoid rule.
  const double beta = (alpha + 1.0) / alpha;
  const auto phi_terms = [&](double s, double fs, double& phi, double& rate, double& scale) {
    const double w = std::pow(xi.value(s), beta);
    phi = w * fs;
    const double loss = c1 * std::pow(phi, alpha + 1.0);
    const double gain = c2 * w * std::pow(h(s), alpha + 1.0);
    rate = gain - loss;
    scale = gain + loss;
  };
  report.phi_inequality_holds = true;
  report.phi_worst_margin = std::numeric_limits<double>::infinity();
  double phi0 = 0.0;
  double rate0 = 0.0;
  double scale0 = 0.0;
  phi_terms(report.t[0], report.f[0], phi0, rate0, scale0);
  for (std::size_t n = 1; n < report.t.size(); ++n) {
    double phi1 = 0.0;
    double rate1 = 0.0;
    double scale1 = 0.0;
    phi_terms(report.t[n], report.f[n], phi1, rate1, scale1);
    const double dt = report.t[n] - report.t[n - 1];
    const double allowed = 0.5 * dt * (rate0 + rate1);
    const double size = 0.5 * dt * (scale0 + scale1) + std::abs(phi1 - phi0) + 1e-300;
    const double margin = (allowed - (phi1 - phi0)) / size;
    report.phi_worst_margin = std::min(report.phi_worst_margin, margin);
    if (margin < -1e-4) report.phi_inequality_holds = false;
    phi0 = phi1;
    rate0 = rate1;
    scale0 = scale1;
  }

  FitWindow window;
  window.t_lo = 0.0;
  window.t_hi = horizon;
  window.levels = 3;
  report.fit = fit_envelope(report.t, report.f, report.bound, window);
  report.stable = report.fit.drift_two_doublings <= 0.05;
  return report;
}

}  // namespace memdecay
