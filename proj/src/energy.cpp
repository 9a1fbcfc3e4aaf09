#include "memdecay/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "memdecay/error.hpp"
#include "memdecay/numerics.hpp"

namespace memdecay {

namespace {

// Kernel samples on the time grid and history moments at every t_n (or at
// a single requested n).
struct Tables {
  std::vector<double> g;
  std::vector<double> dg;
  std::vector<HistoryMoments> moments;
  std::vector<double> tail;  // G(t_n)
};

Tables make_tables(const ModalTrajectory& traj, const Kernel& kernel, const HistoryData& history,
                   std::size_t last, double tolerance, bool all_moments) {
  Tables t;
  t.g.resize(last + 1);
  t.dg.resize(last + 1);
  for (std::size_t j = 0; j <= last; ++j) {
    t.g[j] = kernel.value(traj.time(j));
    t.dg[j] = kernel.derivative(traj.time(j));
  }
  const std::size_t first = all_moments ? 0 : last;
  t.moments.resize(last + 1);
  t.tail.resize(last + 1);
  const bool no_history = history.sup_abs() == 0.0;
  for (std::size_t n = first; n <= last; ++n) {
    const double time = traj.time(n);
    t.tail[n] = kernel.tail(time);
    if (no_history) {
      t.moments[n] = {};
    } else {
      t.moments[n] = history_moments(history, kernel, time, tolerance);
    }
  }
  return t;
}

// Memory integrals of one mode at step n:
//   q  = int_0^inf g  eta^2,  qd = int_0^inf g' eta^2,  lin = int_0^inf g eta.
struct ModeIntegrals {
  double q = 0.0;
  double qd = 0.0;
  double lin = 0.0;
};

ModeIntegrals mode_integrals(const double* u, std::size_t n, double dt, double c,
                             const Tables& tables) {
  ModeIntegrals r;
  const double un = u[n];
  if (n > 0) {
    const double* g = tables.g.data();
    const double* dg = tables.dg.data();
    double q = 0.0;
    double qd = 0.0;
    double lin = 0.0;
#pragma omp simd reduction(+ : q, qd, lin)
    for (std::size_t j = 1; j < n; ++j) {
      const double eta = un - u[n - j];
      q += g[j] * eta * eta;
      qd += dg[j] * eta * eta;
      lin += g[j] * eta;
    }
    // j = 0 contributes eta = 0; half weight at j = n.
    const double eta_n = un - u[0];
    q += 0.5 * g[n] * eta_n * eta_n;
    qd += 0.5 * dg[n] * eta_n * eta_n;
    lin += 0.5 * g[n] * eta_n;
    r.q = dt * q;
    r.qd = dt * qd;
    r.lin = dt * lin;
  }
  // s > t: eta = u(t) - c phi(s - t).
  const HistoryMoments& m = tables.moments[n];
  const double big_g = tables.tail[n];
  const double gn = tables.g[n];
  r.q += std::max(0.0, un * un * big_g - 2.0 * un * c * m.g_phi + c * c * m.g_phi2);
  r.qd += std::min(0.0, -un * un * gn - 2.0 * un * c * m.dg_phi + c * c * m.dg_phi2);
  r.lin += un * big_g - c * m.g_phi;
  return r;
}

struct SampleSums {
  double e = 0.0;
  double e2 = 0.0;
  double e_prime = 0.0;
  double floor_sum = 0.0;  // sum a u^2 + v^2 + b q
  double i1 = 0.0;
  double i2 = 0.0;
};

void accumulate_mode(SampleSums& s, const ModalTrajectory& traj, const ModalOperatorPair& pair,
                     const HistoryData& history, double g0, std::size_t k, std::size_t n,
                     const Tables& tables) {
  const double a = pair.a()[k];
  const double b = pair.b()[k];
  const double u = traj.u(k, n);
  const double v = traj.v(k, n);
  const ModeIntegrals mi = mode_integrals(traj.displacement(k).data(), n, traj.dt(),
                                          history.coefficients()[k], tables);
  s.e += 0.5 * (a * u * u - g0 * b * u * u + v * v + b * mi.q);
  s.e2 += 0.5 * (a * a * u * u - g0 * a * b * u * u + a * v * v + a * b * mi.q);
  s.e_prime += 0.5 * b * mi.qd;
  s.floor_sum += a * u * u + v * v + b * mi.q;
  s.i1 += v * u;
  s.i2 -= v * mi.lin;
}

void check_sample(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                  const HistoryData& history, std::size_t n) {
  if (n > traj.steps()) throw Error(ErrorKind::domain, "sample index beyond trajectory");
  if (pair.modes() != traj.modes() || history.modes() != traj.modes()) {
    throw Error(ErrorKind::parameter_domain, "operator and trajectory mode counts differ");
  }
}

SampleSums single_sample(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                         const Kernel& kernel, const HistoryData& history, std::size_t n) {
  check_sample(traj, pair, history, n);
  const Tables tables = make_tables(traj, kernel, history, n, default_tail_tolerance(history), false);
  const double g0 = kernel.mass();
  SampleSums s;
  for (std::size_t k = 0; k < traj.modes(); ++k) accumulate_mode(s, traj, pair, history, g0, k, n, tables);
  return s;
}

double floor_factor(const ModalOperatorPair& pair, const Kernel& kernel) {
  return 0.5 * (1.0 - coercivity_constants(pair).a0 * kernel.mass());
}

}  // namespace

double energy(const ModalTrajectory& traj, const ModalOperatorPair& pair, const Kernel& kernel,
              const HistoryData& history, std::size_t n) {
  return single_sample(traj, pair, kernel, history, n).e;
}

double energy_rate_identity(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                            const Kernel& kernel, const HistoryData& history, std::size_t n) {
  return single_sample(traj, pair, kernel, history, n).e_prime;
}

double energy2(const ModalTrajectory& traj, const ModalOperatorPair& pair, const Kernel& kernel,
               const HistoryData& history, std::size_t n) {
  return single_sample(traj, pair, kernel, history, n).e2;
}

double coercivity_floor(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                        const Kernel& kernel, const HistoryData& history, std::size_t n) {
  return floor_factor(pair, kernel) * single_sample(traj, pair, kernel, history, n).floor_sum;
}

FunctionalValues functionals(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                             const Kernel& kernel, const HistoryData& history, std::size_t n,
                             double big_m, double alpha0) {
  if (!(big_m > 0.0) || !(alpha0 >= 0.0)) {
    throw Error(ErrorKind::parameter_domain, "functionals need M > 0 and alpha0 >= 0");
  }
  const SampleSums s = single_sample(traj, pair, kernel, history, n);
  return {s.i1, s.i2, (big_m + alpha0) * s.e + s.i1 + 0.5 * kernel.mass() * s.i2};
}

EnergyTrace energy_trace(const ModalTrajectory& traj, const ModalOperatorPair& pair,
                         const Kernel& kernel, const HistoryData& history,
                         const EnergyOptions& options) {
  if (!(options.big_m > 0.0) || !(options.alpha0 >= 0.0)) {
    throw Error(ErrorKind::parameter_domain, "functionals need M > 0 and alpha0 >= 0");
  }
  check_sample(traj, pair, history, 0);
  const double tol =
      options.tail_tolerance > 0.0 ? options.tail_tolerance : default_tail_tolerance(history);
  const std::size_t samples = traj.samples();
  const Tables tables = make_tables(traj, kernel, history, traj.steps(), tol, true);
  const double g0 = kernel.mass();
  const double factor = floor_factor(pair, kernel);

  std::vector<SampleSums> sums(samples);
  const auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t n = begin; n < samples; n += stride) {
      for (std::size_t k = 0; k < traj.modes(); ++k) {
        accumulate_mode(sums[n], traj, pair, history, g0, k, n, tables);
      }
    }
  };
  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  EnergyTrace trace;
  trace.big_m = options.big_m;
  trace.alpha0 = options.alpha0;
  for (auto* v : {&trace.t, &trace.e, &trace.e2, &trace.e_prime, &trace.i1, &trace.i2, &trace.i3,
                  &trace.floor}) {
    v->resize(samples);
  }
  for (std::size_t n = 0; n < samples; ++n) {
    const SampleSums& s = sums[n];
    trace.t[n] = traj.time(n);
    trace.e[n] = s.e;
    trace.e2[n] = s.e2;
    trace.e_prime[n] = s.e_prime;
    trace.i1[n] = s.i1;
    trace.i2[n] = s.i2;
    trace.i3[n] = (options.big_m + options.alpha0) * s.e + s.i1 + 0.5 * g0 * s.i2;
    trace.floor[n] = factor * s.floor_sum;
  }
  return trace;
}

void write_energy_csv(const EnergyTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << "t,E,E2,Eprime,I1,I2,I3\n";
  for (std::size_t n = 0; n < trace.size(); ++n) {
    out << format_double(trace.t[n]) << ',' << format_double(trace.e[n]) << ','
        << format_double(trace.e2[n]) << ',' << format_double(trace.e_prime[n]) << ','
        << format_double(trace.i1[n]) << ',' << format_double(trace.i2[n]) << ','
        << format_double(trace.i3[n]) << '\n';
  }
}

}  // namespace memdecay
