#include "memdecay/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "memdecay/error.hpp"
#include "memdecay/numerics.hpp"

namespace memdecay {

namespace {

// Kernel samples g(j dt) and per-unit-coefficient history tails at each t_n.
struct MemoryTables {
  std::vector<double> g;
  std::vector<double> tail;
};

MemoryTables make_tables(const SimConfig& config, std::size_t steps) {
  MemoryTables tables;
  tables.g.resize(steps + 1);
  tables.tail.resize(steps + 1);
  const double tol = config.effective_tail_tolerance();
  const bool no_history = config.history.sup_abs() == 0.0;
  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = static_cast<double>(n) * config.dt;
    tables.g[n] = config.kernel.value(t);
    tables.tail[n] = no_history ? 0.0 : history_shape_tail(config.history, config.kernel, t, tol);
  }
  return tables;
}

// Trapezoid part of the memory integral at step n over samples u[0..n].
double stored_convolution(const double* u, const double* g, std::size_t n, double dt) {
  if (n == 0) return 0.0;
  double acc = 0.5 * (g[0] * u[n] + g[n] * u[0]);
#pragma omp simd reduction(+ : acc)
  for (std::size_t j = 1; j < n; ++j) acc += g[j] * u[n - j];
  return dt * acc;
}

// u^{n+1} from u^n, u^{n-1} (n >= 1), or the Taylor bootstrap for n = 0.
double next_displacement(const double* u, std::size_t n, double a, double b, double dt,
                         double memory, double u1) {
  const double accel = -a * u[n] + b * memory;
  if (n == 0) return u[0] + dt * u1 + 0.5 * dt * dt * accel;
  return 2.0 * u[n] - u[n - 1] + dt * dt * accel;
}

// Centered differences scaled by 1/sqrt(1 - a dt^2/4): with this velocity the
// leapfrog conserves (a u^2 + v^2)/2 exactly for the free oscillator, so the
// sampled energy carries no O(dt^2) kinetic/elastic exchange ripple.
void fill_velocities(ModalTrajectory& traj, std::size_t mode, double a) {
  const auto u = traj.displacement(mode);
  auto v = traj.velocity(mode);
  const std::size_t steps = traj.steps();
  const double dt = traj.dt();
  v[0] = traj.history().initial_velocity(mode);
  const double scale = 1.0 / (2.0 * dt * std::sqrt(1.0 - 0.25 * a * dt * dt));
  for (std::size_t n = 1; n < steps; ++n) v[n] = (u[n + 1] - u[n - 1]) * scale;
  if (steps >= 2) {
    v[steps] = (3.0 * u[steps] - 4.0 * u[steps - 1] + u[steps - 2]) / (2.0 * dt);
  } else if (steps == 1) {
    v[1] = (u[1] - u[0]) / dt;
  }
}

// Integrates one mode; returns the first step index whose sample is not
// finite, or max() if the run is clean.
std::size_t integrate_mode(ModalTrajectory& traj, const SimConfig& config,
                           const MemoryTables& tables, std::size_t mode) {
  auto u = traj.displacement(mode);
  const double a = config.pair.a()[mode];
  const double b = config.pair.b()[mode];
  const double c = config.history.coefficients()[mode];
  const double u1 = config.history.initial_velocity(mode);
  const double dt = config.dt;
  u[0] = config.history.initial_displacement(mode);
  for (std::size_t n = 0; n < traj.steps(); ++n) {
    const double memory =
        stored_convolution(u.data(), tables.g.data(), n, dt) + c * tables.tail[n];
    u[n + 1] = next_displacement(u.data(), n, a, b, dt, memory, u1);
    if (!std::isfinite(u[n + 1])) return n + 1;
  }
  fill_velocities(traj, mode, a);
  return std::numeric_limits<std::size_t>::max();
}

}  // namespace

std::size_t SimConfig::steps() const {
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw Error(ErrorKind::config, "simulation needs dt > 0 and horizon > 0");
  }
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
    throw Error(ErrorKind::config, "horizon / dt must be an integer number of steps");
  }
  return static_cast<std::size_t>(rounded);
}

double SimConfig::effective_tail_tolerance() const {
  return tail_tolerance > 0.0 ? tail_tolerance : default_tail_tolerance(history);
}

void SimConfig::validate() const {
  if (pair.modes() != history.modes()) {
    throw Error(ErrorKind::config, "operator and history mode counts differ");
  }
  (void)steps();
  const double courant = dt * std::sqrt(pair.max_a());
  if (courant > cfl_limit) {
    throw Error(ErrorKind::cfl_violation,
                "dt * sqrt(max a_k) = " + format_double(courant) + " exceeds the CFL limit " +
                    format_double(cfl_limit));
  }
}

ModalTrajectory::ModalTrajectory(double dt, std::size_t steps, HistoryData history)
    : dt_(dt),
      steps_(steps),
      history_(std::move(history)),
      u_(history_.modes() * (steps + 1), 0.0),
      v_(history_.modes() * (steps + 1), 0.0) {}

double ModalTrajectory::displacement_at(std::size_t mode, double t) const {
  if (t < 0.0) return history_.value(mode, -t);
  const double x = t / dt_;
  const auto n = static_cast<std::size_t>(std::floor(x));
  if (n >= steps_) {
    if (x > static_cast<double>(steps_) * (1.0 + 1e-12)) {
      throw Error(ErrorKind::domain, "time beyond the simulated horizon");
    }
    return u(mode, steps_);
  }
  const double w = x - static_cast<double>(n);
  return (1.0 - w) * u(mode, n) + w * u(mode, n + 1);
}

bool ModalTrajectory::operator==(const ModalTrajectory& other) const {
  return dt_ == other.dt_ && steps_ == other.steps_ && u_ == other.u_ && v_ == other.v_;
}

double memory_convolution(const ModalTrajectory& traj, const Kernel& kernel,
                          const HistoryData& history, std::size_t mode, std::size_t n,
                          double tail_tolerance) {
  if (n > traj.steps() || mode >= traj.modes()) {
    throw Error(ErrorKind::domain, "memory_convolution: step or mode out of range");
  }
  std::vector<double> g(n + 1);
  for (std::size_t j = 0; j <= n; ++j) g[j] = kernel.value(traj.time(j));
  const double stored = stored_convolution(traj.displacement(mode).data(), g.data(), n, traj.dt());
  return stored + history_tail_integral(history, kernel, traj.time(n), mode, tail_tolerance);
}

void step(ModalTrajectory& traj, const SimConfig& config, std::size_t n) {
  if (n == 0 || n >= traj.steps()) {
    throw Error(ErrorKind::domain, "step needs 1 <= n < N; step 0 is the Taylor bootstrap");
  }
  for (std::size_t k = 0; k < traj.modes(); ++k) {
    const double memory = memory_convolution(traj, config.kernel, config.history, k, n,
                                             config.effective_tail_tolerance());
    auto u = traj.displacement(k);
    u[n + 1] = next_displacement(u.data(), n, config.pair.a()[k], config.pair.b()[k], config.dt,
                                 memory, config.history.initial_velocity(k));
  }
}

ModalTrajectory simulate(const SimConfig& config) {
  config.validate();
  const std::size_t steps = config.steps();
  const MemoryTables tables = make_tables(config, steps);
  ModalTrajectory traj(config.dt, steps, config.history);

  const std::size_t modes = config.pair.modes();
  std::vector<std::size_t> first_bad(modes, std::numeric_limits<std::size_t>::max());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(modes)));
  if (workers == 1) {
    for (std::size_t k = 0; k < modes; ++k) first_bad[k] = integrate_mode(traj, config, tables, k);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < modes; k += workers) {
          first_bad[k] = integrate_mode(traj, config, tables, k);
        }
      });
    }
  }
  const auto bad = std::min_element(first_bad.begin(), first_bad.end());
  if (*bad != std::numeric_limits<std::size_t>::max()) {
    const auto mode = static_cast<std::size_t>(bad - first_bad.begin()) + 1;
    throw InstabilityError(*bad, "non-finite displacement at step " + std::to_string(*bad) +
                                     " (mode " + std::to_string(mode) + ")");
  }
  return traj;
}

ModalTrajectory exponential_oracle(const SimConfig& config, unsigned substeps) {
  const auto* kernel = config.kernel.exponential();
  if (kernel == nullptr) {
    throw Error(ErrorKind::unsupported_oracle, "the augmented-ODE oracle needs an exponential kernel");
  }
  if (substeps == 0) throw Error(ErrorKind::parameter_domain, "substeps must be positive");
  if (config.pair.modes() != config.history.modes()) {
    throw Error(ErrorKind::config, "operator and history mode counts differ");
  }
  const std::size_t steps = config.steps();
  const double amp = kernel->amplitude;
  const double rate = kernel->rate;
  const HistoryData& history = config.history;

  // w(0) = int_0^inf a e^{-rate s} phi(s) ds for the catalog profiles.
  double w0_shape = amp / rate;
  if (history.family() == HistoryFamily::exponential) {
    w0_shape = amp / (rate + history.decay());
  } else if (history.family() == HistoryFamily::bump) {
    const double tau = history.decay();
    w0_shape = amp * (1.0 / rate - (-std::expm1(-rate * tau)) / (rate * rate * tau));
  }

  ModalTrajectory traj(config.dt, steps, history);
  const double h = config.dt / static_cast<double>(substeps);
  for (std::size_t k = 0; k < config.pair.modes(); ++k) {
    const double a = config.pair.a()[k];
    const double b = config.pair.b()[k];
    struct State {
      double u, v, w;
    };
    const auto rhs = [&](const State& s) {
      return State{s.v, -a * s.u + b * s.w, amp * s.u - rate * s.w};
    };
    State s{history.initial_displacement(k), history.initial_velocity(k),
            history.coefficients()[k] * w0_shape};
    auto u = traj.displacement(k);
    auto v = traj.velocity(k);
    u[0] = s.u;
    v[0] = s.v;
    for (std::size_t n = 0; n < steps; ++n) {
      for (unsigned i = 0; i < substeps; ++i) {
        const State k1 = rhs(s);
        const State k2 = rhs({s.u + 0.5 * h * k1.u, s.v + 0.5 * h * k1.v, s.w + 0.5 * h * k1.w});
        const State k3 = rhs({s.u + 0.5 * h * k2.u, s.v + 0.5 * h * k2.v, s.w + 0.5 * h * k2.w});
        const State k4 = rhs({s.u + h * k3.u, s.v + h * k3.v, s.w + h * k3.w});
        s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
        s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
        s.w += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
      }
      u[n + 1] = s.u;
      v[n + 1] = s.v;
    }
  }
  return traj;
}

void write_trajectory_csv(const ModalTrajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << "t,mode,u,v\n";
  for (std::size_t n = 0; n < traj.samples(); ++n) {
    const std::string t = format_double(traj.time(n));
    for (std::size_t k = 0; k < traj.modes(); ++k) {
      out << t << ',' << (k + 1) << ',' << format_double(traj.u(k, n)) << ','
          << format_double(traj.v(k, n)) << '\n';
    }
  }
}

}  // namespace memdecay
