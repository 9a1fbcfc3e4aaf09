#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "memdecay/history.hpp"
#include "test_util.hpp"

using namespace memdecay;

namespace {

// int_t^inf g(s) phi(s - t) ds by brute-force panels, with phi supplied.
template <class F>
double oracle_tail(const Kernel& g, F phi, double t) {
  double total = 0.0;
  for (double lo = 0.0; lo < 1e7; lo = 2.0 * lo + 1.0) {
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double r) { return g.value(t + r) * phi(r); }, lo, 2.0 * lo + 1.0, 30, 1e-14, &err);
  }
  return total;
}

}  // namespace

TEST(History, CatalogShapes) {
  const HistoryData c(HistoryFamily::constant, {2.0}, {0.0});
  const HistoryData e(HistoryFamily::exponential, {2.0}, {0.0}, 0.5);
  const HistoryData b(HistoryFamily::bump, {-2.0}, {0.0}, 4.0);
  EXPECT_EQ(c.value(0, 7.0), 2.0);
  EXPECT_DOUBLE_EQ(e.value(0, 2.0), 2.0 * std::exp(-1.0));
  EXPECT_DOUBLE_EQ(b.value(0, 1.0), -1.5);
  EXPECT_EQ(b.value(0, 5.0), 0.0);
  for (const HistoryData* h : {&c, &e, &b}) {
    EXPECT_EQ(std::abs(h->initial_displacement(0)), 2.0);
    EXPECT_EQ(h->sup_abs(), 2.0);
  }
  EXPECT_ANY_THROW(HistoryData(HistoryFamily::exponential, {1.0}, {0.0}, 0.0));
  EXPECT_ANY_THROW(HistoryData(HistoryFamily::constant, {1.0, 2.0}, {0.0}));
}

TEST(History, M0Examples) {
  const HistoryData e(HistoryFamily::exponential, {1.0, 0.5}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(m0_case1(e, ModalOperatorPair({1.0, 1.0}, {1.0, 1.0})), std::sqrt(1.25));
  EXPECT_EQ(m0_case1(HistoryData::zero(3), ModalOperatorPair({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0})),
            0.0);
  const HistoryData c(HistoryFamily::constant, {1.0, 1.0}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(m0_case1(c, ModalOperatorPair({1.0, 1.0}, {2.0, 3.0})), std::sqrt(5.0));

  const HistoryData single(HistoryFamily::exponential, {1.0}, {0.0});
  EXPECT_DOUBLE_EQ(m0_case2(single, ModalOperatorPair({4.0}, {1.0})), 2.0);
  EXPECT_EQ(m0_case2(HistoryData::zero(1), ModalOperatorPair({4.0}, {1.0})), 0.0);
  EXPECT_DOUBLE_EQ(m0_case2(c, ModalOperatorPair({1.0, 4.0}, {1.0, 1.0})), std::sqrt(5.0));
}

TEST(History, TailIntegralExamples) {
  const Kernel g = make_exponential_kernel(1.0, 1.0);
  const HistoryData c(HistoryFamily::constant, {1.0}, {0.0});
  const HistoryData e(HistoryFamily::exponential, {1.0}, {0.0});
  EXPECT_NEAR(history_tail_integral(c, g, 0.0, 0), 1.0, 1e-10);
  EXPECT_NEAR(history_tail_integral(e, g, 0.0, 0), 0.5, 1e-10);
  EXPECT_EQ(history_tail_integral(HistoryData::zero(2), make_polynomial_kernel(1.0, 3.0), 1.0, 1),
            0.0);
}

TEST(History, ExponentialKernelClosedForms) {
  for (double lambda : {0.5, 1.0, 3.0}) {
    const double amp = 0.7;
    const Kernel g = make_exponential_kernel(amp, lambda);
    for (double t : {0.0, 0.3, 2.0, 10.0}) {
      const double base = amp * std::exp(-lambda * t);
      const double mu = 1.3;
      const double tau = 2.5;
      const HistoryData c(HistoryFamily::constant, {1.5}, {0.0});
      const HistoryData e(HistoryFamily::exponential, {1.5}, {0.0}, mu);
      const HistoryData b(HistoryFamily::bump, {1.5}, {0.0}, tau);
      const double want_c = 1.5 * base / lambda;
      const double want_e = 1.5 * base / (lambda + mu);
      const double want_b =
          1.5 * base * (1.0 / lambda - (1.0 - std::exp(-lambda * tau)) / (lambda * lambda * tau));
      // The tail is truncated to an absolute tolerance of 1e-10 (1 + sup|u0|).
      EXPECT_NEAR(history_tail_integral(c, g, t, 0), want_c, 1e-10 * (1.0 + 1.5));
      EXPECT_NEAR(history_tail_integral(e, g, t, 0), want_e, 1e-10 * (1.0 + 1.5));
      EXPECT_NEAR(history_tail_integral(b, g, t, 0), want_b, 1e-10 * (1.0 + 1.5));
    }
  }
}

TEST(History, PolynomialKernelAgainstQuadrature) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  for (double t : {0.0, 1.0, 25.0}) {
    const HistoryData e(HistoryFamily::exponential, {2.0}, {0.0}, 0.8);
    const double want = 2.0 * oracle_tail(g, [](double r) { return std::exp(-0.8 * r); }, t);
    EXPECT_NEAR(history_tail_integral(e, g, t, 0), want, 3e-10);
    const HistoryData b(HistoryFamily::bump, {2.0}, {0.0}, 3.0);
    const double want_b =
        2.0 * oracle_tail(g, [](double r) { return std::max(0.0, 1.0 - r / 3.0); }, t);
    EXPECT_NEAR(history_tail_integral(b, g, t, 0), want_b, 3e-10);
    const HistoryData c(HistoryFamily::constant, {2.0}, {0.0});
    EXPECT_NEAR(history_tail_integral(c, g, t, 0), 2.0 * g.tail(t), 1e-12);
  }
}

TEST(History, TailBoundedByMassTail) {
  const std::vector<Kernel> kernels = {make_polynomial_kernel(1.0, 3.0),
                                       make_polynomial_kernel(0.5, 2.5),
                                       make_exponential_kernel(0.5, 1.0)};
  for (const Kernel& g : kernels) {
    for (auto family : {HistoryFamily::constant, HistoryFamily::exponential, HistoryFamily::bump}) {
      const HistoryData h(family, {-1.7}, {0.0}, 2.0);
      for (double t : {0.0, 0.5, 4.0, 60.0}) {
        EXPECT_LE(std::abs(history_tail_integral(h, g, t, 0)), 1.7 * g.tail(t) * (1.0 + 1e-12));
      }
    }
  }
}

TEST(History, MomentsMatchQuadrature) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  const HistoryData e(HistoryFamily::exponential, {1.0}, {0.0}, 1.0);
  const double t = 2.0;
  const HistoryMoments m = history_moments(e, g, t, 1e-12);
  const auto phi = [](double r) { return std::exp(-r); };
  EXPECT_NEAR(m.g_phi, oracle_tail(g, phi, t), 1e-10);
  EXPECT_NEAR(m.g_phi2, oracle_tail(g, [&](double r) { return phi(r) * phi(r); }, t), 1e-10);
  double err = 0.0;
  double dg = 0.0;
  for (double lo = 0.0; lo < 1e6; lo = 2.0 * lo + 1.0) {
    dg += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double r) { return g.derivative(t + r) * phi(r); }, lo, 2.0 * lo + 1.0, 30, 1e-14,
        &err);
  }
  EXPECT_NEAR(m.dg_phi, dg, 1e-10);
}

TEST(History, DefaultTolerance) {
  const HistoryData e(HistoryFamily::exponential, {1.0, -3.0}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(default_tail_tolerance(e), 4e-10);
}
