#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "memdecay/kernels.hpp"
#include "memdecay/numerics.hpp"
#include "test_util.hpp"

using namespace memdecay;

namespace {

double quad(const std::function<double(double)>& f, double lo, double hi) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 30, 1e-14, &err);
}

// Numerical integral on [0, inf) via doubling panels.
double quad_half_line(const std::function<double(double)>& f, double top) {
  double total = 0.0;
  for (double lo = 0.0; lo < top; lo = 2.0 * lo + 1.0) total += quad(f, lo, 2.0 * lo + 1.0);
  return total;
}

std::vector<Kernel> catalog() {
  return {make_polynomial_kernel(1.0, 3.0), make_polynomial_kernel(0.4, 2.5),
          make_polynomial_kernel(2.0, 4.0), make_exponential_kernel(0.5, 1.0),
          make_exponential_kernel(1.0, 3.0)};
}

}  // namespace

TEST(PolynomialKernel, ClosedForms) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  EXPECT_EQ(g.family(), KernelFamily::polynomial);
  EXPECT_DOUBLE_EQ(g.mass(), 0.5);
  EXPECT_DOUBLE_EQ(g.value(0.0), 1.0);
  EXPECT_DOUBLE_EQ(g.derivative(0.0), -3.0);
  EXPECT_DOUBLE_EQ(g.tail(1.0), 0.125);
  EXPECT_LT(g.tail(1e6), 1e-12);
}

TEST(PolynomialKernel, MassMatchesQuadrature) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  const double numeric = quad_half_line([&](double s) { return g.value(s); }, 1e6);
  EXPECT_NEAR(numeric, 0.5, 1e-11);
}

TEST(PolynomialKernel, RejectsBadParameters) {
  EXPECT_ERROR_KIND(make_polynomial_kernel(0.0, 3.0), ErrorKind::parameter_domain);
  EXPECT_ERROR_KIND(make_polynomial_kernel(1.0, 1.0), ErrorKind::parameter_domain);
  EXPECT_ERROR_KIND(make_polynomial_kernel(-1.0, 3.0), ErrorKind::parameter_domain);
}

TEST(ExponentialKernel, ClosedForms) {
  const Kernel g = make_exponential_kernel(0.5, 2.0);
  EXPECT_DOUBLE_EQ(g.mass(), 0.25);
  EXPECT_DOUBLE_EQ(g.value(1.0), 0.5 * std::exp(-2.0));
  EXPECT_DOUBLE_EQ(g.derivative(1.0), -std::exp(-2.0));
  EXPECT_DOUBLE_EQ(g.tail(1.0), 0.25 * std::exp(-2.0));
  EXPECT_ERROR_KIND(make_exponential_kernel(1.0, 0.0), ErrorKind::parameter_domain);
}

TEST(ExponentialKernel, ZeroAmplitudeIsMemoryless) {
  const Kernel g = make_exponential_kernel(0.0, 1.0);
  EXPECT_EQ(g.mass(), 0.0);
  EXPECT_EQ(g.value(3.0), 0.0);
  EXPECT_EQ(g.derivative(3.0), 0.0);
}

TEST(KernelProperties, CatalogInvariants) {
  const auto grid = log_spaced_grid(1e3, 200);
  for (const Kernel& g : catalog()) {
    for (double t : grid) {
      // Exponential kernels underflow to zero long before t = 1e3.
      if (t <= 100.0) EXPECT_GT(g.value(t), 0.0);
      EXPECT_GE(g.value(t), 0.0);
      EXPECT_LE(g.derivative(t), 0.0);
      const double h = 1e-4;
      const double dG = (g.tail(t + h) - g.tail(t - h)) / (2.0 * h);
      if (t > h) EXPECT_LE(std::abs(dG + g.value(t)), 1e-6 * g.value(t) + 1e-15) << t;
      EXPECT_LE(g.tail(t + 1.0), g.tail(t));
    }
  }
}

TEST(AdmissibleXi, PolynomialPair) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  const XiCertificate c = admissible_xi_p(g);
  EXPECT_DOUBLE_EQ(c.p, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.xi.value(0.0), 3.0);
  for (double t : {0.0, 1.0, 10.0}) {
    const double lhs = g.derivative(t);
    const double rhs = -c.xi.value(t) * std::pow(g.value(t), c.p);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
  }
  EXPECT_DOUBLE_EQ(admissible_xi_p(make_polynomial_kernel(1.0, 2.5)).p, 1.4);
  EXPECT_ERROR_KIND(admissible_xi_p(make_polynomial_kernel(1.0, 2.0)), ErrorKind::admissibility);
  EXPECT_ERROR_KIND(admissible_xi_p(make_exponential_kernel(1.0, 1.0)), ErrorKind::admissibility);
}

TEST(AdmissibleXi, EqualityAtLogSpacedPoints) {
  for (double q : {2.5, 3.0, 4.0, 7.0}) {
    for (double a : {0.3, 1.0, 2.0}) {
      const Kernel g = make_polynomial_kernel(a, q);
      const XiCertificate c = admissible_xi_p(g);
      for (double t : log_spaced_grid(1e3, 100)) {
        const double lhs = g.derivative(t);
        const double residual = lhs + c.xi.value(t) * std::pow(g.value(t), c.p);
        EXPECT_LE(std::abs(residual), 1e-10 * std::abs(lhs)) << q << ' ' << a << ' ' << t;
      }
    }
  }
}

TEST(Hypotheses, PassFailExamples) {
  const auto grid = default_hypothesis_grid();
  EXPECT_EQ(grid.size(), 512u);
  EXPECT_DOUBLE_EQ(grid.back(), 1e3);

  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  const HypothesisReport ok = check_hypotheses(g, XiWeight::constant(3.0), 4.0 / 3.0, 1.0, grid);
  EXPECT_TRUE(ok.h2_pass);
  EXPECT_TRUE(ok.h3_pass);
  EXPECT_TRUE(ok.all_pass());
  EXPECT_NEAR(ok.h3_margin, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(ok.h2_margin, 0.5);

  const HypothesisReport heavy =
      check_hypotheses(make_polynomial_kernel(3.0, 2.0), XiWeight::constant(1.0), 1.0, 1.0, grid);
  EXPECT_FALSE(heavy.h2_pass);
  EXPECT_DOUBLE_EQ(heavy.g0, 3.0);

  const HypothesisReport steep = check_hypotheses(g, XiWeight::constant(4.0), 4.0 / 3.0, 1.0, grid);
  EXPECT_TRUE(steep.h2_pass);
  EXPECT_FALSE(steep.h3_pass);
  // The violation -g^p shrinks below the tolerance at large t.
  ASSERT_FALSE(steep.h3_failures.empty());
  EXPECT_EQ(steep.h3_failures.front(), 0.0);
}

TEST(Hypotheses, SmallerXiAccepted) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  const auto r = check_hypotheses(g, XiWeight::constant(2.0), 4.0 / 3.0, 1.0,
                                  default_hypothesis_grid());
  EXPECT_TRUE(r.h3_pass);
  EXPECT_GT(r.h3_margin, 0.0);
}

TEST(Hypotheses, RejectsInadmissibleP) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  const auto grid = default_hypothesis_grid();
  EXPECT_FALSE(check_hypotheses(g, XiWeight::constant(1.0), 1.5, 1.0, grid).h3_pass);
  EXPECT_FALSE(check_hypotheses(g, XiWeight::constant(1.0), 0.9, 1.0, grid).h3_pass);
}

TEST(Hypotheses, IncreasingXiFails) {
  const Kernel g = make_exponential_kernel(1.0, 2.0);
  EXPECT_ANY_THROW(XiWeight::tabulated({0.0, 10.0}, {0.5, 1.0}));
  const auto r = check_hypotheses(g, XiWeight::constant(1.0), 1.0, 1.0, default_hypothesis_grid());
  EXPECT_TRUE(r.xi_nonincreasing);
}

TEST(TailWeight, Examples) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  const XiWeight xi = XiWeight::constant(3.0);
  EXPECT_DOUBLE_EQ(tail_h(g, xi, 0.0), 1.5);
  EXPECT_DOUBLE_EQ(tail_h(g, xi, 1.0), 0.375);
  const double numeric = 3.0 * quad_half_line([&](double s) { return g.value(1.0 + s); }, 1e6);
  EXPECT_NEAR(numeric, 0.375, 1e-11);
  const Kernel e = make_exponential_kernel(1.0, 1.0);
  for (double t : {0.0, 0.5, 3.0}) {
    EXPECT_NEAR(tail_h(e, XiWeight::constant(1.0), t), std::exp(-t), 1e-15);
  }
}

TEST(TailWeight, NonincreasingForConstantXi) {
  for (const Kernel& g : catalog()) {
    double previous = tail_h(g, XiWeight::constant(2.0), 0.0);
    for (double t : log_spaced_grid(1e3, 100)) {
      const double h = tail_h(g, XiWeight::constant(2.0), t);
      EXPECT_LE(h, previous);
      previous = h;
    }
  }
}

TEST(Lemma2, ClosedFormValues) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  const XiWeight xi = XiWeight::constant(3.0);
  const Lemma2Result third = lemma2_integral(g, xi, 4.0 / 3.0, 1.0 / 3.0);
  EXPECT_TRUE(third.converged);
  EXPECT_NEAR(third.value, 3.0, 1e-6);

  const Lemma2Result half = lemma2_integral(g, xi, 4.0 / 3.0, 0.5);
  EXPECT_TRUE(half.converged);
  EXPECT_NEAR(half.extrapolated, 6.0, 1e-6);

  const Lemma2Result slow = lemma2_integral(g, xi, 4.0 / 3.0, 0.6);
  EXPECT_TRUE(slow.converged);
  EXPECT_NEAR(slow.extrapolated, 15.0, 1e-4);

  const Lemma2Result boundary = lemma2_integral(g, xi, 4.0 / 3.0, 2.0 / 3.0);
  EXPECT_FALSE(boundary.converged);
}

TEST(Lemma2, ConvergesAtHalfTheAdmissibleSigma) {
  for (double q : {2.5, 3.0, 5.0}) {
    const Kernel g = make_polynomial_kernel(1.0, q);
    const XiCertificate c = admissible_xi_p(g);
    EXPECT_TRUE(lemma2_integral(g, c.xi, c.p, (2.0 - c.p) / 2.0).converged) << q;
  }
  const Kernel e = make_exponential_kernel(1.0, 1.0);
  EXPECT_TRUE(lemma2_integral(e, XiWeight::constant(1.0), 1.0, 0.5).converged);
}

TEST(Lemma2, RejectsSigmaOutsideUnitInterval) {
  const Kernel g = make_polynomial_kernel(1.0, 3.0);
  EXPECT_ERROR_KIND(lemma2_integral(g, XiWeight::constant(3.0), 4.0 / 3.0, 0.0),
                    ErrorKind::parameter_domain);
}

TEST(TabulatedKernel, ReproducesPolynomialSamples) {
  const Kernel exact = make_polynomial_kernel(1.0, 3.0);
  std::vector<double> s = log_spaced_grid(200.0, 400);
  std::vector<double> v;
  for (double x : s) v.push_back(exact.value(x));
  const Kernel table = make_tabulated_kernel(s, v);
  EXPECT_EQ(table.family(), KernelFamily::tabulated);
  const Kernel::Polynomial model = table.tabulated_tail_model();
  EXPECT_NEAR(model.exponent, 3.0, 1e-6);
  for (double t : {0.0, 0.37, 5.0, 50.0, 150.0, 1000.0}) {
    EXPECT_NEAR(table.value(t), exact.value(t), 1e-4 * exact.value(t)) << t;
    EXPECT_NEAR(table.tail(t), exact.tail(t), 1e-4 * exact.tail(t)) << t;
  }
  EXPECT_NEAR(table.derivative(10.0), exact.derivative(10.0), 1e-3 * std::abs(exact.derivative(10.0)));
}

TEST(TabulatedKernel, FlatTailIsUndefined) {
  std::vector<double> s = log_spaced_grid(100.0, 50);
  std::vector<double> v;
  for (double x : s) v.push_back(1.0 / (1.0 + x));
  const Kernel table = make_tabulated_kernel(s, v);
  EXPECT_ERROR_KIND(table.tail(1.0), ErrorKind::tail_undefined);
  EXPECT_ERROR_KIND(tail_h(table, XiWeight::constant(1.0), 0.0), ErrorKind::tail_undefined);
}

TEST(TabulatedKernel, RejectsInvalidTables) {
  EXPECT_ANY_THROW(make_tabulated_kernel({0.0, 1.0, 1.0}, {1.0, 0.5, 0.4}));
  EXPECT_ANY_THROW(make_tabulated_kernel({0.0, 1.0, 2.0}, {1.0, 1.5, 0.4}));
  EXPECT_ANY_THROW(make_tabulated_kernel({1.0, 2.0, 3.0}, {1.0, 0.5, 0.4}));
}

TEST(TabulatedKernel, LoadsCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "memdecay_kernel_csv";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "g.csv").string();
  {
    std::ofstream out(path);
    out << "s,g\n";
    for (double x : log_spaced_grid(100.0, 80)) out << format_double(x) << ',' << format_double(2.0 * std::pow(1.0 + x, -4.0)) << '\n';
  }
  const Kernel table = load_tabulated_kernel(path);
  EXPECT_NEAR(table.mass(), 2.0 / 3.0, 1e-3);
  {
    std::ofstream out(path);
    out << "t,g\n0,1\n";
  }
  EXPECT_ERROR_KIND(load_tabulated_kernel(path), ErrorKind::io);
}

TEST(XiWeightTest, TabulatedInterpolation) {
  const XiWeight xi = XiWeight::tabulated({0.0, 1.0, 3.0}, {2.0, 1.0, 0.5});
  EXPECT_EQ(xi.family(), XiWeight::Family::tabulated);
  EXPECT_DOUBLE_EQ(xi.value(0.5), 1.5);
  EXPECT_DOUBLE_EQ(xi.value(2.0), 0.75);
  EXPECT_DOUBLE_EQ(xi.value(10.0), 0.5);
  EXPECT_DOUBLE_EQ(xi.derivative(0.5), -1.0);
  EXPECT_DOUBLE_EQ(xi.derivative(10.0), 0.0);
  EXPECT_EQ(xi.knots().size(), 3u);
  EXPECT_ANY_THROW(XiWeight::constant(0.0));
}
