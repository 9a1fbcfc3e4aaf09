#include <cmath>
#include <numbers>
#include <random>

#include "memdecay/operators.hpp"
#include "test_util.hpp"

using namespace memdecay;
using std::numbers::pi;

TEST(Operators, LaplacianSameAsA) {
  const auto pair = ModalOperatorPair::laplacian_1d(4, 1.0, ModalOperatorPair::BChoice::same_as_a);
  ASSERT_EQ(pair.modes(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    const double w = static_cast<double>(k + 1) * pi;
    EXPECT_DOUBLE_EQ(pair.a()[k], w * w);
    EXPECT_EQ(pair.b()[k], pair.a()[k]);
  }
  const auto c = coercivity_constants(pair);
  EXPECT_EQ(c.a0, 1.0);
  EXPECT_EQ(c.a1, pi * pi);
  EXPECT_EQ(case_constants(pair).a2_case1, 1.0);
}

TEST(Operators, LaplacianIdentityB) {
  const auto pair = ModalOperatorPair::laplacian_1d(4, 1.0, ModalOperatorPair::BChoice::identity);
  const auto c = coercivity_constants(pair);
  EXPECT_EQ(c.a0, 1.0 / (pi * pi));
  EXPECT_EQ(c.a1, 1.0);
  const auto cases = case_constants(pair);
  EXPECT_EQ(cases.a2_case1, (4.0 * pi) * (4.0 * pi));
  EXPECT_EQ(cases.a2_case2, 1.0);
  EXPECT_TRUE(cases.case1_holds);
  EXPECT_TRUE(cases.case2_holds);
  EXPECT_TRUE(cases.case1_degenerates_in_limit);
}

TEST(Operators, SingleModeExamples) {
  const auto c = coercivity_constants(ModalOperatorPair({2.0}, {3.0}));
  EXPECT_EQ(c.a0, 1.5);
  EXPECT_EQ(c.a1, 3.0);
  const auto cases = case_constants(ModalOperatorPair({4.0}, {0.25}));
  EXPECT_EQ(cases.a2_case1, 16.0);
  EXPECT_EQ(cases.a2_case2, 4.0);
}

TEST(Operators, RejectsInvalidPairs) {
  EXPECT_ANY_THROW(ModalOperatorPair({}, {}));
  EXPECT_ANY_THROW(ModalOperatorPair({1.0, 2.0}, {1.0}));
  EXPECT_ANY_THROW(ModalOperatorPair({1.0, 0.0}, {1.0, 1.0}));
  EXPECT_ANY_THROW(ModalOperatorPair({1.0}, {-1.0}));
  EXPECT_ANY_THROW(ModalOperatorPair::laplacian_1d(0, 1.0, ModalOperatorPair::BChoice::identity));
}

TEST(Operators, RandomPairsSatisfyInequalities) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> log_eig(std::log(1e-2), std::log(1e4));
  std::uniform_int_distribution<int> modes(1, 32);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = modes(rng);
    std::vector<double> a(k);
    std::vector<double> b(k);
    for (int i = 0; i < k; ++i) {
      a[i] = std::exp(log_eig(rng));
      b[i] = std::exp(log_eig(rng));
    }
    const ModalOperatorPair pair(a, b);
    const auto c = coercivity_constants(pair);
    const auto cases = case_constants(pair);
    EXPECT_GE(cases.a2_case1, 1.0 / c.a0 * (1.0 - 1e-15));
    for (int v_trial = 0; v_trial < 100; ++v_trial) {
      double norm = 0.0;
      double bnorm = 0.0;
      double anorm = 0.0;
      for (int i = 0; i < k; ++i) {
        const double v = normal(rng);
        norm += v * v;
        bnorm += b[i] * v * v;
        anorm += a[i] * v * v;
      }
      const double ulp = 4.0 * std::numeric_limits<double>::epsilon();
      EXPECT_LE(c.a1 * norm, bnorm * (1.0 + ulp));
      EXPECT_LE(bnorm, c.a0 * anorm * (1.0 + ulp));
      EXPECT_LE(anorm, cases.a2_case1 * bnorm * (1.0 + ulp));
    }
  }
}

TEST(Operators, ScalingB) {
  const ModalOperatorPair base({1.0, 5.0, 9.0}, {2.0, 0.5, 3.0});
  const ModalOperatorPair scaled({1.0, 5.0, 9.0}, {8.0, 2.0, 12.0});
  const auto c0 = coercivity_constants(base);
  const auto c1 = coercivity_constants(scaled);
  EXPECT_DOUBLE_EQ(c1.a0, 4.0 * c0.a0);
  EXPECT_DOUBLE_EQ(c1.a1, 4.0 * c0.a1);
  EXPECT_DOUBLE_EQ(case_constants(scaled).a2_case1, case_constants(base).a2_case1 / 4.0);
}
