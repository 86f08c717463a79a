#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qiwave/energy.hpp"
#include "qiwave/measures.hpp"
#include "qiwave/sampler.hpp"
#include "test_util.hpp"

using namespace qiwave;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// S straight from the raw variances.
double kakutani_oracle(double s, double r2, Marginal m) {
  double lam, lam_t;
  if (m == Marginal::u) {
    lam = std::pow(1.0 + r2, -(s + 1.0));
    lam_t = 1.0 / (1.0 + r2 + std::pow(r2, s + 1.0));
  } else {
    lam = std::pow(1.0 + r2, -s);
    lam_t = 1.0 / (1.0 + std::pow(r2, s));
  }
  const double q = (lam - lam_t) / (lam + lam_t);
  return q * q;
}

}  // namespace

TEST(WeightedDensity, ZeroStateHasUnitWeight) {
  for (const auto& eq : {Equation::nlkg(), Equation::nlw(), Equation::nlkg_beta(2.0)}) {
    const auto d = weighted_density(PhaseState::zero(4), 2.0, 4, 0.5, eq);
    EXPECT_TRUE(d.indicator);
    EXPECT_EQ(d.weight, 1.0);
  }
}

TEST(WeightedDensity, ConstantField) {
  // u = 1, N = 1: F = 3/2 - (3/2)σ_1 = -3 and E_1 = 1/2 + 1/4.
  const PhaseState p(SpectralField::constant(1.0), SpectralField(1));
  const auto d = weighted_density(p, 2.0, 1, 10.0);
  EXPECT_TRUE(d.indicator);
  EXPECT_NEAR(d.log_weight, 3.0, 1e-13);
  EXPECT_NEAR(d.weight, std::exp(3.0), 1e-12);
  const auto cut = weighted_density(p, 2.0, 1, 0.5);
  EXPECT_FALSE(cut.indicator);
  EXPECT_EQ(cut.weight, 0.0);
  EXPECT_NEAR(cut.log_weight, 3.0, 1e-13);
}

TEST(WeightedDensity, IndicatorTracksTruncatedEnergy) {
  const auto p = qiwave::testing::random_state(5, 11, 2.0, 1.0, 0.3);
  const double en = truncated_energy(p, 4, Equation::nlkg());
  EXPECT_TRUE(weighted_density(p, 2.0, 4, en * (1 + 1e-12)).indicator);
  EXPECT_FALSE(weighted_density(p, 2.0, 4, en * (1 - 1e-12)).indicator);
  EXPECT_TRUE(weighted_density(p, 2.0, 4, kInf).indicator);
  EXPECT_NEAR(weighted_density(p, 2.0, 4, kInf).log_weight,
              -quartic_correction(p.u, 2.0, 4), 1e-12);
}

TEST(WeightedDensity, NlwAddsQuarticFactor) {
  const auto p = qiwave::testing::random_state(4, 12, 2.0, 1.0, 0.4);
  const auto eq = Equation::nlw();
  const double expected = -quartic_correction(p.u, 2.0, 3, eq) -
                          0.25 * quartic_integral(truncate(p.u, 3));
  EXPECT_NEAR(weighted_density(p, 2.0, 3, kInf, eq).log_weight, expected, 1e-12);
}

TEST(Kakutani, UnitModeExample) {
  EXPECT_EQ(kakutani_term(2.0, 0, 0, Marginal::u), 0.0);
  EXPECT_EQ(kakutani_term(2.0, 0, 0, Marginal::v), 0.0);
  EXPECT_NEAR(kakutani_term(2.0, 1, 0, Marginal::u), 25.0 / 121.0, 1e-15);
  // v: 1/4 vs 1/2.
  EXPECT_NEAR(kakutani_term(2.0, 0, 1, Marginal::v), 1.0 / 9.0, 1e-15);
}

TEST(Kakutani, MatchesRawVarianceRatio) {
  const int pts[][2] = {{1, 0}, {1, 1}, {2, 1}, {3, 2}, {7, 1}};
  for (double s : {0.4, 1.0, 2.0, 3.5})
    for (auto m : {Marginal::u, Marginal::v})
      for (const auto& n : pts) {
        const double r2 = n[0] * n[0] + n[1] * n[1];
        // The oracle's ratio q carries an absolute error of a few ulps.
        EXPECT_NEAR(std::sqrt(kakutani_term(s, n[0], n[1], m)),
                    std::sqrt(kakutani_oracle(s, r2, m)), 1e-15);
      }
}

TEST(Kakutani, IndependentOfCommonScaling) {
  for (int r2n : {1, 2, 3}) {
    const int n1 = r2n, n2 = 1;
    for (auto m : {Marginal::u, Marginal::v}) {
      const double a = kakutani_term_direct(2.0, n1, n2, m, 0.0);
      const double b = kakutani_term_direct(2.0, n1, n2, m, 2.5);
      EXPECT_NEAR(a, b, 1e-14);
      EXPECT_NEAR(kakutani_term(2.0, n1, n2, m), a, 1e-14);
    }
  }
}

TEST(Kakutani, AccurateFarOut) {
  // At |n| = 10^4 the direct form loses most digits; the S_n ≈ c^2/4
  // asymptote with the next correction pins the accurate form.
  const double r2 = 1e8;
  const double t = kakutani_term(2.0, 10000, 0, Marginal::v);
  // v, s = 2: a = (1 + 1/r2)^2, b = 1 + r2^-2, so b - a = -2/r2 exactly.
  const double diff = -2.0 / r2;
  const double sum = 2.0 + 2.0 / r2 + 2.0 / (r2 * r2);
  EXPECT_NEAR(t, (diff / sum) * (diff / sum), 1e-12 * t);
  EXPECT_GT(t, 0.0);
}

TEST(Kakutani, LatticeSymmetry) {
  for (auto m : {Marginal::u, Marginal::v}) {
    const double base = kakutani_term(1.3, 3, 2, m);
    for (int a : {3, -3})
      for (int b : {2, -2}) {
        EXPECT_EQ(kakutani_term(1.3, a, b, m), base);
        EXPECT_EQ(kakutani_term(1.3, b, a, m), base);
      }
  }
}

TEST(KakutaniTable, ShellsAndPartialSums) {
  const auto t = kakutani_terms(2.0, 5);
  int points = 0;
  double acc = 0.0;
  int prev = 0;
  for (const auto& sh : t.shells) {
    EXPECT_GT(sh.radius_sq, prev);
    prev = sh.radius_sq;
    EXPECT_LE(sh.radius_sq, 25);
    points += sh.multiplicity;
    acc += sh.weighted;
    EXPECT_NEAR(sh.weighted, sh.multiplicity * sh.term, 1e-16);
    EXPECT_NEAR(sh.partial_sum, acc, 1e-15);
  }
  // Lattice points in the disc of radius 5 minus the origin.
  EXPECT_EQ(points, 81 - 1);
  EXPECT_NEAR(t.total, acc, 1e-15);
  EXPECT_EQ(t.shells.front().radius_sq, 1);
  EXPECT_EQ(t.shells.front().multiplicity, 4);
  EXPECT_NEAR(t.shells.front().term, 25.0 / 121.0, 1e-15);
  // Brute force over the disc.
  double brute = 0.0;
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b)
      if (a * a + b * b <= 25 && (a || b)) brute += kakutani_oracle(2.0, a * a + b * b, Marginal::u);
  EXPECT_NEAR(t.total, brute, 1e-13);
}

TEST(KakutaniTable, DichotomyInS) {
  for (auto m : {Marginal::u, Marginal::v}) {
    const double a = kakutani_terms(2.0, 32, m).total;
    const double b = kakutani_terms(2.0, 64, m).total;
    const double c = kakutani_terms(2.0, 128, m).total;
    EXPECT_LT(c - b, 0.3 * (b - a));  // tail ~ N^-2
    const double x = kakutani_terms(0.4, 32, m).total;
    const double y = kakutani_terms(0.4, 64, m).total;
    const double z = kakutani_terms(0.4, 128, m).total;
    EXPECT_GT(y / x, 1.1);
    EXPECT_GT(z / y, 1.1);
  }
}

TEST(KakutaniTable, RejectsBadArguments) {
  EXPECT_THROW(kakutani_terms(0.0, 4), std::invalid_argument);
  EXPECT_THROW(kakutani_terms(2.0, -1), std::invalid_argument);
  EXPECT_TRUE(kakutani_terms(2.0, 0).shells.empty());
}
