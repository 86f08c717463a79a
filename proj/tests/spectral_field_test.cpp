#include <gtest/gtest.h>

#include <cmath>

#include "qiwave/errors.hpp"
#include "qiwave/spectral_field.hpp"
#include "test_util.hpp"

using namespace qiwave;
using qiwave::testing::random_field;

namespace {

SpectralField cos1() { return SpectralField::trig(1, 0, 1.0); }

}  // namespace

TEST(SpectralField, StoresHermitianPairs) {
  SpectralField f(3);
  f.set(2, -1, Complex(1.0, 2.0));
  EXPECT_EQ(f(-2, 1), Complex(1.0, -2.0));
  EXPECT_EQ(f(5, 5), Complex(0.0, 0.0));
  EXPECT_THROW(f.set(0, 0, Complex(1.0, 1.0)), std::invalid_argument);
  EXPECT_EQ(f.hermitian_defect(), 0.0);
}

TEST(SpectralField, FromBoxRejectsNonHermitianData) {
  std::vector<Complex> box(9, Complex(0.0, 0.0));
  box[5] = 1.0;  // (1,0) without its partner
  EXPECT_THROW(SpectralField::from_box(1, box), ValidationError);
  box[3] = 1.0;
  EXPECT_NO_THROW(SpectralField::from_box(1, box));
}

TEST(SpectralField, ResizedKeepsCoefficients) {
  const auto f = random_field(4, 1);
  EXPECT_EQ(f.resized(7), f);
  EXPECT_EQ(f.resized(7).resized(4), f);
  EXPECT_EQ(f.support_radius(), 4);
}

TEST(Multiplier, BesselPowerOnSingleMode) {
  const auto out = apply_multiplier(cos1(), Multiplier::j_power(2.0));
  EXPECT_DOUBLE_EQ(max_abs_difference(out, 2.0 * cos1()), 0.0);
}

TEST(Multiplier, NonzeroRemovesMean) {
  EXPECT_TRUE(apply_multiplier(SpectralField::constant(5.0), Multiplier::nonzero()).is_zero());
}

TEST(Multiplier, ProjectorAnnihilatesHighModes) {
  SpectralField f(2);
  f.set(2, 0, 0.5);
  f.set(0, 2, Complex(0.1, 0.3));
  EXPECT_TRUE(apply_multiplier(f, Multiplier::pi(1)).is_zero());
}

TEST(Multiplier, RieszConventionAtZero) {
  const auto c = SpectralField::constant(3.0);
  EXPECT_TRUE(apply_multiplier(c, Multiplier::d_power(1.5)).is_zero());
  EXPECT_EQ(apply_multiplier(c, Multiplier::d_power(0.0)), c);
  EXPECT_THROW(apply_multiplier(c, Multiplier::d_power(-1.0)), DomainError);
  EXPECT_NO_THROW(apply_multiplier(cos1(), Multiplier::d_power(-1.0)));
}

TEST(Multiplier, DyadicBlockBoundaries) {
  // Keeps M^2 <= ⟨n⟩^2 < 4M^2.
  const auto b = Multiplier::dyadic_block(2);
  EXPECT_EQ(b.symbol(1, 1), Complex(0.0, 0.0));  // ⟨n⟩^2 = 3
  EXPECT_EQ(b.symbol(2, 0), Complex(1.0, 0.0));  // 5
  EXPECT_EQ(b.symbol(1, 2), Complex(1.0, 0.0));   // 6
  EXPECT_EQ(b.symbol(2, 2), Complex(1.0, 0.0));   // 9
  EXPECT_EQ(b.symbol(3, 2), Complex(1.0, 0.0));   // 14
  EXPECT_EQ(b.symbol(4, 0), Complex(0.0, 0.0));   // 17
}

TEST(Multiplier, DerivativeSymbol) {
  // ∂1 cos(x1) = -sin(x1)
  const auto d = apply_multiplier(cos1(), Multiplier::derivative(1, 0));
  EXPECT_DOUBLE_EQ(max_abs_difference(d, SpectralField::trig(1, 0, 0.0, -1.0)), 0.0);
  EXPECT_EQ(d.hermitian_defect(), 0.0);
}

TEST(Multiplier, LinearAndProjective) {
  const auto f = random_field(6, 2, 1.0);
  const auto g = random_field(6, 3, 1.0);
  for (const auto& m : {Multiplier::j_power(1.3), Multiplier::d_power(2.0),
                        Multiplier::pi(3), Multiplier::pi_perp(3),
                        Multiplier::dyadic_block(4), Multiplier::nonzero(),
                        Multiplier::derivative(2, 1)}) {
    const auto lhs = apply_multiplier(2.0 * f + g, m);
    const auto rhs = 2.0 * apply_multiplier(f, m) + apply_multiplier(g, m);
    EXPECT_LT(max_abs_difference(lhs, rhs), 1e-13);
    EXPECT_LT(lhs.hermitian_defect(), 1e-14);
  }
  const auto p = apply_multiplier(f, Multiplier::pi(4));
  EXPECT_EQ(apply_multiplier(p, Multiplier::pi(4)), p);
  const auto sum = p + apply_multiplier(f, Multiplier::pi_perp(4));
  EXPECT_EQ(max_abs_difference(sum, f), 0.0);
}

TEST(Truncate, UsesEuclideanBall) {
  const auto f = random_field(3, 4);
  const auto t = truncate(f, 2);
  EXPECT_EQ(t.max_mode(), 2);
  EXPECT_EQ(t(2, 0), f(2, 0));
  EXPECT_EQ(t(1, 1), f(1, 1));
  EXPECT_EQ(t(2, 1), Complex(0.0, 0.0));
  EXPECT_EQ(truncate(f, 10), f);
}

TEST(PointwiseProduct, CosineSquared) {
  const auto p = pointwise_product(cos1(), cos1());
  const auto expected = SpectralField::constant(0.5) + SpectralField::trig(2, 0, 0.5);
  EXPECT_LT(max_abs_difference(p, expected), 1e-15);
}

TEST(PointwiseProduct, ZeroAnnihilates) {
  EXPECT_TRUE(pointwise_product(random_field(3, 5), SpectralField(2)).is_zero());
}

TEST(PointwiseProduct, CosineCubedMatchesConvolution) {
  const auto c2 = pointwise_product(cos1(), cos1(), ProductPath::direct);
  const auto c3 = pointwise_product(c2, cos1(), ProductPath::direct);
  const auto expected = SpectralField::trig(1, 0, 0.75) + SpectralField::trig(3, 0, 0.25);
  EXPECT_LT(max_abs_difference(c3, expected), 1e-15);
  const auto fft = pointwise_product(pointwise_product(cos1(), cos1()), cos1());
  EXPECT_LT(max_abs_difference(fft, expected), 1e-15);
}

TEST(PointwiseProduct, DirectPathMatchesBruteForce) {
  const auto f = random_field(3, 6);
  const auto g = random_field(2, 7);
  const auto p = pointwise_product(f, g, ProductPath::direct);
  for (const auto& [n, c] : qiwave::testing::convolve(f, g))
    EXPECT_LT(std::abs(p(n.first, n.second) - c), 1e-13);
}

TEST(PointwiseProduct, FftMatchesDirect) {
  for (int k = 0; k <= 8; ++k) {
    const auto f = random_field(k, 10 + k);
    const auto g = random_field(std::max(0, k - 1), 40 + k);
    const auto a = pointwise_product(f, g, ProductPath::fft);
    const auto b = pointwise_product(f, g, ProductPath::direct);
    double scale = 0.0;
    for (auto c : b.coeffs()) scale = std::max(scale, std::abs(c));
    EXPECT_LT(max_abs_difference(a, b), 1e-12 * scale) << "k = " << k;
    EXPECT_LT(a.hermitian_defect(), 1e-14 * scale);
  }
}

TEST(Integrate, Examples) {
  EXPECT_EQ(integrate(cos1()), 0.0);
  EXPECT_EQ(integrate(SpectralField::constant(1.0)), 1.0);
  const double oracle = qiwave::testing::grid_integral(
      [](double x1, double) { return std::cos(x1) * std::cos(x1); }, 64);
  EXPECT_NEAR(integrate(pointwise_product(cos1(), cos1())), oracle, 1e-15);
  EXPECT_NEAR(oracle, 0.5, 1e-15);
}

TEST(Integrate, Parseval) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = random_field(7, 100 + seed, 0.5);
    const double lhs = integrate(pointwise_product(f, f));
    EXPECT_NEAR(lhs, l2_norm_squared(f), 1e-12 * l2_norm_squared(f));
  }
}

TEST(SobolevNorm, Examples) {
  EXPECT_EQ(sobolev_norm(PhaseState::zero(3), 1.7), 0.0);
  EXPECT_NEAR(sobolev_norm({cos1(), SpectralField(1)}, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(sobolev_norm({SpectralField(1), cos1()}, 1.0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(SobolevNorm, DistanceIsNormOfDifference) {
  const auto p = qiwave::testing::random_state(4, 1);
  const auto q = qiwave::testing::random_state(3, 2);
  const PhaseState d(p.u - q.u, p.v - q.v);
  EXPECT_NEAR(sobolev_distance(p, q, 0.5), sobolev_norm(d, 0.5), 1e-13);
}

TEST(GridSupNorm, Examples) {
  EXPECT_DOUBLE_EQ(grid_sup_norm(cos1(), 2), 1.0);
  EXPECT_EQ(grid_sup_norm(SpectralField(3), 4), 0.0);
  const auto f = SpectralField::constant(1.0) + cos1() + SpectralField::trig(0, 1, 1.0);
  EXPECT_NEAR(grid_sup_norm(f, 4), 3.0, 1e-14);
  EXPECT_THROW(grid_sup_norm(f, 1), std::invalid_argument);
}

TEST(GridSupNorm, LowerBoundThatConverges) {
  const auto f = random_field(5, 9, 1.0);
  // Fine direct evaluation as the reference sup.
  double ref = 0.0;
  const int m = 400;
  for (int j2 = 0; j2 < m; ++j2)
    for (int j1 = 0; j1 < m; ++j1)
      ref = std::max(ref, std::abs(qiwave::testing::eval_at(
                              f, 2 * M_PI * j1 / m, 2 * M_PI * j2 / m)));
  const double coarse = grid_sup_norm(f, 2);
  const double fine = grid_sup_norm(f, 16);
  EXPECT_LE(coarse, fine + 1e-12);
  EXPECT_LE(fine, ref * (1 + 1e-3));
  EXPECT_NEAR(fine, ref, 1e-2 * ref);
}
