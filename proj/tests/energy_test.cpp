#include <gtest/gtest.h>

#include <cmath>

#include "qiwave/dynamics.hpp"
#include "qiwave/energy.hpp"
#include "qiwave/errors.hpp"
#include "qiwave/sampler.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace qiwave;
using qiwave::testing::grid_integral;
using qiwave::testing::random_field;
using qiwave::testing::brute_chaos;
using qiwave::testing::central_difference;

namespace {

SpectralField cos1() { return SpectralField::trig(1, 0, 1.0); }
PhaseState u_only(SpectralField u) {
  const int k = u.max_mode();
  return {std::move(u), SpectralField(k)};
}

PhaseState flow_sample(int n, std::uint64_t index, double s_sample = 2.0) {
  EnsembleSpec e;
  e.s = s_sample;
  e.sample_max_mode = n;
  e.truncation_n = n;
  e.master_seed = 31;
  for (std::uint64_t i = index;; ++i) {
    auto p = sample(e, i);
    if (truncated_energy(p, n, Equation::nlkg()) <= 10.0) return p;
  }
}

}  // namespace

TEST(Hamiltonian, Examples) {
  EXPECT_EQ(hamiltonian(PhaseState::zero(2), Equation::nlkg()), 0.0);
  const auto u = SpectralField::trig(1, 0, 2.0);
  // Quadrature oracle for ∫u^2, ∫|∇u|^2, ∫u^4 of u = 2cos x1.
  const double u2 = grid_integral([](double x, double) { return 4 * std::pow(std::cos(x), 2); }, 32);
  const double g2 = grid_integral([](double x, double) { return 4 * std::pow(std::sin(x), 2); }, 32);
  const double u4 = grid_integral([](double x, double) { return 16 * std::pow(std::cos(x), 4); }, 32);
  EXPECT_NEAR(hamiltonian(u_only(u), Equation::nlkg()), 0.5 * (u2 + g2) + 0.25 * u4, 1e-13);
  EXPECT_NEAR(hamiltonian(u_only(u), Equation::nlkg()), 3.5, 1e-13);
  EXPECT_NEAR(hamiltonian(u_only(SpectralField::constant(1.0)), Equation::nlkg()), 0.75, 1e-15);
  EXPECT_NEAR(hamiltonian(u_only(u), Equation::nlw()), 0.5 * g2 + 0.25 * u4, 1e-13);
  EXPECT_NEAR(hamiltonian(u_only(u), Equation::nlkg_beta(2.0)), 0.5 * 4 * 2 * 0.25 * 4 + 1.5, 1e-13);
}

TEST(TruncatedEnergy, Examples) {
  EXPECT_EQ(truncated_energy(PhaseState::zero(1), 3, Equation::nlkg()), 0.0);
  EXPECT_NEAR(truncated_energy(u_only(SpectralField::trig(2, 0, 1.0)), 1, Equation::nlkg()),
              1.25, 1e-15);
  const auto p = qiwave::testing::random_state(3, 9, 1.0, 0.0, 0.3);
  for (auto eq : {Equation::nlkg(), Equation::nlw(), Equation::nlkg_beta(1.5)})
    EXPECT_NEAR(truncated_energy(p, 5, eq), hamiltonian(p, eq), 1e-13);
}

TEST(TruncatedEnergy, SplitsIntoLowEnergyAndHighNorm) {
  // E(π_N u, π_N v) + ½‖(π_N^⊥ u, π_N^⊥ v)‖^2_{H^1×L^2} = E_N(u, v).
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = qiwave::testing::random_state(7, 50 + seed, 1.0, 0.0, 0.4);
    const int n = 4;
    const PhaseState hi(apply_multiplier(p.u, Multiplier::pi_perp(n)),
                        apply_multiplier(p.v, Multiplier::pi_perp(n)));
    const double lhs = hamiltonian(truncate(p, n), Equation::nlkg()) +
                       0.5 * std::pow(sobolev_norm(hi, 1.0), 2);
    const double rhs = truncated_energy(p, n, Equation::nlkg());
    EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
  }
}

TEST(QuarticCorrection, Examples) {
  EXPECT_EQ(quartic_correction(SpectralField(3), 2.0, 2), 0.0);
  for (double s : {1.5, 2.0, 3.7})
    EXPECT_NEAR(quartic_correction(SpectralField::constant(1.0), s, 1), -3.0, 1e-14);
  EXPECT_EQ(quartic_correction(SpectralField::trig(2, 0, 1.0), 2.0, 1), 0.0);
}

TEST(QuarticCorrection, MatchesNestedExactProducts) {
  const auto u = random_field(6, 12, 1.0);
  const int n = 5;
  const auto un = truncate(u, n);
  const auto ju = apply_multiplier(un, Multiplier::j_power(2.0));
  const double nested = integrate(pointwise_product(pointwise_product(ju, ju, ProductPath::direct),
                                                    pointwise_product(un, un, ProductPath::direct),
                                                    ProductPath::direct));
  const double expected = 1.5 * nested - 1.5 * sigma_n(n) * l2_norm_squared(un);
  EXPECT_NEAR(quartic_correction(u, 2.0, n), expected, 1e-11 * std::abs(expected));
}

TEST(RenormalizedEnergy, Examples) {
  EXPECT_EQ(renormalized_energy(PhaseState::zero(2), 2.0, 2, Equation::nlkg()), 0.0);
  EXPECT_NEAR(renormalized_energy(u_only(SpectralField::constant(1.0)), 2.0, 1, Equation::nlkg()),
              -2.5, 1e-14);
  const auto p = qiwave::testing::random_state(5, 13, 1.0, 0.0, 0.5);
  const double quad = renormalized_energy(p, 2.0, 4, Equation::nlkg()) -
                      quartic_correction(p.u, 2.0, 4);
  EXPECT_NEAR(quad, 0.5 * std::pow(sobolev_norm(p, 3.0), 2), 1e-12 * quad);
}

TEST(RenormalizedEnergy, WaveAndBetaVariants) {
  const auto p = qiwave::testing::random_state(4, 14, 1.0, 0.0, 0.5);
  const int n = 3;
  const double s = 2.0;
  // nlw: H_{s,N} + E_N with D and σ̃_N.
  auto dsum = [](const SpectralField& f, double pw) {
    double acc = 0.0;
    const int k = f.max_mode();
    for (int b = -k; b <= k; ++b)
      for (int a = -k; a <= k; ++a)
        if (a || b) acc += std::pow(a * a + b * b, pw) * std::norm(f(a, b));
    return acc;
  };
  const auto un = truncate(p.u, n);
  const auto du = apply_multiplier(un, Multiplier::d_power(s));
  const double quartic = integrate(pointwise_product(pointwise_product(du, du), pointwise_product(un, un)));
  const double h = 0.5 * dsum(p.v, s) + 0.5 * dsum(p.u, s + 1) + 1.5 * quartic -
                   1.5 * sigma_tilde_n(n, s) * l2_norm_squared(un);
  EXPECT_NEAR(renormalized_energy(p, s, n, Equation::nlw()),
              h + truncated_energy(p, n, Equation::nlkg()), 1e-11);
  // beta: no σ subtraction.
  const auto ju = apply_multiplier(un, Multiplier::j_power(s));
  const double q = integrate(pointwise_product(pointwise_product(ju, ju), pointwise_product(un, un)));
  const double quad = 0.5 * std::pow(sobolev_norm({apply_multiplier(p.u, Multiplier::j_power(1.0)), p.v}, s + 1), 2);
  EXPECT_NEAR(renormalized_energy(p, s, n, Equation::nlkg_beta(2.0)), quad + 1.5 * q, 1e-11);
}

TEST(ChaosDecomposition, ConstantAndZero) {
  const double c = 1.3;
  const auto parts = chaos_decomposition(SpectralField::constant(c), 2.0, 3);
  EXPECT_NEAR(parts.j1, 1.5 * std::pow(c, 4), 1e-14);
  EXPECT_NEAR(parts.j2, 0.0, 1e-14);
  EXPECT_NEAR(parts.j3, 0.0, 1e-14);
  EXPECT_NEAR(parts.j1_tilde, parts.j1 - 1.5 * sigma_n(3) * c * c, 1e-14);
  const auto z = chaos_decomposition(SpectralField(4), 2.0, 4);
  EXPECT_EQ(z.j1, 0.0);
  EXPECT_EQ(z.j2, 0.0);
  EXPECT_EQ(z.j3, 0.0);
}

TEST(ChaosDecomposition, MatchesBruteForcePairings) {
  for (int n = 1; n <= 5; ++n) {
    const auto u = random_field(n + 1, 500 + n, 1.0);
    const auto parts = chaos_decomposition(u, 2.0, n, J3Route::enumeration);
    const auto oracle = brute_chaos(truncate(u, n), 2.0, n);
    const double scale = std::abs(oracle.j1) + std::abs(oracle.j2) + std::abs(oracle.j3);
    EXPECT_NEAR(parts.j1, oracle.j1, 1e-12 * scale);
    EXPECT_NEAR(parts.j2, oracle.j2, 1e-12 * scale);
    EXPECT_NEAR(parts.j3, oracle.j3, 1e-12 * scale);
  }
}

TEST(ChaosDecomposition, RoutesAgreeAndSumToQuartic) {
  const auto u = random_field(8, 77, 1.5);
  const int n = 7;
  const auto a = chaos_decomposition(u, 2.0, n, J3Route::enumeration);
  const auto b = chaos_decomposition(u, 2.0, n, J3Route::complement);
  const double full = quartic_correction(u, 2.0, n) + 1.5 * sigma_n(n) * l2_norm_squared(truncate(u, n));
  EXPECT_NEAR(a.j3, b.j3, 1e-10 * std::abs(full));
  EXPECT_NEAR(a.total(), full, 1e-10 * std::abs(full));
  EXPECT_NEAR(a.j1_tilde + a.j2 + a.j3, quartic_correction(u, 2.0, n), 1e-10 * std::abs(full));
}

TEST(QDecomposition, Examples) {
  const auto z = q_decomposition(u_only(random_field(3, 1)), 2.0, 3, Equation::nlkg());
  EXPECT_EQ(z.q1, 0.0);
  EXPECT_EQ(z.q2, 0.0);
  EXPECT_EQ(z.q3, 0.0);
  const auto q = q_decomposition({cos1(), cos1()}, 2.0, 1, Equation::nlkg());
  EXPECT_NEAR(q.q2, -1.5, 1e-14);
  EXPECT_THROW(q_decomposition({cos1(), cos1()}, 3.0, 1, Equation::nlkg()), UnsupportedParameter);
  EXPECT_THROW(q_decomposition({cos1(), cos1()}, 2.5, 1, Equation::nlkg()), UnsupportedParameter);
}

TEST(QDecomposition, MeanFreeInteractionForm) {
  // Q1 = 3∫P_{≠0}[(J^s u_N)^2] P_{≠0}[v_N u_N] with exact products.
  const auto p = qiwave::testing::random_state(5, 21, 1.0, 0.5, 0.5);
  const int n = 4;
  const auto un = truncate(p.u, n), vn = truncate(p.v, n);
  const auto ju = apply_multiplier(un, Multiplier::j_power(2.0));
  const auto a = apply_multiplier(pointwise_product(ju, ju), Multiplier::nonzero());
  const auto b = apply_multiplier(pointwise_product(vn, un), Multiplier::nonzero());
  const auto q = q_decomposition(p, 2.0, n, Equation::nlkg());
  EXPECT_NEAR(q.q1, 3.0 * inner_product(a, b), 1e-11 * std::abs(q.q1));
  EXPECT_NEAR(q.q3, q3_direct(p, 2.0, n, Equation::nlkg()), 1e-10 * std::abs(q.q3));
}

TEST(QDecomposition, DerivativeIdentity) {
  for (auto eq : {Equation::nlkg(), Equation::nlw(), Equation::nlkg_beta(2.0)})
    for (double s : {2.0, 4.0})
      for (int n : {4, 8}) {
        const auto p = flow_sample(n, 3);
        const double q = q_decomposition(p, s, n, eq).total();
        const double fd = central_difference(p, s, n, eq, 1e-4);
        EXPECT_NEAR(fd, q, 1e-5 * std::abs(q)) << to_string(eq.kind) << " s=" << s << " N=" << n;
      }
}

TEST(QDecomposition, SecondOrderRichardson) {
  const auto p = flow_sample(6, 5);
  const auto eq = Equation::nlkg();
  const double q = q_decomposition(p, 2.0, 6, eq).total();
  const double e1 = std::abs(central_difference(p, 2.0, 6, eq, 4e-2) - q);
  const double e2 = std::abs(central_difference(p, 2.0, 6, eq, 2e-2) - q);
  EXPECT_NEAR(e1 / e2, 4.0, 0.5);
}

TEST(QDecomposition, OrderZeroRecoversLowEnergyConservation) {
  const int n = 5;
  const auto p = flow_sample(n, 2);
  const auto un = truncate(p.u, n), vn = truncate(p.v, n);
  const double h = 1e-4;
  const ModelSpec m{Equation::nlkg(), n};
  const IntegratorSpec integ{IntegratorSpec::Scheme::rk4, h / 10};
  const auto fwd = truncate(evolve(p, h, m, integ), n);
  const auto bwd = truncate(evolve(p, -h, m, integ), n);
  auto half_norm = [](const PhaseState& x) { return 0.5 * std::pow(sobolev_norm(x, 1.0), 2); };
  const double ddt = (half_norm(fwd) - half_norm(bwd)) / (2 * h);
  const double rhs = -integrate(pointwise_product(vn, pointwise_product(un, pointwise_product(un, un))));
  EXPECT_NEAR(ddt, rhs, 1e-6 * std::abs(rhs));
  const double de = (hamiltonian(fwd, Equation::nlkg()) - hamiltonian(bwd, Equation::nlkg())) / (2 * h);
  EXPECT_NEAR(de, 0.0, 1e-7 * std::abs(rhs));
  const double q0 = q_decomposition(p, 0.0, n, Equation::nlkg()).total();
  EXPECT_NEAR(central_difference(p, 0.0, n, Equation::nlkg(), h), q0, 1e-6 * std::abs(q0));
}

TEST(EnergyReport, JsonFields) {
  const PhaseState p(cos1(), cos1());
  const auto r = energy_report(p, 2.0, 1, Equation::nlkg());
  const auto j = report_to_json(r);
  EXPECT_EQ(j["equation"], "nlkg");
  EXPECT_DOUBLE_EQ(j["Q2"].get<double>(), -1.5);
  EXPECT_DOUBLE_EQ(j["E_sN"].get<double>(), renormalized_energy(p, 2.0, 1, Equation::nlkg()));
  EXPECT_DOUBLE_EQ(j["J1"].get<double>() + j["J2"].get<double>() + j["J3"].get<double>(),
                   r.chaos.total());
  const auto odd = report_to_json(energy_report(p, 1.5, 1, Equation::nlkg()));
  EXPECT_TRUE(odd["Q1"].is_null());
}
