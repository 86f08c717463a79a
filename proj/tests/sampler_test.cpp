#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "qiwave/energy.hpp"
#include "qiwave/errors.hpp"
#include "qiwave/sampler.hpp"

using namespace qiwave;

namespace {

EnsembleSpec spec(MeasureVariant v, int k, int n, std::uint64_t seed = 11) {
  EnsembleSpec e;
  e.variant = v;
  e.s = 2.0;
  e.sample_max_mode = k;
  e.truncation_n = n;
  e.master_seed = seed;
  return e;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moments moments(int count, F&& f) {
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = f(i);
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / count;
  const double var = (s2 / count - mean * mean) * count / (count - 1.0);
  return {mean, std::sqrt(var / count)};
}

}  // namespace

TEST(Sigma, LatticeSums) {
  EXPECT_DOUBLE_EQ(sigma_n(0), 1.0);
  EXPECT_DOUBLE_EQ(sigma_n(1), 3.0);
  EXPECT_NEAR(sigma_n(2), 77.0 / 15.0, 1e-14);
  EXPECT_EQ(sigma_tilde_n(0, 2.0), 0.0);
  EXPECT_NEAR(sigma_tilde_n(1, 2.0), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(sigma_tilde_n(2, 2.0), 4.0 / 3.0 + 16.0 / 11.0 + 64.0 / 69.0, 1e-14);
}

TEST(Sigma, LogarithmicGrowth) {
  std::vector<double> sig;
  for (int n : {64, 128, 256, 512, 1024}) sig.push_back(sigma_n(n));
  for (std::size_t i = 1; i < sig.size(); ++i) EXPECT_GT(sig[i], sig[i - 1]);
  // Dyadic increments settle to a constant.
  const double d1 = sig[2] - sig[1], d2 = sig[3] - sig[2], d3 = sig[4] - sig[3];
  const double lo = std::min({d1, d2, d3}), hi = std::max({d1, d2, d3});
  EXPECT_LT((hi - lo) / lo, 0.02);
  EXPECT_LT(std::abs(d3 - d2), std::abs(d2 - d1) + 1e-12);
}

TEST(Sampler, DeterministicAndHermitian) {
  const auto e = spec(MeasureVariant::mu_s, 6, 6);
  const auto a = sample(e, 42);
  const auto b = sample(e, 42);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == sample(e, 43));
  EXPECT_EQ(a.u.hermitian_defect(), 0.0);
  EXPECT_EQ(a.v.hermitian_defect(), 0.0);
  EXPECT_EQ(a.u.max_mode(), 6);
}

TEST(Sampler, OrderIndependent) {
  const auto e = spec(MeasureVariant::mu_tilde_s, 4, 4);
  std::vector<std::uint64_t> order(64);
  std::iota(order.begin(), order.end(), 0);
  std::vector<PhaseState> serial;
  for (auto i : order) serial.push_back(sample(e, i));
  std::shuffle(order.begin(), order.end(), std::mt19937_64(5));
  for (auto i : order) EXPECT_EQ(sample(e, i), serial[i]);
}

TEST(Sampler, SecondMomentSingleMode) {
  const auto e = spec(MeasureVariant::mu_s, 1, 1);
  const auto m = moments(100000, [&](int i) { return std::norm(sample(e, i).u(1, 0)); });
  EXPECT_NEAR(m.mean, 1.0 / 8.0, 3.0 * m.se);
}

TEST(Sampler, TildeVarianceProfile) {
  const auto e = spec(MeasureVariant::mu_tilde_s, 2, 2);
  const auto mu = moments(40000, [&](int i) { return std::norm(sample(e, i).u(1, 1)); });
  const auto mv = moments(40000, [&](int i) { return std::norm(sample(e, i).v(2, 0)); });
  EXPECT_NEAR(mu.mean, 1.0 / (1.0 + 2.0 + 8.0), 3.5 * mu.se);
  EXPECT_NEAR(mv.mean, 1.0 / (1.0 + 16.0), 3.5 * mv.se);
}

TEST(Sampler, ZeroModeIsRealStandardNormal) {
  const auto e = spec(MeasureVariant::mu_s, 0, 0);
  const auto m = moments(50000, [&](int i) { return sample(e, i).u(0, 0).real(); });
  const auto m2 = moments(50000, [&](int i) { return std::pow(sample(e, i).v(0, 0).real(), 2); });
  EXPECT_NEAR(m.mean, 0.0, 3.5 * m.se);
  EXPECT_NEAR(m2.mean, 1.0, 3.5 * m2.se);
}

TEST(Sampler, WickMeanMatchesSigma) {
  // E ∫(J^s π_N u)^2 = σ_N, so the Wick-ordered quadratic has mean zero.
  const int n = 4;
  const auto e = spec(MeasureVariant::mu_s, 5, n);
  const auto m = moments(100000, [&](int i) {
    return wick_quadratic(sample(e, i).u, 2.0, n) + sigma_n(n);
  });
  EXPECT_NEAR(m.mean, sigma_n(n), 3.0 * m.se);
}

TEST(Sampler, BetaQuarticStableInWindow) {
  std::vector<Moments> ms;
  for (int k : {4, 8, 16}) {
    auto e = spec(MeasureVariant::mu_s_beta, k, k, 77 + k);
    e.beta = 2.0;
    ms.push_back(moments(2000, [&](int i) {
      const auto u = sample(e, i).u;
      return quartic_correction(u, 2.0, k, Equation::nlkg_beta(2.0)) / 1.5;
    }));
  }
  for (const auto& m : ms) EXPECT_TRUE(std::isfinite(m.mean));
  for (std::size_t i = 1; i < ms.size(); ++i) {
    const double se = std::hypot(ms[i].se, ms[0].se);
    EXPECT_NEAR(ms[i].mean, ms[0].mean, 4.0 * se);
  }
}

TEST(EnsembleSpec, Validation) {
  auto e = spec(MeasureVariant::mu_s, 4, 4);
  EXPECT_NO_THROW(e.validate());
  e.sample_max_mode = 3;
  EXPECT_THROW(e.validate(), ValidationError);
  e = spec(MeasureVariant::mu_s, 4, 4);
  e.s = 1.0;
  EXPECT_THROW(e.validate(), ValidationError);
  e = spec(MeasureVariant::mu_s_beta, 4, 4);
  e.beta = 0.5;
  EXPECT_THROW(e.validate(), ValidationError);
  e = spec(MeasureVariant::mu_s, 4, 4);
  e.cutoff = EnergyCutoff::fixed(-1.0);
  EXPECT_THROW(e.validate(), ValidationError);
  EXPECT_THROW(measure_variant_from_string("mu_x"), ValidationError);
  EXPECT_EQ(measure_variant_from_string(to_string(MeasureVariant::mu_tilde_s)),
            MeasureVariant::mu_tilde_s);
}

TEST(StreamSeed, MixesBothInputs) {
  EXPECT_NE(stream_seed(0, 0), stream_seed(0, 1));
  EXPECT_NE(stream_seed(0, 1), stream_seed(1, 0));
  EXPECT_EQ(stream_seed(123, 456), stream_seed(123, 456));
}
