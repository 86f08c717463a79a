#include "qiwave/leibniz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "qiwave/errors.hpp"
#include "qiwave/grid.hpp"
#include "qiwave/sampler.hpp"

namespace qiwave {

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

using Triple = std::array<MultiIndex, 3>;

Triple canonical(MultiIndex a, MultiIndex b, MultiIndex c) {
  Triple t{a, b, c};
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

Multiplier smoothing_power(SmoothingOperator op, double s) {
  return op == SmoothingOperator::bessel_j ? Multiplier::j_power(s)
                                           : Multiplier::d_power(s);
}

LeibnizExpansion::LeibnizExpansion(int s, SmoothingOperator op)
    : s_(s), op_(op) {
  if (s < 0 || s % 2 != 0)
    throw UnsupportedParameter("Leibniz expansion needs an even integer s >= 0, got " +
                               std::to_string(s));
  const int k = s / 2;
  std::map<Triple, double> acc;
  const MultiIndex zero{};
  // Op^s = Σ_j w_j (-Δ)^j,  (-Δ)^j = (-1)^j Σ_a C(j,a) ∂1^{2a} ∂2^{2(j-a)}.
  for (int j = 0; j <= k; ++j) {
    double w = 0.0;
    if (op == SmoothingOperator::bessel_j) w = binomial(k, j);
    else if (j == k) w = 1.0;
    if (w == 0.0) continue;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    for (int a = 0; a <= j; ++a) {
      const MultiIndex mu{2 * a, 2 * (j - a)};
      const double c = w * sign * binomial(j, a);
      // -∂^μ(u^3) by the multinomial Leibniz rule.
      for (int x1 = 0; x1 <= mu.a1; ++x1)
        for (int y1 = 0; y1 <= mu.a1 - x1; ++y1) {
          const int z1 = mu.a1 - x1 - y1;
          const double m1 = factorial(mu.a1) / (factorial(x1) * factorial(y1) * factorial(z1));
          for (int x2 = 0; x2 <= mu.a2; ++x2)
            for (int y2 = 0; y2 <= mu.a2 - x2; ++y2) {
              const int z2 = mu.a2 - x2 - y2;
              const double m2 =
                  factorial(mu.a2) / (factorial(x2) * factorial(y2) * factorial(z2));
              acc[canonical({x1, x2}, {y1, y2}, {z1, z2})] -= c * m1 * m2;
            }
        }
      // +3 u^2 ∂^μ u
      acc[canonical(zero, zero, mu)] += 3.0 * c;
    }
  }
  for (const auto& [alpha, c] : acc)
    if (c != 0.0) terms_.push_back({c, alpha});
}

std::vector<MultiIndex> LeibnizExpansion::derivatives() const {
  std::vector<MultiIndex> out;
  for (const auto& t : terms_)
    for (const auto& a : t.alpha)
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> LeibnizExpansion::evaluate(
    const std::vector<std::vector<double>>& derivative_grids) const {
  const auto derivs = derivatives();
  if (derivative_grids.size() != derivs.size())
    throw std::invalid_argument("wrong number of derivative grids");
  const std::size_t len = derivative_grids.empty() ? 0 : derivative_grids[0].size();
  std::vector<double> out(len, 0.0);
  auto slot = [&](const MultiIndex& a) {
    return static_cast<std::size_t>(
        std::lower_bound(derivs.begin(), derivs.end(), a) - derivs.begin());
  };
  for (const auto& t : terms_) {
    const auto& g0 = derivative_grids[slot(t.alpha[0])];
    const auto& g1 = derivative_grids[slot(t.alpha[1])];
    const auto& g2 = derivative_grids[slot(t.alpha[2])];
    for (std::size_t j = 0; j < len; ++j) out[j] += t.coeff * g0[j] * g1[j] * g2[j];
  }
  return out;
}

double LeibnizExpansion::self_check(std::uint64_t seed) const {
  GaussianStream rng(seed);
  const int k = 3;
  auto random_field = [&] {
    SpectralField f(k);
    f.set(0, 0, rng.real_normal());
    for (int n1 = 1; n1 <= k; ++n1) f.set(n1, 0, rng.complex_normal());
    for (int n2 = 1; n2 <= k; ++n2)
      for (int n1 = -k; n1 <= k; ++n1) f.set(n1, n2, rng.complex_normal());
    return f;
  };
  const SpectralField u = random_field();
  const SpectralField v = random_field();
  const double direct = leibniz_remainder_direct(u, v, s_, op_);
  const double expanded = leibniz_remainder_expanded(u, v, s_, op_);
  return std::abs(direct - expanded) / std::max(std::abs(direct), 1e-300);
}

const LeibnizExpansion& LeibnizExpansion::get(int s, SmoothingOperator op) {
  static std::mutex mutex;
  static std::map<std::pair<int, SmoothingOperator>, LeibnizExpansion> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(s, op);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  LeibnizExpansion e(s, op);
  const double mismatch = e.self_check();
  if (!(mismatch <= 1e-10))
    throw std::logic_error("Leibniz expansion self-check failed for s = " +
                           std::to_string(s) + " (relative mismatch " +
                           std::to_string(mismatch) + ")");
  return cache.emplace(key, std::move(e)).first->second;
}

double leibniz_remainder_direct(const SpectralField& u, const SpectralField& v,
                                int s, SmoothingOperator op) {
  const Multiplier ops = smoothing_power(op, s);
  const SpectralField u2 = pointwise_product(u, u);
  SpectralField rem = apply_multiplier(pointwise_product(u2, u), ops);
  rem *= -1.0;
  SpectralField lead = pointwise_product(u2, apply_multiplier(u, ops));
  lead *= 3.0;
  rem += lead;
  return inner_product(apply_multiplier(v, ops), rem);
}

double leibniz_remainder_expanded(const SpectralField& u,
                                  const SpectralField& v, int s,
                                  SmoothingOperator op) {
  const LeibnizExpansion e(s, op);
  const int k = std::max(u.max_mode(), v.max_mode());
  const int m = quadrature_grid(4 * k);
  std::vector<std::vector<double>> grids;
  for (const auto& a : e.derivatives())
    grids.push_back(to_grid(apply_multiplier(u, Multiplier::derivative(a.a1, a.a2)), m));
  const auto rem = e.evaluate(grids);
  const auto opv = to_grid(apply_multiplier(v, smoothing_power(op, s)), m);
  return grid_mean(opv, rem);
}

}  // namespace qiwave
