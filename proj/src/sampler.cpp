#include "qiwave/sampler.hpp"

#include <cmath>
#include <numbers>

#include "qiwave/errors.hpp"

namespace qiwave {

std::string to_string(MeasureVariant v) {
  switch (v) {
    case MeasureVariant::mu_s: return "mu_s";
    case MeasureVariant::mu_tilde_s: return "mu_tilde_s";
    case MeasureVariant::mu_s_beta: return "mu_s_beta";
    case MeasureVariant::point_mass: return "point_mass";
  }
  return "?";
}

MeasureVariant measure_variant_from_string(const std::string& name) {
  if (name == "mu_s") return MeasureVariant::mu_s;
  if (name == "mu_tilde_s") return MeasureVariant::mu_tilde_s;
  if (name == "mu_s_beta") return MeasureVariant::mu_s_beta;
  if (name == "point_mass") return MeasureVariant::point_mass;
  throw ValidationError("unknown measure variant '" + name + "'");
}

void EnsembleSpec::validate() const {
  if (variant == MeasureVariant::point_mass) {
    if (!point) throw ValidationError("point_mass ensemble needs a state");
    return;
  }
  if (!(s > 1.0) || !std::isfinite(s)) throw ValidationError("s must be > 1", "/s");
  if (variant == MeasureVariant::mu_s_beta && !(beta > 1.0))
    throw ValidationError("beta must be > 1 for mu_s_beta", "/beta");
  if (truncation_n < 0) throw ValidationError("truncation_N must be >= 0", "/truncation_N");
  if (sample_max_mode < truncation_n)
    throw ValidationError("sample_max_mode must be >= truncation_N", "/sample_max_mode");
  if (cutoff.kind == EnergyCutoff::Kind::fixed && !(cutoff.r > 0.0))
    throw ValidationError("energy cutoff r must be positive", "/r");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(~index));
}

double GaussianStream::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianStream::real_normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform_open();
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Complex GaussianStream::complex_normal() {
  const double re = real_normal();
  const double im = real_normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

double u_weight(const EnsembleSpec& spec, int n1, int n2) {
  const double r2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
  switch (spec.variant) {
    case MeasureVariant::mu_s:
      return std::pow(1.0 + r2, (spec.s + 1.0) / 2.0);
    case MeasureVariant::mu_tilde_s:
      return std::sqrt(1.0 + r2 + std::pow(r2, spec.s + 1.0));
    case MeasureVariant::mu_s_beta:
      return std::pow(1.0 + r2, (spec.s + spec.beta) / 2.0);
    case MeasureVariant::point_mass:
      break;
  }
  return 1.0;
}

double v_weight(const EnsembleSpec& spec, int n1, int n2) {
  const double r2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
  switch (spec.variant) {
    case MeasureVariant::mu_s:
    case MeasureVariant::mu_s_beta:
      return std::pow(1.0 + r2, spec.s / 2.0);
    case MeasureVariant::mu_tilde_s:
      return std::sqrt(1.0 + std::pow(r2, spec.s));
    case MeasureVariant::point_mass:
      break;
  }
  return 1.0;
}

PhaseState sample(const EnsembleSpec& spec, std::uint64_t index) {
  if (spec.variant == MeasureVariant::point_mass) {
    if (!spec.point) throw ValidationError("point_mass ensemble needs a state");
    return *spec.point;
  }
  const int k = spec.sample_max_mode;
  GaussianStream rng(stream_seed(spec.master_seed, index));
  PhaseState p = PhaseState::zero(k);
  // Fill order over Λ: (0,0), then n2 = 0 with n1 = 1..K, then rows n2 =
  // 1..K with n1 = -K..K.  All g_n first, then all h_n.
  auto fill = [&](SpectralField& f, auto weight) {
    f.set(0, 0, rng.real_normal() / weight(0, 0));
    for (int n1 = 1; n1 <= k; ++n1)
      f.set(n1, 0, rng.complex_normal() / weight(n1, 0));
    for (int n2 = 1; n2 <= k; ++n2)
      for (int n1 = -k; n1 <= k; ++n1)
        f.set(n1, n2, rng.complex_normal() / weight(n1, n2));
  };
  fill(p.u, [&](int a, int b) { return u_weight(spec, a, b); });
  fill(p.v, [&](int a, int b) { return v_weight(spec, a, b); });
  return p;
}

double sigma_n(int n) {
  if (n < 0) throw std::invalid_argument("sigma_N: N must be >= 0");
  double s = 0.0;
  for (int n2 = -n; n2 <= n; ++n2)
    for (int n1 = -n; n1 <= n; ++n1)
      if (in_ball(n1, n2, n)) s += 1.0 / japanese_bracket_sq(n1, n2);
  return s;
}

double sigma_tilde_n(int n, double s) {
  if (n < 0) throw std::invalid_argument("sigma_tilde_N: N must be >= 0");
  if (!(s > 0.0)) throw std::invalid_argument("sigma_tilde_N: s must be > 0");
  double acc = 0.0;
  for (int n2 = -n; n2 <= n; ++n2)
    for (int n1 = -n; n1 <= n; ++n1) {
      if (!in_ball(n1, n2, n) || (n1 == 0 && n2 == 0)) continue;
      const double r2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
      acc += std::pow(r2, s) / (1.0 + r2 + std::pow(r2, s + 1.0));
    }
  return acc;
}

}  // namespace qiwave
