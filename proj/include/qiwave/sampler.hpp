#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include "qiwave/spectral_field.hpp"

namespace qiwave {

// Gaussian measure to draw from.  `point_mass` is the degenerate ensemble
// that always returns one fixed state; the Monte Carlo layer uses it for
// sanity runs.
enum class MeasureVariant { mu_s, mu_tilde_s, mu_s_beta, point_mass };

std::string to_string(MeasureVariant v);
MeasureVariant measure_variant_from_string(const std::string& name);

// Energy cutoff r of the measure 1{E_N <= r} dμ.  `auto_quantile` resolves
// to the 0.9-quantile of E_N over a 10^3-sample pilot run (see montecarlo).
struct EnergyCutoff {
  enum class Kind { infinite, fixed, auto_quantile };
  Kind kind = Kind::infinite;
  double r = std::numeric_limits<double>::infinity();

  static EnergyCutoff infinite() { return {}; }
  static EnergyCutoff fixed(double r) { return {Kind::fixed, r}; }
  static EnergyCutoff automatic() {
    return {Kind::auto_quantile, std::numeric_limits<double>::quiet_NaN()};
  }
  bool is_infinite() const noexcept { return kind == Kind::infinite; }
};

struct EnsembleSpec {
  MeasureVariant variant = MeasureVariant::mu_s;
  double s = 2.0;
  double beta = 2.0;  // mu_s_beta only
  int sample_max_mode = 8;
  EnergyCutoff cutoff;
  int truncation_n = 8;
  std::uint64_t master_seed = 0;
  std::shared_ptr<const PhaseState> point;  // point_mass only

  // Throws ValidationError on a broken invariant.
  void validate() const;
};

// 64-bit seed of the stream for draw `index`; a strong mix of both inputs.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index);

// Standard Gaussians from a seeded mt19937_64.  Box-Muller on the raw
// engine output, so the stream is fully specified by the seed.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double uniform_open();  // in (0, 1]
  double real_normal();   // N(0, 1)
  Complex complex_normal();  // Re, Im iid N(0, 1/2); E|g|^2 = 1
  std::uint64_t next_bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Draw `index` of the ensemble: û_n = g_n / w_u(n), v̂_n = h_n / w_v(n) on the
// box |n_i| <= sample_max_mode.  Pure function of (master_seed, index).
PhaseState sample(const EnsembleSpec& spec, std::uint64_t index);

// Per-mode weights w_u(n), w_v(n); the standard deviations are their
// reciprocals.
double u_weight(const EnsembleSpec& spec, int n1, int n2);
double v_weight(const EnsembleSpec& spec, int n1, int n2);

// σ_N = Σ_{|n| <= N} ⟨n⟩^{-2}.
double sigma_n(int n);
// σ̃_N = Σ_{|n| <= N} |n|^{2s} / (1 + |n|^2 + |n|^{2s+2}).
double sigma_tilde_n(int n, double s);

}  // namespace qiwave
