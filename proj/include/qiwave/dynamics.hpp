#pragma once

#include <functional>
#include <string>

#include "qiwave/spectral_field.hpp"

namespace qiwave {

// Linear part of the equation: ∂_t v = -ω(n)^2 û_n + nonlinearity, with
//   nlkg       ω = ⟨n⟩
//   nlw        ω = |n|
//   nlkg_beta  ω = ⟨n⟩^β
struct Equation {
  enum class Kind { nlkg, nlw, nlkg_beta };
  Kind kind = Kind::nlkg;
  double beta = 2.0;

  static Equation nlkg() { return {Kind::nlkg, 2.0}; }
  static Equation nlw() { return {Kind::nlw, 2.0}; }
  static Equation nlkg_beta(double beta) { return {Kind::nlkg_beta, beta}; }

  double omega_squared(int n1, int n2) const;
};

std::string to_string(Equation::Kind k);
Equation::Kind equation_kind_from_string(const std::string& name);

struct ModelSpec {
  Equation equation;
  int truncation_n = 8;
};

struct IntegratorSpec {
  enum class Scheme { strang_splitting, rk4 };
  Scheme scheme = Scheme::strang_splitting;
  double dt = 1e-3;
};

std::string to_string(IntegratorSpec::Scheme s);
IntegratorSpec::Scheme scheme_from_string(const std::string& name);

// Exact flow of the linear part for time t, mode by mode.  The nlw zero mode
// is the shear û_0 + t v̂_0.
PhaseState linear_propagator(const PhaseState& p, double t,
                             const ModelSpec& model);

// π_N((π_N u)^3), computed on a grid of at least 4N+2 points so that no
// alias reaches a retained mode.  Returned on the window max(max_mode(u), N).
SpectralField cubic_nonlinearity(const SpectralField& u, int n);

// (v, L u - π_N((π_N u)^3)) with L = -ω^2.
PhaseState vector_field(const PhaseState& p, const ModelSpec& model);

// Called after every step with (step index, time, state); step 0 is the
// initial state.
using StepObserver = std::function<void(long, double, const PhaseState&)>;

// Number of steps evolve takes: ceil(|t_final| / dt), at least 1 unless
// t_final = 0.
long step_count(double t_final, double dt);

// Approximates Φ_N(t_final) p.  The step count is ceil(|t_final| / dt) and
// the step is t_final / count, so negative times run the flow backwards.
// Throws IntegrationError naming the first step that went non-finite.
PhaseState evolve(const PhaseState& p, double t_final, const ModelSpec& model,
                  const IntegratorSpec& integ,
                  const StepObserver& observer = {});

// ‖Φ_{N_small}(t) p - Φ_{N_large}(t) p‖_{H^σ × H^{σ-1}} at matched dt.
double truncation_error(const PhaseState& p, double t, int n_small,
                        int n_large, const ModelSpec& model,
                        const IntegratorSpec& integ, double sigma);

}  // namespace qiwave
