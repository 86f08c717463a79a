#pragma once

#include <vector>

#include "qiwave/dynamics.hpp"
#include "qiwave/spectral_field.hpp"

namespace qiwave {

// Unnormalised density of the cutoff weighted measure against the Gaussian
// reference.  weight = indicator ? exp(log_weight) : 0.
struct DensityValue {
  double weight = 0.0;
  bool indicator = false;
  double log_weight = 0.0;
};

// indicator: truncated energy of the equation <= r (r may be +inf).
// log_weight: nlkg       -F_N(u)
//             nlw        -F̃_N(u) - ¼∫(π_N u)^4
//             nlkg_beta  -(3/2)∫(J^s π_N u)^2 (π_N u)^2
DensityValue weighted_density(const PhaseState& p, double s, int n, double r,
                              const Equation& eq = Equation::nlkg());

// Which pair of one-dimensional Gaussian marginals to compare:
//   u  ⟨n⟩^{-(2s+2)}  vs  (1 + |n|^2 + |n|^{2s+2})^{-1}
//   v  ⟨n⟩^{-2s}      vs  (1 + |n|^{2s})^{-1}
enum class Marginal { u, v };

// S_n = (λ_n - λ̃_n)^2 / (λ_n + λ̃_n)^2.  Evaluated in a form free of
// cancellation, so it stays accurate when the variances nearly agree.
double kakutani_term(double s, int n1, int n2, Marginal m);
// The same ratio straight from the variances, each scaled by ⟨n⟩^{2σ}.
// S does not depend on σ; this form exists to check that.
double kakutani_term_direct(double s, int n1, int n2, Marginal m, double sigma);

struct KakutaniShell {
  int radius_sq = 0;     // |n|^2
  int multiplicity = 0;  // lattice points on the shell
  double term = 0.0;     // S_n for one point
  double weighted = 0.0; // multiplicity · S_n
  double partial_sum = 0.0;  // Σ over shells up to and including this one
};

struct KakutaniTable {
  double s = 0.0;
  int n = 0;
  Marginal marginal = Marginal::u;
  std::vector<KakutaniShell> shells;  // nonempty shells 0 < |n| <= N, ascending
  double total = 0.0;
};

KakutaniTable kakutani_terms(double s, int n, Marginal m = Marginal::u);

}  // namespace qiwave
