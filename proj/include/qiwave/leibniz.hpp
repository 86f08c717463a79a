#pragma once

#include <array>
#include <vector>

#include "qiwave/spectral_field.hpp"

namespace qiwave {

// Smoothing operator whose s-th power appears in the energy: J = √(1-Δ)
// (Klein-Gordon) or D = √(-Δ) (wave).
enum class SmoothingOperator { bessel_j, riesz_d };

struct MultiIndex {
  int a1 = 0;
  int a2 = 0;
  int order() const noexcept { return a1 + a2; }
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

// c · ∂^α u · ∂^β u · ∂^γ u with α <= β <= γ (lexicographic).
struct LeibnizTerm {
  double coeff = 0.0;
  std::array<MultiIndex, 3> alpha;
};

// Expansion of the lower-order remainder
//     -Op^s(u^3) + 3 u^2 Op^s u  =  Σ c_{α,β,γ} ∂^α u ∂^β u ∂^γ u
// for an even integer s >= 0, where Op^s = (1-Δ)^{s/2} or (-Δ)^{s/2}.
// Generated by expanding Op^s as a polynomial in -Δ and distributing the
// derivatives with the multinomial Leibniz rule.  Every term has
// |α|, |β|, |γ| < s (for s >= 2) and |α|+|β|+|γ| <= s (J) or = s (D).
// Throws UnsupportedParameter unless s is a nonnegative even integer.
class LeibnizExpansion {
 public:
  LeibnizExpansion(int s, SmoothingOperator op);

  int s() const noexcept { return s_; }
  SmoothingOperator op() const noexcept { return op_; }
  const std::vector<LeibnizTerm>& terms() const noexcept { return terms_; }
  // Distinct multi-indices appearing in any term.
  std::vector<MultiIndex> derivatives() const;

  // Pointwise value of the remainder given grids of ∂^α u for every entry
  // of derivatives() (same order).
  std::vector<double> evaluate(
      const std::vector<std::vector<double>>& derivative_grids) const;

  // Cached, self-checked expansion.  The first request for a given (s, op)
  // compares the expansion against direct evaluation of
  // ∫ Op^s v · (-Op^s(u^3) + 3 u^2 Op^s u) on random fields and throws
  // std::logic_error if they disagree beyond 1e-10 relative.
  static const LeibnizExpansion& get(int s, SmoothingOperator op);

  // Relative mismatch of the self-check on a random band-limited pair.
  double self_check(std::uint64_t seed = 7) const;

 private:
  int s_;
  SmoothingOperator op_;
  std::vector<LeibnizTerm> terms_;
};

Multiplier smoothing_power(SmoothingOperator op, double s);

// ∫ Op^s v · (-Op^s(u^3) + 3 u^2 Op^s u) by exact products, without the
// expansion.  Independent route for the remainder integral.
double leibniz_remainder_direct(const SpectralField& u, const SpectralField& v,
                                int s, SmoothingOperator op);

// The same integral through the expansion, on a single quadrature grid.
double leibniz_remainder_expanded(const SpectralField& u,
                                  const SpectralField& v, int s,
                                  SmoothingOperator op);

}  // namespace qiwave
