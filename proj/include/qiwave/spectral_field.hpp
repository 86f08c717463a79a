#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace qiwave {

using Complex = std::complex<double>;

// Fourier coefficients of a real field on T^2 = (R/2πZ)^2 with unit-volume
// normalisation, so that f(x) = Σ_n f̂_n e^{i n·x} and ∫ f = f̂_0.
//
// Coefficients are stored on the box |n1|, |n2| <= max_mode; everything
// outside the box is zero.  Hermitian symmetry f̂_{-n} = conj(f̂_n) is an
// invariant: every mutator writes a coefficient together with its partner.
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int max_mode);

  static SpectralField constant(double c);
  // a·cos(n·x) + b·sin(n·x) on the smallest window that holds n (or on
  // `max_mode` when it is larger).
  static SpectralField trig(int n1, int n2, double a, double b = 0.0,
                            int max_mode = 0);
  // Builds a field from a full box of coefficients in storage order; throws
  // ValidationError unless the data is Hermitian to `tol`.
  static SpectralField from_box(int max_mode, std::vector<Complex> coeffs,
                                double tol = 1e-12);

  int max_mode() const noexcept { return max_mode_; }
  int side() const noexcept { return 2 * max_mode_ + 1; }

  // Coefficient at n; zero outside the stored window.
  Complex operator()(int n1, int n2) const noexcept {
    if (!in_window(n1, n2)) return {};
    return coeffs_[index(n1, n2)];
  }
  // Sets f̂_n = c and f̂_{-n} = conj(c).  At n = 0 the value must be real.
  void set(int n1, int n2, Complex c);
  void add(int n1, int n2, Complex c) { set(n1, n2, (*this)(n1, n2) + c); }

  bool in_window(int n1, int n2) const noexcept {
    return n1 >= -max_mode_ && n1 <= max_mode_ && n2 >= -max_mode_ &&
           n2 <= max_mode_;
  }
  // Storage order: row-major in n2, i.e. index = (n2+K)*side + (n1+K).
  std::size_t index(int n1, int n2) const noexcept {
    return static_cast<std::size_t>(n2 + max_mode_) * side() +
           static_cast<std::size_t>(n1 + max_mode_);
  }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  // Same coefficients on another window (crops or zero-pads).
  SpectralField resized(int max_mode) const;
  // Smallest window holding every nonzero coefficient.
  int support_radius() const noexcept;
  bool is_zero() const noexcept;
  // max_n |f̂_{-n} - conj(f̂_n)|, plus |Im f̂_0|.
  double hermitian_defect() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double a);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) {
    return a += b;
  }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) {
    return a -= b;
  }
  friend SpectralField operator*(double a, SpectralField f) { return f *= a; }
  // Exact coefficientwise equality; windows may differ (implicit zeros).
  friend bool operator==(const SpectralField& a, const SpectralField& b);

 private:
  int max_mode_;
  std::vector<Complex> coeffs_;
};

// max_n |f̂_n - ĝ_n| over the union of both windows.
double max_abs_difference(const SpectralField& f, const SpectralField& g);
// Σ_n |f̂_n|^2  (= ∫ f^2 by Parseval).
double l2_norm_squared(const SpectralField& f);
// ∫ f g = Σ_n f̂_n conj(ĝ_n).
double inner_product(const SpectralField& f, const SpectralField& g);

// Phase-space point (u, v = ∂_t u).  Both fields share one window.
struct PhaseState {
  SpectralField u;
  SpectralField v;

  PhaseState() = default;
  PhaseState(SpectralField u_in, SpectralField v_in);

  int max_mode() const noexcept { return u.max_mode(); }
  static PhaseState zero(int max_mode) {
    return {SpectralField(max_mode), SpectralField(max_mode)};
  }
  friend bool operator==(const PhaseState& a, const PhaseState& b) {
    return a.u == b.u && a.v == b.v;
  }
};

// ‖(u,v)‖_{H^σ × H^{σ-1}}.
double sobolev_norm(const PhaseState& p, double sigma);
// The same norm of the difference p - q.
double sobolev_distance(const PhaseState& p, const PhaseState& q,
                        double sigma);

// Fourier multipliers.  All symbols except `derivative` are real and even in
// n; (in)^α of `derivative` keeps conjugate symmetry.
class Multiplier {
 public:
  enum class Kind {
    j_power,       // ⟨n⟩^σ
    d_power,       // |n|^σ, with |0|^σ = 0 for σ > 0
    pi,            // keep |n| <= N
    pi_perp,       // keep |n| > N
    dyadic_block,  // keep M <= ⟨n⟩ < 2M
    nonzero,       // drop n = 0
    derivative,    // (i n)^α
  };

  static Multiplier j_power(double sigma) { return {Kind::j_power, sigma, 0, {}}; }
  static Multiplier d_power(double sigma) { return {Kind::d_power, sigma, 0, {}}; }
  static Multiplier pi(int n) { return {Kind::pi, 0.0, n, {}}; }
  static Multiplier pi_perp(int n) { return {Kind::pi_perp, 0.0, n, {}}; }
  static Multiplier dyadic_block(int m) { return {Kind::dyadic_block, 0.0, m, {}}; }
  static Multiplier nonzero() { return {Kind::nonzero, 0.0, 0, {}}; }
  static Multiplier derivative(int a1, int a2) {
    return {Kind::derivative, 0.0, 0, {a1, a2}};
  }

  Kind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return exponent_; }
  int cutoff() const noexcept { return cutoff_; }
  std::array<int, 2> alpha() const noexcept { return alpha_; }

  // Symbol at n.  Throws DomainError for d_power with σ < 0 at n = 0.
  Complex symbol(int n1, int n2) const;
  bool is_radial() const noexcept { return kind_ != Kind::derivative; }

 private:
  Multiplier(Kind kind, double exponent, int cutoff, std::array<int, 2> alpha);

  Kind kind_;
  double exponent_;
  int cutoff_;
  std::array<int, 2> alpha_;
};

SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m);

// π_N f on the window min(max_mode, N).
SpectralField truncate(const SpectralField& f, int n);
PhaseState truncate(const PhaseState& p, int n);

inline bool in_ball(int n1, int n2, int n) noexcept {
  return n1 * n1 + n2 * n2 <= n * n;
}
inline double japanese_bracket_sq(int n1, int n2) noexcept {
  return 1.0 + n1 * n1 + n2 * n2;
}

enum class ProductPath { fft, direct };

// Exact Fourier coefficients of f·g on the window max_mode(f)+max_mode(g).
// The fft path evaluates both factors on a grid large enough that no alias
// lands on a retained mode; the direct path is the convolution sum.
SpectralField pointwise_product(const SpectralField& f, const SpectralField& g,
                                ProductPath path = ProductPath::fft);

// ∫_{T^2} f with vol(T^2) = 1, i.e. f̂_0.
double integrate(const SpectralField& f);

// max |f| over an equispaced grid of oversample·(2·max_mode+1) points per
// dimension.  A lower bound on sup|f| that converges as oversample grows.
double grid_sup_norm(const SpectralField& f, int oversample);

}  // namespace qiwave
