#include "qiwave/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qiwave/errors.hpp"
#include "qiwave/grid.hpp"

namespace qiwave {

SpectralField::SpectralField(int max_mode)
    : max_mode_(max_mode),
      coeffs_(static_cast<std::size_t>(2 * max_mode + 1) * (2 * max_mode + 1)) {
  if (max_mode < 0) throw std::invalid_argument("max_mode must be >= 0");
}

SpectralField SpectralField::constant(double c) {
  SpectralField f(0);
  f.set(0, 0, c);
  return f;
}

SpectralField SpectralField::trig(int n1, int n2, double a, double b,
                                  int max_mode) {
  const int k = std::max({std::abs(n1), std::abs(n2), max_mode});
  SpectralField f(k);
  if (n1 == 0 && n2 == 0) {
    f.set(0, 0, a);
    return f;
  }
  // a cos θ + b sin θ = ((a - i b)/2) e^{iθ} + ((a + i b)/2) e^{-iθ}
  f.set(n1, n2, Complex(a / 2.0, -b / 2.0));
  return f;
}

SpectralField SpectralField::from_box(int max_mode, std::vector<Complex> coeffs,
                                      double tol) {
  SpectralField f(max_mode);
  if (coeffs.size() != f.coeffs_.size())
    throw ValidationError("coefficient box has the wrong size");
  f.coeffs_ = std::move(coeffs);
  if (f.hermitian_defect() > tol)
    throw ValidationError("coefficients are not Hermitian symmetric");
  return f;
}

void SpectralField::set(int n1, int n2, Complex c) {
  if (!in_window(n1, n2))
    throw std::out_of_range("mode outside the stored window");
  if (n1 == 0 && n2 == 0) {
    if (c.imag() != 0.0)
      throw std::invalid_argument("zero mode of a real field must be real");
    coeffs_[index(0, 0)] = c;
    return;
  }
  coeffs_[index(n1, n2)] = c;
  coeffs_[index(-n1, -n2)] = std::conj(c);
}

SpectralField SpectralField::resized(int max_mode) const {
  SpectralField out(max_mode);
  const int k = std::min(max_mode, max_mode_);
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      out.coeffs_[out.index(n1, n2)] = coeffs_[index(n1, n2)];
  return out;
}

int SpectralField::support_radius() const noexcept {
  int r = 0;
  for (int n2 = -max_mode_; n2 <= max_mode_; ++n2)
    for (int n1 = -max_mode_; n1 <= max_mode_; ++n1)
      if (coeffs_[index(n1, n2)] != Complex{})
        r = std::max({r, std::abs(n1), std::abs(n2)});
  return r;
}

bool SpectralField::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](Complex c) { return c == Complex{}; });
}

double SpectralField::hermitian_defect() const noexcept {
  double d = std::abs(coeffs_[index(0, 0)].imag());
  for (int n2 = -max_mode_; n2 <= max_mode_; ++n2)
    for (int n1 = -max_mode_; n1 <= max_mode_; ++n1)
      d = std::max(d, std::abs(coeffs_[index(-n1, -n2)] -
                               std::conj(coeffs_[index(n1, n2)])));
  return d;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.max_mode_ > max_mode_) *this = resized(other.max_mode_);
  const int k = other.max_mode_;
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      coeffs_[index(n1, n2)] += other.coeffs_[other.index(n1, n2)];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.max_mode_ > max_mode_) *this = resized(other.max_mode_);
  const int k = other.max_mode_;
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      coeffs_[index(n1, n2)] -= other.coeffs_[other.index(n1, n2)];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

bool operator==(const SpectralField& a, const SpectralField& b) {
  const int k = std::max(a.max_mode(), b.max_mode());
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      if (a(n1, n2) != b(n1, n2)) return false;
  return true;
}

double max_abs_difference(const SpectralField& f, const SpectralField& g) {
  const int k = std::max(f.max_mode(), g.max_mode());
  double d = 0.0;
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      d = std::max(d, std::abs(f(n1, n2) - g(n1, n2)));
  return d;
}

double l2_norm_squared(const SpectralField& f) {
  double s = 0.0;
  for (Complex c : f.coeffs()) s += std::norm(c);
  return s;
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  const int k = std::min(f.max_mode(), g.max_mode());
  double s = 0.0;
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      s += (f(n1, n2) * std::conj(g(n1, n2))).real();
  return s;
}

PhaseState::PhaseState(SpectralField u_in, SpectralField v_in)
    : u(std::move(u_in)), v(std::move(v_in)) {
  if (u.max_mode() != v.max_mode()) {
    const int k = std::max(u.max_mode(), v.max_mode());
    u = u.resized(k);
    v = v.resized(k);
  }
}

namespace {

double weighted_sum(const SpectralField& f, double exponent) {
  const int k = f.max_mode();
  double s = 0.0;
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      s += std::pow(japanese_bracket_sq(n1, n2), exponent) *
           std::norm(f(n1, n2));
  return s;
}

}  // namespace

double sobolev_norm(const PhaseState& p, double sigma) {
  return std::sqrt(weighted_sum(p.u, sigma) + weighted_sum(p.v, sigma - 1.0));
}

double sobolev_distance(const PhaseState& p, const PhaseState& q,
                        double sigma) {
  return sobolev_norm(PhaseState(p.u - q.u, p.v - q.v), sigma);
}

Multiplier::Multiplier(Kind kind, double exponent, int cutoff,
                       std::array<int, 2> alpha)
    : kind_(kind), exponent_(exponent), cutoff_(cutoff), alpha_(alpha) {
  if (!std::isfinite(exponent)) throw std::invalid_argument("non-finite exponent");
  if (cutoff < 0) throw std::invalid_argument("negative cutoff");
  if (alpha[0] < 0 || alpha[1] < 0)
    throw std::invalid_argument("negative multi-index");
}

Complex Multiplier::symbol(int n1, int n2) const {
  const long r2 = static_cast<long>(n1) * n1 + static_cast<long>(n2) * n2;
  switch (kind_) {
    case Kind::j_power:
      return std::pow(1.0 + static_cast<double>(r2), exponent_ / 2.0);
    case Kind::d_power:
      if (r2 == 0) {
        if (exponent_ > 0.0) return 0.0;
        if (exponent_ == 0.0) return 1.0;
        throw DomainError("|n|^σ with σ < 0 is undefined at n = 0");
      }
      return std::pow(static_cast<double>(r2), exponent_ / 2.0);
    case Kind::pi:
      return r2 <= static_cast<long>(cutoff_) * cutoff_ ? 1.0 : 0.0;
    case Kind::pi_perp:
      return r2 <= static_cast<long>(cutoff_) * cutoff_ ? 0.0 : 1.0;
    case Kind::dyadic_block: {
      const long m2 = static_cast<long>(cutoff_) * cutoff_;
      return (1 + r2 >= m2 && 1 + r2 < 4 * m2) ? 1.0 : 0.0;
    }
    case Kind::nonzero:
      return r2 == 0 ? 0.0 : 1.0;
    case Kind::derivative: {
      double mag = 1.0;
      for (int j = 0; j < alpha_[0]; ++j) mag *= n1;
      for (int j = 0; j < alpha_[1]; ++j) mag *= n2;
      static constexpr Complex kIPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      return kIPowers[(alpha_[0] + alpha_[1]) % 4] * mag;
    }
  }
  return 0.0;
}

SpectralField apply_multiplier(const SpectralField& f, const Multiplier& m) {
  const int k = f.max_mode();
  SpectralField out(k);
  if (m.kind() == Multiplier::Kind::d_power && m.exponent() < 0.0) {
    if (f(0, 0) != Complex{})
      throw DomainError("D^σ with σ < 0 applied to a field with nonzero mean");
  }
  // Radial symbols depend on |n|^2 only; evaluate each shell once.
  std::vector<Complex> shell;
  std::vector<char> known;
  if (m.is_radial()) {
    shell.resize(static_cast<std::size_t>(2 * k * k + 1));
    known.assign(shell.size(), 0);
  }
  auto value = [&](int n1, int n2) -> Complex {
    if (!m.is_radial()) return m.symbol(n1, n2);
    const std::size_t r2 = static_cast<std::size_t>(n1 * n1 + n2 * n2);
    if (!known[r2]) {
      shell[r2] = (r2 == 0 && m.kind() == Multiplier::Kind::d_power &&
                   m.exponent() < 0.0)
                      ? Complex{}
                      : m.symbol(n1, n2);
      known[r2] = 1;
    }
    return shell[r2];
  };
  out.set(0, 0, (f(0, 0) * value(0, 0)).real());
  for (int n1 = 1; n1 <= k; ++n1) out.set(n1, 0, f(n1, 0) * value(n1, 0));
  for (int n2 = 1; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1) out.set(n1, n2, f(n1, n2) * value(n1, n2));
  return out;
}

SpectralField truncate(const SpectralField& f, int n) {
  const int k = std::min(f.max_mode(), n);
  SpectralField out(k);
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      if (in_ball(n1, n2, n)) out.set(n1, n2, f(n1, n2));
  return out;
}

PhaseState truncate(const PhaseState& p, int n) {
  return {truncate(p.u, n), truncate(p.v, n)};
}

SpectralField pointwise_product(const SpectralField& f, const SpectralField& g,
                                ProductPath path) {
  const int kf = f.max_mode();
  const int kg = g.max_mode();
  const int k = kf + kg;
  if (path == ProductPath::fft) {
    const int m = fft_size(2 * k + 1);
    auto a = to_grid(f, m);
    const auto b = to_grid(g, m);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] *= b[j];
    return from_grid(a, m, k);
  }
  SpectralField acc(k);
  std::vector<Complex> sum(acc.coeffs().size());
  for (int a2 = -kf; a2 <= kf; ++a2)
    for (int a1 = -kf; a1 <= kf; ++a1) {
      const Complex fa = f(a1, a2);
      if (fa == Complex{}) continue;
      for (int b2 = -kg; b2 <= kg; ++b2)
        for (int b1 = -kg; b1 <= kg; ++b1)
          sum[acc.index(a1 + b1, a2 + b2)] += fa * g(b1, b2);
    }
  // Write the Λ half only, so the result is Hermitian exactly.
  auto at = [&](int n1, int n2) { return sum[acc.index(n1, n2)]; };
  acc.set(0, 0, at(0, 0).real());
  for (int n1 = 1; n1 <= k; ++n1) acc.set(n1, 0, at(n1, 0));
  for (int n2 = 1; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1) acc.set(n1, n2, at(n1, n2));
  return acc;
}

double integrate(const SpectralField& f) { return f(0, 0).real(); }

double grid_sup_norm(const SpectralField& f, int oversample) {
  if (oversample < 2) throw std::invalid_argument("oversample must be >= 2");
  const auto values = to_grid(f, oversample * f.side());
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace qiwave
