#include "qiwave/measures.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "qiwave/energy.hpp"

namespace qiwave {

DensityValue weighted_density(const PhaseState& p, double s, int n, double r,
                              const Equation& eq) {
  DensityValue d;
  d.indicator = truncated_energy(p, n, eq) <= r;
  switch (eq.kind) {
    case Equation::Kind::nlkg:
      d.log_weight = -quartic_correction(p.u, s, n, eq);
      break;
    case Equation::Kind::nlw:
      d.log_weight = -quartic_correction(p.u, s, n, eq) -
                     0.25 * quartic_integral(truncate(p.u, n));
      break;
    case Equation::Kind::nlkg_beta:
      d.log_weight = -quartic_correction(p.u, s, n, eq);
      break;
  }
  d.weight = d.indicator ? std::exp(d.log_weight) : 0.0;
  return d;
}

double kakutani_term(double s, int n1, int n2, Marginal m) {
  const double r2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
  if (r2 == 0.0) return 0.0;
  // Both inverse variances divided by |n|^{2e}, e = s+1 (u) or s (v):
  //   a = ⟨n⟩^{2e} / |n|^{2e} = 1 + expm1(e·log1p(1/|n|^2))
  //   b = 1 + c,  c = (1 + |n|^2)/|n|^{2s+2}  (u)  or  |n|^{-2s}  (v)
  // and S = ((b - a)/(b + a))^2 with b - a = c - expm1(·).
  const double e = m == Marginal::u ? s + 1.0 : s;
  const double x = std::expm1(e * std::log1p(1.0 / r2));
  const double c = m == Marginal::u ? (1.0 + r2) * std::pow(r2, -(s + 1.0))
                                    : std::pow(r2, -s);
  const double q = (c - x) / (2.0 + c + x);
  return q * q;
}

double kakutani_term_direct(double s, int n1, int n2, Marginal m, double sigma) {
  const double r2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
  const double scale = std::pow(1.0 + r2, sigma);
  double lam, lam_t;
  if (m == Marginal::u) {
    lam = scale / std::pow(1.0 + r2, s + 1.0);
    lam_t = scale / (1.0 + r2 + std::pow(r2, s + 1.0));
  } else {
    lam = scale / std::pow(1.0 + r2, s);
    lam_t = scale / (1.0 + std::pow(r2, s));
  }
  const double q = (lam - lam_t) / (lam + lam_t);
  return q * q;
}

KakutaniTable kakutani_terms(double s, int n, Marginal m) {
  if (!(s > 0.0)) throw std::invalid_argument("kakutani_terms: s must be > 0");
  if (n < 0) throw std::invalid_argument("kakutani_terms: N must be >= 0");
  struct Shell {
    int count = 0;
    int a = 0, b = 0;  // one lattice point on the shell
  };
  std::map<int, Shell> shells;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      if ((a || b) && in_ball(a, b, n)) {
        auto& sh = shells[a * a + b * b];
        if (sh.count++ == 0) sh.a = a, sh.b = b;
      }
  KakutaniTable t;
  t.s = s;
  t.n = n;
  t.marginal = m;
  double acc = 0.0;
  for (const auto& [r2, shell] : shells) {
    KakutaniShell sh;
    sh.radius_sq = r2;
    sh.multiplicity = shell.count;
    sh.term = kakutani_term(s, shell.a, shell.b, m);
    sh.weighted = shell.count * sh.term;
    acc += sh.weighted;
    sh.partial_sum = acc;
    t.shells.push_back(sh);
  }
  t.total = acc;
  return t;
}

}  // namespace qiwave
