#include "qiwave/energy.hpp"

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "qiwave/errors.hpp"
#include "qiwave/grid.hpp"
#include "qiwave/sampler.hpp"

namespace qiwave {

namespace {

// Σ_n w(|n|^2) |f̂_n|^2 with w looked up once per shell.
template <class W>
double weighted_sum(const SpectralField& f, W&& w) {
  const int k = f.max_mode();
  std::unordered_map<int, double> shell;
  double acc = 0.0;
  const auto c = f.coeffs();
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1) {
      const double a = std::norm(c[f.index(n1, n2)]);
      if (a == 0.0) continue;
      const int r2 = n1 * n1 + n2 * n2;
      auto it = shell.find(r2);
      if (it == shell.end()) it = shell.emplace(r2, w(r2)).first;
      acc += it->second * a;
    }
  return acc;
}

double bracket_power(int r2, double p) { return std::pow(1.0 + r2, p); }
double riesz_power(int r2, double p) {
  if (r2 == 0) return p == 0.0 ? 1.0 : 0.0;
  return std::pow(static_cast<double>(r2), p);
}

// ∫(Op^s u)^2 u^2 for a band-limited u, on one exact quadrature grid.
double smoothed_quartic(const SpectralField& u, double s, SmoothingOperator op) {
  const int k = u.max_mode();
  const int m = quadrature_grid(4 * k);
  const auto g = to_grid(u, m);
  const auto a = to_grid(apply_multiplier(u, smoothing_power(op, s)), m);
  return grid_mean(a, a, g, g);
}

bool is_nlw(const Equation& eq) { return eq.kind == Equation::Kind::nlw; }

}  // namespace

double quadratic_energy(const PhaseState& p, const Equation& eq) {
  double uu = 0.0;
  switch (eq.kind) {
    case Equation::Kind::nlkg:
      uu = weighted_sum(p.u, [](int r2) { return 1.0 + r2; });
      break;
    case Equation::Kind::nlw:
      uu = weighted_sum(p.u, [](int r2) { return static_cast<double>(r2); });
      break;
    case Equation::Kind::nlkg_beta:
      uu = weighted_sum(p.u, [&](int r2) { return bracket_power(r2, eq.beta); });
      break;
  }
  return 0.5 * uu + 0.5 * l2_norm_squared(p.v);
}

double quartic_integral(const SpectralField& u) {
  const int m = quadrature_grid(4 * u.max_mode());
  const auto g = to_grid(u, m);
  return grid_mean(g, g, g, g);
}

double hamiltonian(const PhaseState& p, const Equation& eq) {
  return quadratic_energy(p, eq) + 0.25 * quartic_integral(p.u);
}

double truncated_energy(const PhaseState& p, int n, const Equation& eq) {
  return quadratic_energy(p, eq) + 0.25 * quartic_integral(truncate(p.u, n));
}

double renormalization_constant(int n, double s, const Equation& eq) {
  switch (eq.kind) {
    case Equation::Kind::nlkg: return sigma_n(n);
    case Equation::Kind::nlw: return sigma_tilde_n(n, s);
    case Equation::Kind::nlkg_beta: return 0.0;
  }
  return 0.0;
}

SmoothingOperator energy_operator(const Equation& eq) {
  return is_nlw(eq) ? SmoothingOperator::riesz_d : SmoothingOperator::bessel_j;
}

double quartic_correction(const SpectralField& u, double s, int n,
                          const Equation& eq) {
  const SpectralField un = truncate(u, n);
  if (un.is_zero()) return 0.0;
  const double c = renormalization_constant(n, s, eq);
  return 1.5 * smoothed_quartic(un, s, energy_operator(eq)) -
         1.5 * c * l2_norm_squared(un);
}

double wick_quadratic(const SpectralField& u, double s, int n,
                      const Equation& eq) {
  const SpectralField un = truncate(u, n);
  const double c = renormalization_constant(n, s, eq);
  const double q = is_nlw(eq)
                       ? weighted_sum(un, [&](int r2) { return riesz_power(r2, s); })
                       : weighted_sum(un, [&](int r2) { return bracket_power(r2, s); });
  return q - c;
}

double renormalized_energy(const PhaseState& p, double s, int n,
                           const Equation& eq) {
  switch (eq.kind) {
    case Equation::Kind::nlkg: {
      const double vv = weighted_sum(p.v, [&](int r2) { return bracket_power(r2, s); });
      const double uu =
          weighted_sum(p.u, [&](int r2) { return bracket_power(r2, s + 1.0); });
      return 0.5 * vv + 0.5 * uu + quartic_correction(p.u, s, n, eq);
    }
    case Equation::Kind::nlw: {
      const double vv = weighted_sum(p.v, [&](int r2) { return riesz_power(r2, s); });
      const double uu =
          weighted_sum(p.u, [&](int r2) { return riesz_power(r2, s + 1.0); });
      const double h = 0.5 * vv + 0.5 * uu + quartic_correction(p.u, s, n, eq);
      return h + truncated_energy(p, n, Equation::nlkg());
    }
    case Equation::Kind::nlkg_beta: {
      const double vv = weighted_sum(p.v, [&](int r2) { return bracket_power(r2, s); });
      const double uu =
          weighted_sum(p.u, [&](int r2) { return bracket_power(r2, s + eq.beta); });
      return 0.5 * vv + 0.5 * uu + quartic_correction(p.u, s, n, eq);
    }
  }
  return 0.0;
}

ChaosParts chaos_decomposition(const SpectralField& u, double s, int n,
                               J3Route route) {
  const SpectralField un = truncate(u, n);
  const int k = un.max_mode();

  struct Mode {
    int n1, n2;
    Complex c;
    double w;  // ⟨n⟩^s
  };
  std::vector<Mode> ball;
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1)
      if (in_ball(n1, n2, n))
        ball.push_back({n1, n2, un(n1, n2),
                        bracket_power(n1 * n1 + n2 * n2, 0.5 * s)});

  // J1 = (3/2) Σ⟨n⟩^{2s}|û_n|^2 · Σ|û_n|^2.
  double a2s = 0.0, a0 = 0.0, as = 0.0, a4 = 0.0;
  for (const auto& m : ball) {
    const double q = std::norm(m.c);
    a2s += m.w * m.w * q;
    a0 += q;
    as += m.w * q;
    if (m.n1 != 0 || m.n2 != 0) a4 += m.w * m.w * q * q;
  }
  ChaosParts out;
  out.j1 = 1.5 * a2s * a0;
  // Λ2: n3 = -n1 or n4 = -n1 with n2 != -n1.  Each admissible pairing
  // contributes 3 ⟨n1⟩^s|û1|^2 ⟨n2⟩^s|û2|^2 summed over n2 != -n1, less the
  // double count where both pairings hold (n1 = n2 != 0).
  double j2 = 0.0;
  for (const auto& m : ball) {
    const double q = std::norm(m.c);
    j2 += m.w * q * (as - m.w * q);
  }
  out.j2 = 3.0 * j2 - 1.5 * a4;
  out.j1_tilde = out.j1 - 1.5 * sigma_n(n) * a0;

  const bool enumerate =
      route == J3Route::enumeration ||
      (route == J3Route::automatic && ball.size() <= 100);
  if (enumerate) {
    // Σ over (n1, n2, n3) in the ball with n4 = -(n1+n2+n3) in the ball and
    // no n_j equal to -n1.
    double j3 = 0.0;
    for (const auto& m1 : ball)
      for (const auto& m2 : ball) {
        if (m2.n1 == -m1.n1 && m2.n2 == -m1.n2) continue;
        const Complex p12 = m1.w * m2.w * m1.c * m2.c;
        for (const auto& m3 : ball) {
          if (m3.n1 == -m1.n1 && m3.n2 == -m1.n2) continue;
          const int b1 = -(m1.n1 + m2.n1 + m3.n1);
          const int b2 = -(m1.n2 + m2.n2 + m3.n2);
          if (!in_ball(b1, b2, n)) continue;
          if (b1 == -m1.n1 && b2 == -m1.n2) continue;
          j3 += (p12 * m3.c * un(b1, b2)).real();
        }
      }
    out.j3 = 1.5 * j3;
  } else {
    const double full = un.is_zero() ? 0.0 : 1.5 * smoothed_quartic(un, s, SmoothingOperator::bessel_j);
    out.j3 = full - out.j1 - out.j2;
  }
  return out;
}

int require_even_integer(double s) {
  if (!(std::floor(s) == s) || s < 0.0 || std::fmod(s, 2.0) != 0.0)
    throw UnsupportedParameter(
        "the derivative decomposition needs an even integer s, got " +
        std::to_string(s));
  return static_cast<int>(s);
}

QTerms q_decomposition(const PhaseState& p, double s, int n,
                       const Equation& eq) {
  const int si = require_even_integer(s);
  const SmoothingOperator op = energy_operator(eq);
  const LeibnizExpansion& lx = LeibnizExpansion::get(si, op);
  const SpectralField un = truncate(p.u, n);
  const SpectralField vn = truncate(p.v, n);
  QTerms q;
  if (vn.is_zero()) return q;

  const int k = std::max(un.max_mode(), vn.max_mode());
  const int m = quadrature_grid(4 * k);
  const Multiplier ops = smoothing_power(op, s);
  const auto ug = to_grid(un, m);
  const auto vg = to_grid(vn, m);
  const auto sug = to_grid(apply_multiplier(un, ops), m);
  const auto svg = to_grid(apply_multiplier(vn, ops), m);

  const double su2 = grid_mean(sug, sug);
  const double uv = grid_mean(ug, vg);
  const double su2uv = grid_mean(sug, sug, ug, vg);
  const double c = renormalization_constant(n, s, eq);

  q.q1 = 3.0 * (su2uv - su2 * uv);
  q.q2 = 3.0 * (su2 - c) * uv;

  std::vector<std::vector<double>> grids;
  for (const auto& a : lx.derivatives())
    grids.push_back(to_grid(apply_multiplier(un, Multiplier::derivative(a.a1, a.a2)), m));
  q.q3 = grid_mean(svg, lx.evaluate(grids));

  if (is_nlw(eq)) q.q_extra = uv;
  return q;
}

double q3_direct(const PhaseState& p, double s, int n, const Equation& eq) {
  const int si = require_even_integer(s);
  return leibniz_remainder_direct(truncate(p.u, n), truncate(p.v, n), si,
                                  energy_operator(eq));
}

EnergyReport energy_report(const PhaseState& p, double s, int n,
                           const Equation& eq) {
  EnergyReport r;
  r.equation = eq;
  r.s = s;
  r.n = n;
  r.e = hamiltonian(p, eq);
  r.e_n = truncated_energy(p, n, eq);
  r.e_sn = renormalized_energy(p, s, n, eq);
  r.r_sn = quartic_correction(p.u, s, n, eq);
  if (s >= 0.0 && std::floor(s) == s && std::fmod(s, 2.0) == 0.0)
    r.q = q_decomposition(p, s, n, eq);
  r.chaos = chaos_decomposition(p.u, s, n);
  return r;
}

nlohmann::json report_to_json(const EnergyReport& r) {
  nlohmann::json j;
  j["equation"] = to_string(r.equation.kind);
  if (r.equation.kind == Equation::Kind::nlkg_beta) j["beta"] = r.equation.beta;
  j["s"] = r.s;
  j["N"] = r.n;
  j["E"] = r.e;
  j["E_N"] = r.e_n;
  j["E_sN"] = r.e_sn;
  j["R_sN"] = r.r_sn;
  if (r.q) {
    j["Q1"] = r.q->q1;
    j["Q2"] = r.q->q2;
    j["Q3"] = r.q->q3;
    j["Q_extra"] = r.q->q_extra;
    j["Q_total"] = r.q->total();
  } else {
    j["Q1"] = nullptr;
    j["Q2"] = nullptr;
    j["Q3"] = nullptr;
    j["Q_extra"] = nullptr;
    j["Q_total"] = nullptr;
  }
  j["J1"] = r.chaos.j1;
  j["J2"] = r.chaos.j2;
  j["J3"] = r.chaos.j3;
  j["J1_tilde"] = r.chaos.j1_tilde;
  return j;
}

}  // namespace qiwave
