#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "qiwave/dynamics.hpp"
#include "qiwave/leibniz.hpp"
#include "qiwave/spectral_field.hpp"

namespace qiwave {

// ½ Σ ω(n)^2 |û_n|^2 + ½ Σ |v̂_n|^2 on the full field.
double quadratic_energy(const PhaseState& p, const Equation& eq);
// ∫ u^4, exact.
double quartic_integral(const SpectralField& u);

// Conserved Hamiltonian of the untruncated equation:
//   nlw        ½∫(|∇u|^2 + v^2) + ¼∫u^4
//   nlkg       ½∫(u^2 + |∇u|^2 + v^2) + ¼∫u^4
//   nlkg_beta  ½∫(J^β u)^2 + ½∫v^2 + ¼∫u^4
double hamiltonian(const PhaseState& p, const Equation& eq);

// Quadratic part on the full field, quartic part on π_N u.  Conserved by the
// truncated flow of the same equation.
double truncated_energy(const PhaseState& p, int n, const Equation& eq);

// Renormalisation constant matched to the equation: σ_N (nlkg), σ̃_N (nlw),
// 0 (nlkg_beta, where no renormalisation is needed).
double renormalization_constant(int n, double s, const Equation& eq);
// Smoothing operator of the equation's energy: D for nlw, J otherwise.
SmoothingOperator energy_operator(const Equation& eq);

// (3/2)∫(Op^s π_N u)^2 (π_N u)^2 - (3/2) c_N ∫(π_N u)^2 with the equation's
// operator and constant.  For nlkg this is F_N(u) = R_{s,N}(π_N u).
double quartic_correction(const SpectralField& u, double s, int n,
                          const Equation& eq = Equation::nlkg());

// ∫(Op^s π_N u)^2 - c_N.
double wick_quadratic(const SpectralField& u, double s, int n,
                      const Equation& eq = Equation::nlkg());

// Renormalised H^{s+1} energy:
//   nlkg       ½∫(J^s v)^2 + ½∫(J^{s+1}u)^2 + F_N(u)
//   nlw        H_{s,N}(u,v) + E_N(u,v), H_{s,N} built from D and σ̃_N
//   nlkg_beta  ½∫(J^s v)^2 + ½∫(J^{s+β}u)^2 + (3/2)∫(J^s π_N u)^2(π_N u)^2
double renormalized_energy(const PhaseState& p, double s, int n,
                           const Equation& eq);

// Pairing split of (3/2)∫(J^s π_N u)^2(π_N u)^2 = Σ_{Γ_N} ⟨n1⟩^s⟨n2⟩^s û1û2û3û4.
struct ChaosParts {
  double j1 = 0.0;        // n1 = -n2
  double j2 = 0.0;        // n1 = -n3 or -n4, n1 != -n2
  double j3 = 0.0;        // no pair
  double j1_tilde = 0.0;  // j1 - (3/2) σ_N ∫(π_N u)^2
  double total() const { return j1 + j2 + j3; }
};

// How J3 is obtained: summed over the no-pair set directly, or as the full
// quartic integral minus J1 and J2.  `automatic` enumerates for small balls.
enum class J3Route { automatic, enumeration, complement };

ChaosParts chaos_decomposition(const SpectralField& u, double s, int n,
                               J3Route route = J3Route::automatic);

// Time derivative of the renormalised energy along the truncated flow,
// split into Q1 (mean-free interaction), Q2 (renormalised mean part), Q3
// (lower-order Leibniz remainder) and, for nlw, the extra ∫u_N v_N coming
// from E_N.
struct QTerms {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q_extra = 0.0;
  double total() const { return q1 + q2 + q3 + q_extra; }
};

// Requires s to be an even integer >= 2 (UnsupportedParameter otherwise).
QTerms q_decomposition(const PhaseState& p, double s, int n,
                       const Equation& eq);
// Q3 through exact spectral products instead of the expansion.
double q3_direct(const PhaseState& p, double s, int n, const Equation& eq);

// Throws UnsupportedParameter unless s is an even integer >= 2.
int require_even_integer(double s);

struct EnergyReport {
  Equation equation;
  double s = 0.0;
  int n = 0;
  double e = 0.0;     // Hamiltonian
  double e_n = 0.0;   // truncated energy
  double e_sn = 0.0;  // renormalised energy
  double r_sn = 0.0;  // quartic correction
  std::optional<QTerms> q;  // only for even integer s >= 2
  ChaosParts chaos;
};

EnergyReport energy_report(const PhaseState& p, double s, int n,
                           const Equation& eq);
nlohmann::json report_to_json(const EnergyReport& r);

}  // namespace qiwave
