#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qiwave/dynamics.hpp"
#include "qiwave/leibniz.hpp"
#include "qiwave/sampler.hpp"

namespace qiwave {

// Runs body(i) for i in [0, count) on up to `workers` threads.  Callers
// write results into slot i, so the outcome never depends on scheduling.
// The first exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body);

// Scalar functionals of a phase-space sample.
struct Functional {
  enum class Kind {
    q_total,           // Q1 + Q2 + Q3 (+ Q_extra for nlw)
    q1,
    q2,
    q3,
    f_n,               // quartic correction F_N
    f_n_minus_f_m,     // F_N - F_M
    wick_quadratic,    // ∫(J^s π_N u)^2 - σ_N
    sup_norm_block,    // grid sup of ∂^α P_M π_N (u or v)
    density_weight,    // 1{E_N <= r} e^{-F_N}
    gaussian_coordinate,  // the real zero-mode Gaussian g_0 of u
    constant,
  };
  Kind kind = Kind::q_total;
  int m = 0;              // f_n_minus_f_m, sup_norm_block
  MultiIndex alpha{};     // sup_norm_block
  bool on_v = false;      // sup_norm_block
  int oversample = 4;     // sup_norm_block
  double value = 0.0;     // constant

  static Functional of(Kind k) {
    Functional f;
    f.kind = k;
    return f;
  }
};

std::string to_string(Functional::Kind k);
Functional::Kind functional_kind_from_string(const std::string& name);
// Polynomial degree in the underlying Gaussians, or -1 when the functional
// is not a polynomial of fixed degree.
int chaos_degree(Functional::Kind k);

// What a functional is evaluated against.
struct EvalContext {
  double s = 2.0;
  int n = 8;
  Equation equation;
  double r = 0.0;  // resolved cutoff, used by density_weight
};

double evaluate(const Functional& f, const PhaseState& p, const EvalContext& ctx);

// The equation whose energies go with a measure variant: nlkg for μ_s and
// point masses, nlw for μ̃_s, nlkg_beta for μ_s^β.
Equation equation_for(const EnsembleSpec& spec);

// An ensemble run: which measure, how many draws, how many threads.
struct Ensemble {
  EnsembleSpec spec;
  long samples = 10000;
  int workers = 1;
};

// Seed of the auxiliary stream `tag` derived from a master seed.
std::uint64_t derived_seed(std::uint64_t master_seed, std::uint64_t tag);
inline constexpr std::uint64_t kPilotStream = 1;
inline constexpr std::uint64_t kBootstrapStream = 2;

// Cutoff r actually used: +inf, the fixed value, or the 0.9-quantile
// (linear interpolation) of E_N over a 10^3-draw pilot on a derived seed.
double resolve_cutoff(const EnsembleSpec& spec, int workers = 1);
inline constexpr int kPilotSamples = 1000;
inline constexpr double kPilotQuantile = 0.9;

// Type-7 quantile of unsorted data.
double quantile(std::vector<double> data, double q);

struct LpEstimate {
  double p = 2.0;
  double value = 0.0;
  long samples = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long effective_samples = 0;
};

inline constexpr int kBootstrapResamples = 200;

// (Σ w_i |x_i|^p / Σ w_i)^{1/p} with a percentile bootstrap 95% interval
// over `resamples` resamples of the (x_i, w_i) pairs.  The interval is
// widened if needed so that it contains the point value.  Throws
// DegenerateEnsemble when Σ w_i = 0.
LpEstimate lp_estimate(std::span<const double> values,
                       std::span<const double> weights, double p,
                       std::uint64_t seed, int resamples = kBootstrapResamples);
// Unit weights.
LpEstimate lp_estimate(std::span<const double> values, double p,
                       std::uint64_t seed, int resamples = kBootstrapResamples);

// Per-draw values of f and cutoff weights 1{E_N <= r}.  For density_weight
// the indicator is part of the functional and every weight is 1.
struct SampleSet {
  std::vector<double> values;
  std::vector<double> weights;
  double r = 0.0;
};
SampleSet evaluate_ensemble(const Functional& f, const Ensemble& e);

LpEstimate estimate_lp(const Functional& f, const Ensemble& e, double p);

// Least squares fit of log y = a + b log x.  Points with y <= 0 are left
// out; `residual` is the root mean square of the log residuals.
struct RateFit {
  std::vector<double> log_x;
  std::vector<double> log_y;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};
RateFit fit_power_law(std::span<const double> x, std::span<const double> y);

// Per-draw values kept by an experiment, one column per quantity, for the
// optional raw dump.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[c][i]: column c, draw i
};

// ---------------------------------------------------------------------------

struct Theorem2Row {
  int n = 0;
  double r = 0.0;
  LpEstimate estimate;
};
struct Theorem2Result {
  std::vector<Theorem2Row> rows;       // ordered by N, then p
  std::vector<RateFit> p_fits;         // one per N: log value vs log p
  std::vector<double> ratio_over_n;    // one per p: max/min over N
  double max_p_slope = 0.0;
  RawTable raw;
};

// For each N: the ensemble truncated at N (window max(sample_max_mode, N)),
// cutoff resolved at that N, and ‖f‖_{L^p} for every p.  The same draws
// are reused across N and p.
Theorem2Result theorem2_experiment(const Ensemble& base,
                                   const std::vector<int>& n_list,
                                   const std::vector<double>& p_list,
                                   const Functional& f = Functional::of(Functional::Kind::q_total));

struct NmRow {
  int m = 0;
  LpEstimate total;     // F_{N_ref} - F_M
  LpEstimate j1_tilde;  // J̃1 difference
  LpEstimate j2;
  LpEstimate j3;
};
struct NmResult {
  int n_ref = 0;
  std::vector<NmRow> rows;
  RateFit fit, fit_j1_tilde, fit_j2, fit_j3;
  bool monotone = false;  // differences strictly decrease in M
  RawTable raw;
};

// ‖F_{N_ref} - F_M‖_{L^p} over M, split into its chaos parts.
// n_ref = 0 selects 2·max(M).
NmResult lemma_nm_study(const Ensemble& base, const std::vector<int>& m_list,
                        double p, int n_ref = 0);

struct ChaosRow {
  double p = 0.0;
  LpEstimate estimate;
  double ratio = 0.0;      // ‖X‖_p / ‖X‖_2
  double bound = 0.0;      // (p-1)^{k/2}
  double allowance = 0.0;  // bound · (1 + 3·relative CI width)
  bool pass = false;
};
struct ChaosResult {
  int degree = 0;
  LpEstimate l2;
  std::vector<ChaosRow> rows;
  bool pass = false;
  RawTable raw;
};

ChaosResult chaos_growth_check(const Functional& f, const Ensemble& e,
                               const std::vector<double>& p_list);

struct KinRow {
  int m = 0;
  LpEstimate estimate;
};
struct KinResult {
  std::vector<KinRow> rows;
  RateFit fit;
  RawTable raw;
};

// ‖ sup|∂^α P_M π_N w| ‖_{L^p} per dyadic M, w = u or v.
KinResult sup_norm_moment_study(const Ensemble& e, MultiIndex alpha, bool on_v,
                                const std::vector<int>& m_list, double p,
                                int oversample = 4);

struct TailRow {
  int m = 0;
  double alpha = 0.0;
  long exceedances = 0;
  double probability = 0.0;  // 1/samples when bound_only
  double ci_low = 0.0;       // Wilson 95% interval
  double ci_high = 0.0;
  bool bound_only = false;   // no exceedance seen
};
struct TailResult {
  std::vector<TailRow> rows;  // ordered by M, then α (ascending)
  bool monotone_in_alpha = false;
  bool monotone_in_m = false;  // within the binomial intervals
  RawTable raw;
};

// P(|F_N - F_M| > α) with N the ensemble's truncation.  Thresholds are the
// absolute `alphas` plus `std_multiples` times the sample standard
// deviation of F_N - F_{M_0}, M_0 the first entry of m_list.
TailResult tail_estimate_study(const Ensemble& e, const std::vector<int>& m_list,
                               const std::vector<double>& alphas,
                               const std::vector<double>& std_multiples = {});

}  // namespace qiwave
