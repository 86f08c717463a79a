#include "qiwave/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "qiwave/energy.hpp"
#include "qiwave/errors.hpp"
#include "qiwave/measures.hpp"

namespace qiwave {

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct KindName {
  Functional::Kind kind;
  const char* name;
  int degree;
};

constexpr KindName kKinds[] = {
    {Functional::Kind::q_total, "q_total", 4},
    {Functional::Kind::q1, "q1", 4},
    {Functional::Kind::q2, "q2", 4},
    {Functional::Kind::q3, "q3", 4},
    {Functional::Kind::f_n, "F_N", 4},
    {Functional::Kind::f_n_minus_f_m, "F_N_minus_F_M", 4},
    {Functional::Kind::wick_quadratic, "wick_quadratic", 2},
    {Functional::Kind::sup_norm_block, "sup_norm_block", -1},
    {Functional::Kind::density_weight, "density_weight", -1},
    {Functional::Kind::gaussian_coordinate, "gaussian_coordinate", 1},
    {Functional::Kind::constant, "constant", 0},
};

}  // namespace

std::string to_string(Functional::Kind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "unknown";
}

Functional::Kind functional_kind_from_string(const std::string& name) {
  for (const auto& e : kKinds)
    if (name == e.name) return e.kind;
  throw ValidationError("unknown functional '" + name + "'");
}

int chaos_degree(Functional::Kind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.degree;
  return -1;
}

double evaluate(const Functional& f, const PhaseState& p, const EvalContext& ctx) {
  using K = Functional::Kind;
  switch (f.kind) {
    case K::q_total: return q_decomposition(p, ctx.s, ctx.n, ctx.equation).total();
    case K::q1: return q_decomposition(p, ctx.s, ctx.n, ctx.equation).q1;
    case K::q2: return q_decomposition(p, ctx.s, ctx.n, ctx.equation).q2;
    case K::q3: return q_decomposition(p, ctx.s, ctx.n, ctx.equation).q3;
    case K::f_n: return quartic_correction(p.u, ctx.s, ctx.n, ctx.equation);
    case K::f_n_minus_f_m:
      return quartic_correction(p.u, ctx.s, ctx.n, ctx.equation) -
             quartic_correction(p.u, ctx.s, f.m, ctx.equation);
    case K::wick_quadratic: return wick_quadratic(p.u, ctx.s, ctx.n, ctx.equation);
    case K::sup_norm_block: {
      const SpectralField& w = f.on_v ? p.v : p.u;
      SpectralField b = apply_multiplier(truncate(w, ctx.n), Multiplier::dyadic_block(f.m));
      if (b.is_zero()) return 0.0;
      b = apply_multiplier(b, Multiplier::derivative(f.alpha.a1, f.alpha.a2));
      return grid_sup_norm(b, f.oversample);
    }
    case K::density_weight:
      return weighted_density(p, ctx.s, ctx.n, ctx.r, ctx.equation).weight;
    case K::gaussian_coordinate: return p.u(0, 0).real();
    case K::constant: return f.value;
  }
  return 0.0;
}

Equation equation_for(const EnsembleSpec& spec) {
  switch (spec.variant) {
    case MeasureVariant::mu_tilde_s: return Equation::nlw();
    case MeasureVariant::mu_s_beta: return Equation::nlkg_beta(spec.beta);
    default: return Equation::nlkg();
  }
}

std::uint64_t derived_seed(std::uint64_t master_seed, std::uint64_t tag) {
  return stream_seed(stream_seed(master_seed, std::numeric_limits<std::uint64_t>::max()), tag);
}

double quantile(std::vector<double> data, double q) {
  if (data.empty()) throw std::invalid_argument("quantile of empty data");
  std::sort(data.begin(), data.end());
  const double h = (data.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, data.size() - 1);
  return data[lo] + (h - lo) * (data[hi] - data[lo]);
}

double resolve_cutoff(const EnsembleSpec& spec, int workers) {
  switch (spec.cutoff.kind) {
    case EnergyCutoff::Kind::infinite: return std::numeric_limits<double>::infinity();
    case EnergyCutoff::Kind::fixed: return spec.cutoff.r;
    case EnergyCutoff::Kind::auto_quantile: break;
  }
  EnsembleSpec pilot = spec;
  pilot.master_seed = derived_seed(spec.master_seed, kPilotStream);
  pilot.cutoff = EnergyCutoff::infinite();
  const Equation eq = equation_for(spec);
  std::vector<double> energies(kPilotSamples);
  parallel_for(energies.size(), workers, [&](std::size_t i) {
    energies[i] = truncated_energy(sample(pilot, i), spec.truncation_n, eq);
  });
  return quantile(std::move(energies), kPilotQuantile);
}

namespace {

// Uniform index in [0, n) from 53 random bits.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1);
}

}  // namespace

LpEstimate lp_estimate(std::span<const double> values,
                       std::span<const double> weights, double p,
                       std::uint64_t seed, int resamples) {
  if (values.size() != weights.size())
    throw std::invalid_argument("values and weights differ in length");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  LpEstimate est;
  est.p = p;
  est.samples = static_cast<long>(values.size());
  double wsum = 0.0, scale = 0.0;
  long effective = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("negative weight");
    wsum += weights[i];
    if (weights[i] > 0.0) {
      ++effective;
      scale = std::max(scale, std::abs(values[i]));
    }
  }
  est.effective_samples = effective;
  if (!(wsum > 0.0))
    throw DegenerateEnsemble("the energy cutoff rejected every sample");
  if (scale == 0.0) return est;  // identically zero
  if (!std::isfinite(scale)) throw std::domain_error("non-finite functional value");

  // a_i = w_i (|x_i| / max)^p, so resampling only needs index sums.
  std::vector<double> a(values.size());
  double asum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    a[i] = weights[i] > 0.0 ? weights[i] * std::pow(std::abs(values[i]) / scale, p) : 0.0;
    asum += a[i];
  }
  est.value = scale * std::pow(asum / wsum, 1.0 / p);

  std::mt19937_64 rng(seed);
  std::vector<double> boot;
  boot.reserve(resamples);
  const std::size_t n = values.size();
  for (int b = 0; b < resamples; ++b) {
    double sa = 0.0, sw = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = draw_index(rng, n);
      sa += a[i];
      sw += weights[i];
    }
    if (sw > 0.0) boot.push_back(scale * std::pow(sa / sw, 1.0 / p));
  }
  if (boot.empty()) {
    est.ci_low = est.ci_high = est.value;
    return est;
  }
  est.ci_low = std::min(quantile(boot, 0.025), est.value);
  est.ci_high = std::max(quantile(boot, 0.975), est.value);
  return est;
}

LpEstimate lp_estimate(std::span<const double> values, double p,
                       std::uint64_t seed, int resamples) {
  const std::vector<double> ones(values.size(), 1.0);
  return lp_estimate(values, ones, p, seed, resamples);
}

namespace {

// Evaluates `per_draw(state)` -> k values for every draw, plus the cutoff
// weight of each draw.  Column-major result: out[c][i].
struct Draws {
  std::vector<std::vector<double>> columns;
  std::vector<double> weights;
  double r = 0.0;
};

Draws run_draws(const Ensemble& e, std::size_t k,
                const std::function<void(const PhaseState&, double r, double* out)>& per_draw,
                bool weight_by_cutoff = true) {
  e.spec.validate();
  if (e.samples < 1) throw std::invalid_argument("need at least one sample");
  Draws d;
  d.r = resolve_cutoff(e.spec, e.workers);
  const std::size_t n = static_cast<std::size_t>(e.samples);
  std::vector<double> flat(n * k);
  d.weights.assign(n, 1.0);
  const Equation eq = equation_for(e.spec);
  const bool cut = weight_by_cutoff && std::isfinite(d.r);
  parallel_for(n, e.workers, [&](std::size_t i) {
    const PhaseState p = sample(e.spec, i);
    if (cut) d.weights[i] = truncated_energy(p, e.spec.truncation_n, eq) <= d.r ? 1.0 : 0.0;
    per_draw(p, d.r, &flat[i * k]);
  });
  d.columns.assign(k, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c) d.columns[c][i] = flat[i * k + c];
  return d;
}

std::uint64_t bootstrap_seed(const Ensemble& e) {
  return derived_seed(e.spec.master_seed, kBootstrapStream);
}

EvalContext context_for(const EnsembleSpec& spec, double r) {
  return {spec.s, spec.truncation_n, equation_for(spec), r};
}

}  // namespace

SampleSet evaluate_ensemble(const Functional& f, const Ensemble& e) {
  const bool embedded = f.kind == Functional::Kind::density_weight;
  auto d = run_draws(
      e, 1,
      [&](const PhaseState& p, double r, double* out) {
        out[0] = evaluate(f, p, context_for(e.spec, r));
      },
      !embedded);
  return {std::move(d.columns[0]), std::move(d.weights), d.r};
}

LpEstimate estimate_lp(const Functional& f, const Ensemble& e, double p) {
  if (e.samples < 100) throw std::invalid_argument("estimate_lp needs at least 100 samples");
  const auto set = evaluate_ensemble(f, e);
  return lp_estimate(set.values, set.weights, p, bootstrap_seed(e));
}

RateFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y differ in length");
  RateFit fit;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 0.0 && x[i] > 0.0) {
      fit.log_x.push_back(std::log(x[i]));
      fit.log_y.push_back(std::log(y[i]));
    }
  const std::size_t n = fit.log_x.size();
  if (n < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    fit.intercept = n == 1 ? fit.log_y[0] : std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double mx = std::accumulate(fit.log_x.begin(), fit.log_x.end(), 0.0) / n;
  const double my = std::accumulate(fit.log_y.begin(), fit.log_y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (fit.log_x[i] - mx) * (fit.log_x[i] - mx);
    sxy += (fit.log_x[i] - mx) * (fit.log_y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = fit.log_y[i] - (fit.intercept + fit.slope * fit.log_x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

Theorem2Result theorem2_experiment(const Ensemble& base, const std::vector<int>& n_list,
                                   const std::vector<double>& p_list, const Functional& f) {
  if (n_list.empty() || p_list.empty()) throw std::invalid_argument("empty N or p list");
  if (f.kind == Functional::Kind::q_total || f.kind == Functional::Kind::q1 ||
      f.kind == Functional::Kind::q2 || f.kind == Functional::Kind::q3)
    require_even_integer(base.spec.s);
  const int window = std::max(base.spec.sample_max_mode,
                              *std::max_element(n_list.begin(), n_list.end()));
  Theorem2Result res;
  std::vector<std::vector<double>> by_p(p_list.size());
  for (int n : n_list) {
    Ensemble e = base;
    e.spec.truncation_n = n;
    e.spec.sample_max_mode = window;
    const bool embedded = f.kind == Functional::Kind::density_weight;
    auto d = run_draws(
        e, 1,
        [&](const PhaseState& p, double r, double* out) {
          out[0] = evaluate(f, p, context_for(e.spec, r));
        },
        !embedded);
    std::vector<double> values;
    for (std::size_t j = 0; j < p_list.size(); ++j) {
      const auto est = lp_estimate(d.columns[0], d.weights, p_list[j], bootstrap_seed(e));
      res.rows.push_back({n, d.r, est});
      values.push_back(est.value);
      by_p[j].push_back(est.value);
    }
    res.p_fits.push_back(fit_power_law(p_list, values));
    res.raw.columns.push_back(to_string(f.kind) + "_N" + std::to_string(n));
    res.raw.data.push_back(std::move(d.columns[0]));
    res.raw.columns.push_back("weight_N" + std::to_string(n));
    res.raw.data.push_back(std::move(d.weights));
  }
  res.max_p_slope = -std::numeric_limits<double>::infinity();
  for (const auto& fit : res.p_fits) res.max_p_slope = std::max(res.max_p_slope, fit.slope);
  for (const auto& v : by_p) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    res.ratio_over_n.push_back(*lo > 0.0 ? *hi / *lo
                                         : (*hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0));
  }
  return res;
}

NmResult lemma_nm_study(const Ensemble& base, const std::vector<int>& m_list, double p,
                        int n_ref) {
  if (m_list.empty()) throw std::invalid_argument("empty M list");
  const int m_max = *std::max_element(m_list.begin(), m_list.end());
  if (n_ref == 0) n_ref = 2 * m_max;
  if (m_max > n_ref) throw std::invalid_argument("every M must be <= N_ref");
  Ensemble e = base;
  e.spec.truncation_n = n_ref;
  e.spec.sample_max_mode = std::max(e.spec.sample_max_mode, n_ref);
  const double s = e.spec.s;
  const std::size_t k = m_list.size();
  // Columns per M: total, J̃1, J2, J3 differences.
  auto d = run_draws(e, 4 * k, [&](const PhaseState& st, double, double* out) {
    const auto ref = chaos_decomposition(st.u, s, n_ref);
    for (std::size_t j = 0; j < k; ++j) {
      const auto c = m_list[j] == n_ref ? ref : chaos_decomposition(st.u, s, m_list[j]);
      const double dj1 = ref.j1_tilde - c.j1_tilde;
      const double dj2 = ref.j2 - c.j2;
      const double dj3 = ref.j3 - c.j3;
      out[4 * j] = dj1 + dj2 + dj3;
      out[4 * j + 1] = dj1;
      out[4 * j + 2] = dj2;
      out[4 * j + 3] = dj3;
    }
  });
  NmResult res;
  res.n_ref = n_ref;
  const auto seed = bootstrap_seed(e);
  std::vector<double> ms, tot, a1, a2, a3;
  for (std::size_t j = 0; j < k; ++j) {
    NmRow row;
    row.m = m_list[j];
    row.total = lp_estimate(d.columns[4 * j], d.weights, p, seed);
    row.j1_tilde = lp_estimate(d.columns[4 * j + 1], d.weights, p, seed);
    row.j2 = lp_estimate(d.columns[4 * j + 2], d.weights, p, seed);
    row.j3 = lp_estimate(d.columns[4 * j + 3], d.weights, p, seed);
    ms.push_back(row.m);
    tot.push_back(row.total.value);
    a1.push_back(row.j1_tilde.value);
    a2.push_back(row.j2.value);
    a3.push_back(row.j3.value);
    res.rows.push_back(row);
    const std::string tag = "_M" + std::to_string(row.m);
    for (const char* name : {"diff", "j1_tilde", "j2", "j3"})
      res.raw.columns.push_back(std::string(name) + tag);
  }
  res.fit = fit_power_law(ms, tot);
  res.fit_j1_tilde = fit_power_law(ms, a1);
  res.fit_j2 = fit_power_law(ms, a2);
  res.fit_j3 = fit_power_law(ms, a3);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ms[a] < ms[b]; });
  res.monotone = true;
  for (std::size_t i = 1; i < k; ++i)
    if (!(tot[order[i]] < tot[order[i - 1]])) res.monotone = false;
  res.raw.data = std::move(d.columns);
  res.raw.columns.push_back("weight");
  res.raw.data.push_back(std::move(d.weights));
  return res;
}

ChaosResult chaos_growth_check(const Functional& f, const Ensemble& e,
                               const std::vector<double>& p_list) {
  const int k = chaos_degree(f.kind);
  if (k < 0)
    throw UnsupportedParameter("functional '" + to_string(f.kind) +
                               "' has no fixed chaos degree");
  const auto set = evaluate_ensemble(f, e);
  const auto seed = bootstrap_seed(e);
  ChaosResult res;
  res.degree = k;
  res.l2 = lp_estimate(set.values, set.weights, 2.0, seed);
  res.pass = true;
  for (double p : p_list) {
    ChaosRow row;
    row.p = p;
    row.estimate = lp_estimate(set.values, set.weights, p, seed);
    row.bound = std::pow(p - 1.0, 0.5 * k);
    if (res.l2.value > 0.0) {
      row.ratio = row.estimate.value / res.l2.value;
      const double width = (row.estimate.ci_high - row.estimate.ci_low) / row.estimate.value;
      row.allowance = row.bound * (1.0 + 3.0 * width);
    } else {
      row.ratio = 1.0;  // X = 0 almost surely
      row.allowance = row.bound;
    }
    row.pass = row.ratio <= row.allowance;
    res.pass = res.pass && row.pass;
    res.rows.push_back(row);
  }
  res.raw.columns = {to_string(f.kind), "weight"};
  res.raw.data = {set.values, set.weights};
  return res;
}

KinResult sup_norm_moment_study(const Ensemble& e, MultiIndex alpha, bool on_v,
                                const std::vector<int>& m_list, double p, int oversample) {
  const double s = e.spec.s;
  if (alpha.order() > (on_v ? s - 1.0 : s))
    throw ValidationError("|alpha| exceeds the regularity of the field", "/alpha");
  const std::size_t k = m_list.size();
  auto d = run_draws(e, k, [&](const PhaseState& st, double r, double* out) {
    for (std::size_t j = 0; j < k; ++j) {
      Functional f = Functional::of(Functional::Kind::sup_norm_block);
      f.m = m_list[j];
      f.alpha = alpha;
      f.on_v = on_v;
      f.oversample = oversample;
      out[j] = evaluate(f, st, context_for(e.spec, r));
    }
  });
  KinResult res;
  const auto seed = bootstrap_seed(e);
  std::vector<double> ms, vals;
  for (std::size_t j = 0; j < k; ++j) {
    res.rows.push_back({m_list[j], lp_estimate(d.columns[j], d.weights, p, seed)});
    ms.push_back(m_list[j]);
    vals.push_back(res.rows.back().estimate.value);
    res.raw.columns.push_back("sup_M" + std::to_string(m_list[j]));
  }
  res.fit = fit_power_law(ms, vals);
  res.raw.data = std::move(d.columns);
  res.raw.columns.push_back("weight");
  res.raw.data.push_back(std::move(d.weights));
  return res;
}

namespace {

// Wilson score interval at 95%.
std::pair<double, double> wilson(long k, long n) {
  const double z = 1.959963984540054;
  const double ph = static_cast<double>(k) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (ph + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace

TailResult tail_estimate_study(const Ensemble& e, const std::vector<int>& m_list,
                               const std::vector<double>& alphas,
                               const std::vector<double>& std_multiples) {
  const int n = e.spec.truncation_n;
  if (m_list.empty()) throw std::invalid_argument("empty M list");
  for (int m : m_list)
    if (m >= n) throw ValidationError("tail study needs N > M", "/M_list");
  const std::size_t k = m_list.size();
  const double s = e.spec.s;
  const Equation eq = equation_for(e.spec);
  auto d = run_draws(e, k, [&](const PhaseState& st, double, double* out) {
    const double fn = quartic_correction(st.u, s, n, eq);
    for (std::size_t j = 0; j < k; ++j) out[j] = fn - quartic_correction(st.u, s, m_list[j], eq);
  });
  long eff = 0;
  for (double w : d.weights) eff += w > 0.0;
  if (eff == 0) throw DegenerateEnsemble("the energy cutoff rejected every sample");

  std::vector<double> thresholds = alphas;
  if (!std_multiples.empty()) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < d.weights.size(); ++i)
      if (d.weights[i] > 0.0) {
        s1 += d.columns[0][i];
        s2 += d.columns[0][i] * d.columns[0][i];
      }
    const double mean = s1 / eff;
    const double sd = std::sqrt(std::max(0.0, (s2 / eff - mean * mean)) * eff / std::max(1L, eff - 1));
    for (double c : std_multiples) thresholds.push_back(c * sd);
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  TailResult res;
  for (std::size_t j = 0; j < k; ++j) {
    for (double a : thresholds) {
      TailRow row;
      row.m = m_list[j];
      row.alpha = a;
      for (std::size_t i = 0; i < d.weights.size(); ++i)
        if (d.weights[i] > 0.0 && std::abs(d.columns[j][i]) > a) ++row.exceedances;
      std::tie(row.ci_low, row.ci_high) = wilson(row.exceedances, eff);
      row.bound_only = row.exceedances == 0;
      row.probability = row.bound_only ? 1.0 / eff : static_cast<double>(row.exceedances) / eff;
      res.rows.push_back(row);
    }
    res.raw.columns.push_back("diff_M" + std::to_string(m_list[j]));
  }
  const std::size_t t = thresholds.size();
  res.monotone_in_alpha = true;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t a = 1; a < t; ++a)
      if (res.rows[j * t + a].exceedances > res.rows[j * t + a - 1].exceedances)
        res.monotone_in_alpha = false;
  // Larger M must not have a clearly larger tail.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return m_list[a] < m_list[b]; });
  res.monotone_in_m = true;
  for (std::size_t i = 1; i < k; ++i)
    for (std::size_t a = 0; a < t; ++a) {
      const auto& lo_m = res.rows[order[i - 1] * t + a];
      const auto& hi_m = res.rows[order[i] * t + a];
      if (hi_m.ci_low > lo_m.ci_high) res.monotone_in_m = false;
    }
  res.raw.data = std::move(d.columns);
  res.raw.columns.push_back("weight");
  res.raw.data.push_back(std::move(d.weights));
  return res;
}

}  // namespace qiwave
