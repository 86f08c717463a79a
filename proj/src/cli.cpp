#include "qiwave/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <variant>

#include "qiwave/energy.hpp"
#include "qiwave/errors.hpp"
#include "qiwave/field_io.hpp"

#ifndef QIWAVE_VERSION
#define QIWAVE_VERSION "0.0.0"
#endif
#ifndef QIWAVE_REVISION
#define QIWAVE_REVISION "unknown"
#endif

namespace qiwave::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// JSON parsing that remembers where each value came from.

// Forward iterator over the text; raises *mark to the number of characters
// the parser has consumed.
class TrackingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  TrackingIterator() = default;
  TrackingIterator(const char* p, const char* base, std::size_t* mark)
      : p_(p), base_(base), mark_(mark) {}

  reference operator*() const { return *p_; }
  TrackingIterator& operator++() {
    ++p_;
    if (mark_) *mark_ = std::max(*mark_, static_cast<std::size_t>(p_ - base_));
    return *this;
  }
  TrackingIterator operator++(int) {
    auto t = *this;
    ++*this;
    return t;
  }
  bool operator==(const TrackingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const TrackingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_ = nullptr;
  const char* base_ = nullptr;
  std::size_t* mark_ = nullptr;
};

std::string escape_token(const std::string& key) {
  std::string out;
  for (char ch : key) {
    if (ch == '~') out += "~0";
    else if (ch == '/') out += "~1";
    else out += ch;
  }
  return out;
}

struct LineIndex {
  std::vector<std::size_t> newlines;
  explicit LineIndex(const std::string& text) {
    for (std::size_t i = 0; i < text.size(); ++i)
      if (text[i] == '\n') newlines.push_back(i);
  }
  // Line of the character at `offset`.
  int line(std::size_t offset) const {
    return 1 + static_cast<int>(std::lower_bound(newlines.begin(), newlines.end(), offset) -
                                newlines.begin());
  }
  int column(std::size_t offset) const {
    const auto it = std::lower_bound(newlines.begin(), newlines.end(), offset);
    const std::size_t start = it == newlines.begin() ? 0 : *(it - 1) + 1;
    return static_cast<int>(offset - start) + 1;
  }
};

// ---------------------------------------------------------------------------
// Typed access with line-referenced failures.

class Reader {
 public:
  explicit Reader(const ConfigDocument& d) : d_(d) {}

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    throw ValidationError(d_.source + ":" + std::to_string(d_.line_of(ptr)) + ": " +
                              (ptr.empty() ? std::string("/") : ptr) + ": " + msg,
                          ptr);
  }

  const json* find(const std::string& ptr) const {
    const json* cur = &d_.doc;
    if (ptr.empty()) return cur;
    std::size_t pos = 1;
    while (true) {
      const std::size_t next = ptr.find('/', pos);
      const std::string key = ptr.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      if (!cur->is_object() || !cur->contains(key)) return nullptr;
      cur = &(*cur)[key];
      if (next == std::string::npos) return cur;
      pos = next + 1;
    }
  }

  bool has(const std::string& ptr) const { return find(ptr) != nullptr; }

  void object(const std::string& ptr, std::initializer_list<const char*> allowed) const {
    const json* j = find(ptr);
    if (!j) return;
    if (!j->is_object()) fail(ptr, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j->items())
      if (!ok.count(key)) fail(ptr + "/" + escape_token(key), "unknown key '" + key + "'");
  }

  double number(const std::string& ptr, double def) const {
    const json* j = find(ptr);
    if (!j) return def;
    if (!j->is_number()) fail(ptr, "expected a number");
    const double x = j->get<double>();
    if (!std::isfinite(x)) fail(ptr, "expected a finite number");
    return x;
  }

  long integer(const std::string& ptr, long def) const {
    const json* j = find(ptr);
    if (!j) return def;
    return as_integer(*j, ptr);
  }

  std::uint64_t unsigned_integer(const std::string& ptr, std::uint64_t def) const {
    const json* j = find(ptr);
    if (!j) return def;
    if (j->is_number_unsigned()) return j->get<std::uint64_t>();
    if (j->is_number_integer()) fail(ptr, "expected a non-negative integer");
    if (j->is_number_float()) {
      const double x = j->get<double>();
      if (x >= 0.0 && std::floor(x) == x && x < 1.8e19) return static_cast<std::uint64_t>(x);
    }
    fail(ptr, "expected a non-negative integer");
  }

  std::string string(const std::string& ptr, const std::string& def) const {
    const json* j = find(ptr);
    if (!j) return def;
    if (!j->is_string()) fail(ptr, "expected a string");
    return j->get<std::string>();
  }

  bool boolean(const std::string& ptr, bool def) const {
    const json* j = find(ptr);
    if (!j) return def;
    if (!j->is_boolean()) fail(ptr, "expected true or false");
    return j->get<bool>();
  }

  std::vector<double> numbers(const std::string& ptr, std::vector<double> def) const {
    const json* j = find(ptr);
    if (!j) return def;
    if (!j->is_array()) fail(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j->size(); ++i) {
      const auto& x = (*j)[i];
      const std::string at = ptr + "/" + std::to_string(i);
      if (!x.is_number() || !std::isfinite(x.get<double>())) fail(at, "expected a finite number");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const std::string& ptr, std::vector<int> def) const {
    const json* j = find(ptr);
    if (!j) return def;
    if (!j->is_array()) fail(ptr, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j->size(); ++i)
      out.push_back(static_cast<int>(as_integer((*j)[i], ptr + "/" + std::to_string(i))));
    return out;
  }

 private:
  long as_integer(const json& j, const std::string& ptr) const {
    if (j.is_number_integer()) {
      if (j.is_number_unsigned() && j.get<std::uint64_t>() > 1ull << 53) fail(ptr, "integer too large");
      return j.get<long>();
    }
    if (j.is_number_float()) {
      const double x = j.get<double>();
      if (std::floor(x) == x && std::abs(x) < 9.0e15) return static_cast<long>(x);
    }
    fail(ptr, "expected an integer");
  }

  const ConfigDocument& d_;
};

bool is_q_functional(Functional::Kind k) {
  using K = Functional::Kind;
  return k == K::q_total || k == K::q1 || k == K::q2 || k == K::q3;
}

bool uses_ensemble(const std::string& cmd) {
  return cmd == "sample" || cmd.rfind("mc-", 0) == 0;
}

MeasureVariant default_variant(const Equation& eq) {
  switch (eq.kind) {
    case Equation::Kind::nlw: return MeasureVariant::mu_tilde_s;
    case Equation::Kind::nlkg_beta: return MeasureVariant::mu_s_beta;
    default: return MeasureVariant::mu_s;
  }
}

json number_or_tag(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json cutoff_to_json(const EnergyCutoff& c) {
  switch (c.kind) {
    case EnergyCutoff::Kind::infinite: return "inf";
    case EnergyCutoff::Kind::auto_quantile: return "auto";
    case EnergyCutoff::Kind::fixed: return c.r;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Output tables.

using Cell = std::variant<double, long long, std::string, bool>;

struct Column {
  std::string name;
  std::string description;
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row has the wrong width");
    rows.push_back(std::move(row));
  }

  std::string render() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      out += csv_quote(columns[i].name);
    }
    out += "\r\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += std::visit(
            [](const auto& v) -> std::string {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) return format_number(v);
              else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
              else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
              else return csv_quote(v);
            },
            row[i]);
      }
      out += "\r\n";
    }
    return out;
  }

  json schema() const {
    json cols = json::array();
    for (const auto& c : columns) cols.push_back({{"name", c.name}, {"description", c.description}});
    return {{"format", "csv"}, {"columns", cols}};
  }
};

struct Artifacts {
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::tuple<std::string, json, std::string>> documents;  // name, body, description
  json summary = json::object();
  json r_used = nullptr;
  std::optional<RawTable> raw;
};

const std::vector<Column> kLpColumns = {
    {"value", "empirical L^p norm (sum w|X|^p / sum w)^(1/p)"},
    {"ci_low", "bootstrap 95% lower bound"},
    {"ci_high", "bootstrap 95% upper bound"},
    {"samples", "draws"},
    {"effective_samples", "draws inside the energy cutoff"},
};

std::vector<Cell> lp_cells(const LpEstimate& e) {
  return {e.value, e.ci_low, e.ci_high, static_cast<long long>(e.samples),
          static_cast<long long>(e.effective_samples)};
}

std::vector<Column> with_lp(std::vector<Column> head) {
  head.insert(head.end(), kLpColumns.begin(), kLpColumns.end());
  return head;
}

std::vector<Cell> cat(std::vector<Cell> a, const std::vector<Cell>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Table fit_table() {
  Table t;
  t.columns = {{"quantity", "what was fitted"},
               {"key", "fixed parameter of the fit"},
               {"slope", "least squares slope of log value against log abscissa"},
               {"intercept", "intercept of the same fit"},
               {"residual", "root mean square of the log residuals"},
               {"points", "points used (nonpositive values are left out)"}};
  return t;
}

void add_fit(Table& t, const std::string& quantity, Cell key, const RateFit& f) {
  t.add({quantity, std::move(key), f.slope, f.intercept, f.residual,
         static_cast<long long>(f.log_x.size())});
}

json fit_json(const RateFit& f) {
  return {{"slope", number_or_tag(f.slope)},
          {"intercept", number_or_tag(f.intercept)},
          {"residual", number_or_tag(f.residual)}};
}

// ---------------------------------------------------------------------------
// Commands.

Ensemble ensemble_of(const RunConfig& c, int workers) {
  Ensemble e;
  e.spec = c.ensemble;
  e.samples = c.samples;
  e.workers = workers;
  return e;
}

Artifacts run_sample(const RunConfig& c) {
  Artifacts a;
  const PhaseState p = sample(c.ensemble, static_cast<std::uint64_t>(c.index));
  a.documents.emplace_back("state.json", state_to_json(p),
                           "phase-space state {u, v}, each {max_mode, coeffs: [[n1, n2, re, im]]}");
  a.summary = {{"index", c.index}, {"max_mode", p.u.max_mode()}};
  return a;
}

Artifacts run_evolve(const RunConfig& c) {
  Artifacts a;
  const PhaseState p0 = c.state_path.empty()
                            ? sample(c.ensemble, static_cast<std::uint64_t>(c.index))
                            : load_state(c.state_path);
  const ModelSpec model{c.equation, c.n};
  const long steps = step_count(c.t_final, c.integrator.dt);
  Table t;
  t.columns = {{"t", "time"},
               {"E", "Hamiltonian"},
               {"E_N", "truncated energy"},
               {"E_sN", "renormalized energy"},
               {"sobolev_norm", "H^sigma x H^(sigma-1) norm of the state"}};
  double e0 = 0.0, drift = 0.0;
  const auto observe = [&](long step, double time, const PhaseState& x) {
    const double en = truncated_energy(x, c.n, c.equation);
    if (step == 0) e0 = en;
    else
      drift = std::max(drift, e0 != 0.0 ? std::abs(en - e0) / std::abs(e0) : std::abs(en));
    if (step % c.stride != 0 && step != steps) return;
    t.add({time, hamiltonian(x, c.equation), en, renormalized_energy(x, c.s, c.n, c.equation),
           sobolev_norm(x, c.sigma)});
  };
  const PhaseState pf = evolve(p0, c.t_final, model, c.integrator, observe);
  a.tables.emplace_back("trajectory.csv", std::move(t));
  a.documents.emplace_back("final_state.json", state_to_json(pf), "state at t_final");
  a.summary = {{"steps", steps}, {"max_relative_drift_E_N", drift}};
  return a;
}

Artifacts run_diagnose(const RunConfig& c) {
  Artifacts a;
  const auto report = energy_report(load_state(c.state_path), c.s, c.n, c.equation);
  a.documents.emplace_back("report.json", report_to_json(report),
                           "energies, derivative parts Q1..Q3 (+Q_extra) and chaos parts J1..J3");
  return a;
}

Artifacts run_mc_lp(const RunConfig& c, int workers) {
  Artifacts a;
  const auto res = theorem2_experiment(ensemble_of(c, workers), c.n_list, c.p_list, c.functional);
  Table est;
  est.columns = with_lp({{"N", "truncation"}, {"r", "energy cutoff used"}, {"p", "exponent"}});
  json r_used = json::object();
  for (const auto& row : res.rows) {
    est.add(cat({static_cast<long long>(row.n), row.r, row.estimate.p}, lp_cells(row.estimate)));
    r_used[std::to_string(row.n)] = number_or_tag(row.r);
  }
  Table fits = fit_table();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.p_fits.size(); ++i) {
    add_fit(fits, "log_value_vs_log_p", static_cast<long long>(c.n_list[i]), res.p_fits[i]);
    worst = std::max(worst, res.p_fits[i].slope + res.p_fits[i].residual);
  }
  Table uni;
  uni.columns = {{"p", "exponent"}, {"max_over_min", "max/min of the estimates over N"}};
  for (std::size_t j = 0; j < c.p_list.size(); ++j) uni.add({c.p_list[j], res.ratio_over_n[j]});
  a.tables.emplace_back("estimates.csv", std::move(est));
  a.tables.emplace_back("fits.csv", std::move(fits));
  a.tables.emplace_back("uniformity.csv", std::move(uni));
  a.summary = {{"functional", to_string(c.functional.kind)},
               {"max_p_slope", number_or_tag(res.max_p_slope)},
               {"max_p_slope_plus_residual", number_or_tag(worst)}};
  a.r_used = r_used;
  a.raw = res.raw;
  return a;
}

Artifacts run_mc_converge(const RunConfig& c, int workers) {
  Artifacts a;
  const Ensemble e = ensemble_of(c, workers);
  const auto res = lemma_nm_study(e, c.m_list, c.p, c.n_ref);
  Table est;
  est.columns = with_lp({{"M", "lower truncation"},
                         {"part", "total = F_Nref - F_M, or one chaos part of it"},
                         {"p", "exponent"}});
  for (const auto& row : res.rows) {
    const auto m = static_cast<long long>(row.m);
    est.add(cat({m, std::string("total"), c.p}, lp_cells(row.total)));
    est.add(cat({m, std::string("J1_tilde"), c.p}, lp_cells(row.j1_tilde)));
    est.add(cat({m, std::string("J2"), c.p}, lp_cells(row.j2)));
    est.add(cat({m, std::string("J3"), c.p}, lp_cells(row.j3)));
  }
  Table fits = fit_table();
  const auto nref = static_cast<long long>(res.n_ref);
  add_fit(fits, "total_vs_M", nref, res.fit);
  add_fit(fits, "J1_tilde_vs_M", nref, res.fit_j1_tilde);
  add_fit(fits, "J2_vs_M", nref, res.fit_j2);
  add_fit(fits, "J3_vs_M", nref, res.fit_j3);
  a.tables.emplace_back("estimates.csv", std::move(est));
  a.tables.emplace_back("fits.csv", std::move(fits));
  a.summary = {{"N_ref", res.n_ref}, {"monotone", res.monotone}, {"fit", fit_json(res.fit)}};
  EnsembleSpec spec = e.spec;
  spec.truncation_n = res.n_ref;
  spec.sample_max_mode = std::max(spec.sample_max_mode, res.n_ref);
  a.r_used = number_or_tag(resolve_cutoff(spec, workers));
  a.raw = res.raw;
  return a;
}

Artifacts run_mc_chaos(const RunConfig& c, int workers) {
  Artifacts a;
  const auto res = chaos_growth_check(c.functional, ensemble_of(c, workers), c.p_list);
  Table est;
  est.columns = {{"p", "exponent"},
                 {"value", "empirical L^p norm"},
                 {"ci_low", "bootstrap 95% lower bound"},
                 {"ci_high", "bootstrap 95% upper bound"},
                 {"l2", "empirical L^2 norm"},
                 {"ratio", "value / l2"},
                 {"bound", "(p-1)^(k/2), k the chaos degree"},
                 {"allowance", "bound * (1 + 3 * relative CI width)"},
                 {"pass", "ratio <= allowance"}};
  for (const auto& row : res.rows)
    est.add({row.p, row.estimate.value, row.estimate.ci_low, row.estimate.ci_high,
             res.l2.value, row.ratio, row.bound, row.allowance, row.pass});
  a.tables.emplace_back("estimates.csv", std::move(est));
  a.summary = {{"functional", to_string(c.functional.kind)},
               {"degree", res.degree},
               {"pass", res.pass}};
  a.r_used = number_or_tag(resolve_cutoff(c.ensemble, workers));
  a.raw = res.raw;
  return a;
}

Artifacts run_mc_kin(const RunConfig& c, int workers) {
  Artifacts a;
  const auto& f = c.functional;
  const auto res = sup_norm_moment_study(ensemble_of(c, workers), f.alpha, f.on_v, c.m_list,
                                         c.p, f.oversample);
  Table est;
  est.columns = with_lp({{"M", "dyadic block"}, {"p", "exponent"}});
  for (const auto& row : res.rows)
    est.add(cat({static_cast<long long>(row.m), c.p}, lp_cells(row.estimate)));
  Table fits = fit_table();
  add_fit(fits, "sup_norm_vs_M", c.p, res.fit);
  a.tables.emplace_back("estimates.csv", std::move(est));
  a.tables.emplace_back("fits.csv", std::move(fits));
  a.summary = {{"field", f.on_v ? "v" : "u"},
               {"alpha", {f.alpha.a1, f.alpha.a2}},
               {"fit", fit_json(res.fit)}};
  a.r_used = number_or_tag(resolve_cutoff(c.ensemble, workers));
  a.raw = res.raw;
  return a;
}

Artifacts run_mc_tail(const RunConfig& c, int workers) {
  Artifacts a;
  const auto res = tail_estimate_study(ensemble_of(c, workers), c.m_list, c.alpha_list,
                                       c.std_multiples);
  Table est;
  est.columns = {{"M", "lower truncation"},
                 {"alpha", "threshold"},
                 {"exceedances", "draws with |F_N - F_M| > alpha"},
                 {"probability", "exceedances / effective draws, or 1/effective draws when bound_only"},
                 {"ci_low", "Wilson 95% lower bound"},
                 {"ci_high", "Wilson 95% upper bound"},
                 {"bound_only", "no exceedance seen; probability is an upper bound"}};
  for (const auto& row : res.rows)
    est.add({static_cast<long long>(row.m), row.alpha, static_cast<long long>(row.exceedances),
             row.probability, row.ci_low, row.ci_high, row.bound_only});
  a.tables.emplace_back("estimates.csv", std::move(est));
  a.summary = {{"N", c.ensemble.truncation_n},
               {"monotone_in_alpha", res.monotone_in_alpha},
               {"monotone_in_M", res.monotone_in_m}};
  a.r_used = number_or_tag(resolve_cutoff(c.ensemble, workers));
  a.raw = res.raw;
  return a;
}

Artifacts run_kakutani(const RunConfig& c) {
  Artifacts a;
  const auto tab = kakutani_terms(c.s, c.n, c.marginal);
  Table t;
  t.columns = {{"radius_sq", "|n|^2 of the shell"},
               {"multiplicity", "lattice points on the shell"},
               {"S_n", "Kakutani term of one point"},
               {"weighted", "multiplicity * S_n"},
               {"partial_sum", "sum of weighted terms up to this shell"}};
  for (const auto& sh : tab.shells)
    t.add({static_cast<long long>(sh.radius_sq), static_cast<long long>(sh.multiplicity), sh.term,
           sh.weighted, sh.partial_sum});
  a.tables.emplace_back("kakutani.csv", std::move(t));
  a.summary = {{"marginal", c.marginal == Marginal::u ? "u" : "v"}, {"total", tab.total}};
  return a;
}

Artifacts execute(const RunConfig& c, int workers) {
  const auto& cmd = c.command;
  if (cmd == "sample") return run_sample(c);
  if (cmd == "evolve") return run_evolve(c);
  if (cmd == "diagnose") return run_diagnose(c);
  if (cmd == "mc-lp") return run_mc_lp(c, workers);
  if (cmd == "mc-converge") return run_mc_converge(c, workers);
  if (cmd == "mc-chaos") return run_mc_chaos(c, workers);
  if (cmd == "mc-kin") return run_mc_kin(c, workers);
  if (cmd == "mc-tail") return run_mc_tail(c, workers);
  if (cmd == "kakutani") return run_kakutani(c);
  throw ValidationError("unknown command '" + cmd + "'");
}

Table raw_table(const RawTable& raw) {
  Table t;
  t.columns.push_back({"draw", "sample index"});
  for (const auto& name : raw.columns) t.columns.push_back({name, "per-draw value"});
  const std::size_t n = raw.data.empty() ? 0 : raw.data.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Cell> row{static_cast<long long>(i)};
    for (const auto& col : raw.data) row.emplace_back(col[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
  if (!out) throw Error("failed writing " + path.string());
}

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d = {
      {"sample", "draw one state from an ensemble and write it as field JSON"},
      {"evolve", "integrate the truncated flow and write the energy trajectory"},
      {"diagnose", "energy report of a state file"},
      {"mc-lp", "L^p norms of the energy derivative across N and p"},
      {"mc-converge", "decay of F_Nref - F_M in M, split into chaos parts"},
      {"mc-chaos", "moment growth of a fixed-degree chaos against (p-1)^(k/2)"},
      {"mc-kin", "moments of sup norms of dyadic blocks"},
      {"mc-tail", "exceedance probabilities of |F_N - F_M|"},
      {"kakutani", "Kakutani terms of the two Gaussian measures by lattice shell"},
  };
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------

int ConfigDocument::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    if (const auto it = lines.find(p); it != lines.end()) return it->second;
    if (p.empty()) return 1;
    p.erase(p.rfind('/'));
  }
}

ConfigDocument parse_config_text(const std::string& text, const std::string& source) {
  ConfigDocument d;
  d.source = source;
  const LineIndex index(text);
  std::size_t mark = 0;
  const auto here = [&] { return index.line(mark == 0 ? 0 : mark - 1); };

  struct Frame {
    bool array;
    std::string key;
    long next = 0;
  };
  std::vector<Frame> stack;
  const auto pointer = [&](bool element) {
    std::string s;
    for (std::size_t i = 0; i < stack.size(); ++i) {
      const auto& f = stack[i];
      if (!f.array) s += "/" + escape_token(f.key);
      else if (i + 1 < stack.size() || element) s += "/" + std::to_string(f.next);
    }
    return s;
  };
  const auto element_begins = [&] {
    if (!stack.empty() && stack.back().array) d.lines[pointer(true)] = here();
  };
  const auto element_ends = [&] {
    if (!stack.empty() && stack.back().array) ++stack.back().next;
  };

  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
      case json::parse_event_t::array_start:
        element_begins();
        if (stack.empty()) d.lines[""] = here();
        stack.push_back({ev == json::parse_event_t::array_start, {}, 0});
        break;
      case json::parse_event_t::key:
        stack.back().key = parsed.get<std::string>();
        d.lines[pointer(false)] = here();
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        stack.pop_back();
        element_ends();
        break;
      case json::parse_event_t::value:
        element_begins();
        element_ends();
        break;
    }
    return true;
  };

  const char* base = text.data();
  try {
    d.doc = json::parse(TrackingIterator(base, base, &mark),
                        TrackingIterator(base + text.size(), base, nullptr), cb,
                        /*allow_exceptions=*/true, /*ignore_comments=*/false);
  } catch (const json::parse_error& e) {
    const std::size_t at = e.byte == 0 ? 0 : e.byte - 1;
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ValidationError(source + ":" + std::to_string(index.line(at)) + ":" +
                          std::to_string(index.column(at)) + ": invalid JSON: " + what);
  }
  return d;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"sample",      "evolve",   "diagnose",
                                             "mc-lp",       "mc-converge", "mc-chaos",
                                             "mc-kin",      "mc-tail",  "kakutani"};
  return c;
}

RunConfig resolve_config(const std::string& command, const ConfigDocument& doc,
                         const std::string& base_dir) {
  const auto& cmds = commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw ValidationError("unknown command '" + command + "'");
  const Reader r(doc);
  if (!doc.doc.is_object()) r.fail("", "config must be a JSON object");
  r.object("", {"model", "ensemble", "integrator", "experiment", "state", "output"});
  r.object("/model", {"equation", "s", "beta", "N"});
  r.object("/ensemble", {"variant", "s", "beta", "sample_max_mode", "truncation_N", "r", "seed",
                         "samples"});
  r.object("/integrator", {"scheme", "dt", "t_final", "stride", "sigma"});
  r.object("/experiment", {"N_list", "M_list", "p_list", "alpha_list", "std_multiples", "p",
                           "p_cap", "N_ref", "functional", "M", "alpha", "field", "oversample",
                           "value", "index", "marginal"});
  r.object("/output", {"directory", "emit_raw"});

  RunConfig c;
  c.command = command;
  const bool mc = command.rfind("mc-", 0) == 0;

  // model
  try {
    c.equation.kind = equation_kind_from_string(r.string("/model/equation", "nlkg"));
  } catch (const std::exception& e) {
    r.fail("/model/equation", e.what());
  }
  c.equation.beta = r.number("/model/beta", 2.0);
  if (c.equation.kind == Equation::Kind::nlkg_beta && !(c.equation.beta > 1.0))
    r.fail("/model/beta", "beta must be > 1");
  c.s = r.number("/model/s", 2.0);
  c.n = static_cast<int>(r.integer("/model/N", 8));
  if (c.n < 0) r.fail("/model/N", "must be >= 0");

  // ensemble
  auto& e = c.ensemble;
  const std::string variant = r.string("/ensemble/variant", to_string(default_variant(c.equation)));
  try {
    e.variant = measure_variant_from_string(variant);
  } catch (const std::exception& ex) {
    r.fail("/ensemble/variant", ex.what());
  }
  e.s = r.number("/ensemble/s", c.s);
  e.beta = r.number("/ensemble/beta", c.equation.beta);
  e.truncation_n = static_cast<int>(r.integer("/ensemble/truncation_N", c.n));
  e.sample_max_mode = static_cast<int>(r.integer("/ensemble/sample_max_mode", e.truncation_n));
  e.master_seed = r.unsigned_integer("/ensemble/seed", 0);
  c.samples = r.integer("/ensemble/samples", 10000);
  if (const json* rv = r.find("/ensemble/r")) {
    if (rv->is_string() && rv->get<std::string>() == "auto") e.cutoff = EnergyCutoff::automatic();
    else if ((rv->is_string() && rv->get<std::string>() == "inf") || rv->is_null())
      e.cutoff = EnergyCutoff::infinite();
    else if (rv->is_number()) e.cutoff = EnergyCutoff::fixed(rv->get<double>());
    else r.fail("/ensemble/r", "expected a positive number, \"auto\" or \"inf\"");
  } else {
    e.cutoff = command == "mc-lp" ? EnergyCutoff::automatic() : EnergyCutoff::infinite();
  }

  // integrator
  try {
    c.integrator.scheme = scheme_from_string(r.string("/integrator/scheme", "strang_splitting"));
  } catch (const std::exception& ex) {
    r.fail("/integrator/scheme", ex.what());
  }
  c.integrator.dt = r.number("/integrator/dt", 1e-3);
  c.t_final = r.number("/integrator/t_final", 1.0);
  c.stride = r.integer("/integrator/stride", 1);
  c.sigma = r.number("/integrator/sigma", 1.0);

  // experiment
  c.n_list = r.integers("/experiment/N_list", {8, 16, 32});
  c.m_list = r.integers("/experiment/M_list",
                        command == "mc-kin" ? std::vector<int>{2, 4, 8, 16}
                        : command == "mc-tail" ? std::vector<int>{8, 32}
                                               : std::vector<int>{4, 8, 16, 32});
  std::vector<double> default_p = {2.0, 4.0, 8.0};
  if (command == "mc-chaos") default_p = {4.0, 8.0};
  c.p_list = r.numbers("/experiment/p_list", default_p);
  c.alpha_list = r.numbers("/experiment/alpha_list", {});
  c.std_multiples = r.numbers("/experiment/std_multiples",
                              command == "mc-tail" && !r.has("/experiment/alpha_list")
                                  ? std::vector<double>{2.0}
                                  : std::vector<double>{});
  c.p = r.number("/experiment/p", command == "mc-kin" ? 4.0 : 2.0);
  c.p_cap = r.number("/experiment/p_cap", 16.0);
  c.n_ref = static_cast<int>(r.integer("/experiment/N_ref", 0));
  c.index = r.integer("/experiment/index", 0);
  if (c.index < 0) r.fail("/experiment/index", "must be >= 0");

  const std::string fname = r.string("/experiment/functional",
                                     command == "mc-chaos" ? "wick_quadratic"
                                     : command == "mc-kin" ? "sup_norm_block"
                                                           : "q_total");
  try {
    c.functional.kind = functional_kind_from_string(fname);
  } catch (const ValidationError& ex) {
    r.fail("/experiment/functional", ex.what());
  }
  c.functional.m = static_cast<int>(r.integer("/experiment/M", 0));
  c.functional.value = r.number("/experiment/value", 0.0);
  c.functional.oversample = static_cast<int>(r.integer("/experiment/oversample", 4));
  const auto alpha = r.integers("/experiment/alpha", {0, 0});
  if (alpha.size() != 2 || alpha[0] < 0 || alpha[1] < 0)
    r.fail("/experiment/alpha", "expected two non-negative integers");
  c.functional.alpha = {alpha[0], alpha[1]};
  const std::string field = r.string("/experiment/field", "u");
  if (field != "u" && field != "v") r.fail("/experiment/field", "expected \"u\" or \"v\"");
  c.functional.on_v = field == "v";
  const std::string marginal = r.string("/experiment/marginal", "u");
  if (marginal != "u" && marginal != "v") r.fail("/experiment/marginal", "expected \"u\" or \"v\"");
  c.marginal = marginal == "u" ? Marginal::u : Marginal::v;

  if (const json* st = r.find("/state")) {
    if (!st->is_string()) r.fail("/state", "expected a file path");
    fs::path p(st->get<std::string>());
    if (p.is_relative()) p = fs::path(base_dir) / p;
    c.state_path = p.lexically_normal().string();
  }

  c.output_dir = r.string("/output/directory", "out");
  c.emit_raw = r.boolean("/output/emit_raw", false);

  // ---- validation, before anything runs
  const bool ensemble_used =
      uses_ensemble(command) || (command == "evolve" && c.state_path.empty());
  const bool needs_state =
      command == "diagnose" || (ensemble_used && e.variant == MeasureVariant::point_mass);
  if (needs_state && c.state_path.empty()) r.fail("/state", "this run needs a state file");
  if (ensemble_used && e.variant != MeasureVariant::point_mass) {
    try {
      e.validate();
    } catch (const ValidationError& ex) {
      r.fail("/ensemble" + ex.path(), ex.what());
    }
  }
  if (e.cutoff.kind == EnergyCutoff::Kind::fixed && !(e.cutoff.r > 0.0))
    r.fail("/ensemble/r", "energy cutoff r must be positive");
  if (mc && c.samples < 100) r.fail("/ensemble/samples", "Monte Carlo runs need >= 100 samples");
  if (c.samples < 1) r.fail("/ensemble/samples", "must be >= 1");
  if (!(c.p_cap >= 1.0)) r.fail("/experiment/p_cap", "must be >= 1");

  const auto check_p = [&](double p, const std::string& ptr) {
    if (!(p >= 1.0)) r.fail(ptr, "p must be >= 1");
    if (p > c.p_cap) r.fail(ptr, "p exceeds p_cap = " + format_number(c.p_cap));
  };
  const auto check_list_nonempty = [&](std::size_t n, const std::string& ptr) {
    if (n == 0) r.fail(ptr, "must not be empty");
  };

  if (command == "evolve") {
    if (!(c.integrator.dt > 0.0)) r.fail("/integrator/dt", "must be > 0");
    if (c.stride < 1) r.fail("/integrator/stride", "must be >= 1");
  }
  if (command == "diagnose" && !(c.s >= 0.0)) r.fail("/model/s", "must be >= 0");
  if (command == "kakutani" && !(c.s > 0.0)) r.fail("/model/s", "must be > 0");

  const auto& f = c.functional;
  if (command == "mc-lp") {
    check_list_nonempty(c.n_list.size(), "/experiment/N_list");
    check_list_nonempty(c.p_list.size(), "/experiment/p_list");
    for (std::size_t i = 0; i < c.n_list.size(); ++i)
      if (c.n_list[i] < 0) r.fail("/experiment/N_list/" + std::to_string(i), "must be >= 0");
    for (std::size_t i = 0; i < c.p_list.size(); ++i)
      check_p(c.p_list[i], "/experiment/p_list/" + std::to_string(i));
    if (is_q_functional(f.kind)) {
      const double s = e.s;
      if (!(s >= 2.0 && std::floor(s) == s && std::fmod(s, 2.0) == 0.0))
        r.fail(r.has("/ensemble/s") ? "/ensemble/s" : "/model/s",
               "the derivative functionals need an even integer s >= 2");
    }
    if (f.kind == Functional::Kind::f_n_minus_f_m) {
      if (f.m < 0) r.fail("/experiment/M", "must be >= 0");
      for (int n : c.n_list)
        if (f.m > n) r.fail("/experiment/M", "must not exceed any entry of N_list");
    }
    if (f.kind == Functional::Kind::sup_norm_block && f.oversample < 2)
      r.fail("/experiment/oversample", "must be >= 2");
  }
  if (command == "mc-converge") {
    check_list_nonempty(c.m_list.size(), "/experiment/M_list");
    check_p(c.p, "/experiment/p");
    const int m_max = *std::max_element(c.m_list.begin(), c.m_list.end());
    for (std::size_t i = 0; i < c.m_list.size(); ++i)
      if (c.m_list[i] < 1) r.fail("/experiment/M_list/" + std::to_string(i), "must be >= 1");
    if (c.n_ref < 0) r.fail("/experiment/N_ref", "must be >= 0 (0 selects 2 * max(M_list))");
    if (c.n_ref == 0) c.n_ref = 2 * m_max;
    if (m_max > c.n_ref) r.fail("/experiment/N_ref", "must be >= every entry of M_list");
  }
  if (command == "mc-chaos") {
    check_list_nonempty(c.p_list.size(), "/experiment/p_list");
    for (std::size_t i = 0; i < c.p_list.size(); ++i)
      check_p(c.p_list[i], "/experiment/p_list/" + std::to_string(i));
    if (chaos_degree(f.kind) < 0)
      r.fail("/experiment/functional", "'" + to_string(f.kind) + "' has no fixed chaos degree");
  }
  if (command == "mc-kin") {
    check_list_nonempty(c.m_list.size(), "/experiment/M_list");
    check_p(c.p, "/experiment/p");
    const double reg = f.on_v ? e.s - 1.0 : e.s;
    if (f.alpha.order() > reg)
      r.fail("/experiment/alpha", "|alpha| must be <= " + format_number(reg) + " for the " +
                                      (f.on_v ? "v" : "u") + " field");
    if (f.oversample < 2) r.fail("/experiment/oversample", "must be >= 2");
    for (std::size_t i = 0; i < c.m_list.size(); ++i)
      if (c.m_list[i] < 1) r.fail("/experiment/M_list/" + std::to_string(i), "must be >= 1");
  }
  if (command == "mc-tail") {
    check_list_nonempty(c.m_list.size(), "/experiment/M_list");
    for (std::size_t i = 0; i < c.m_list.size(); ++i)
      if (c.m_list[i] < 0 || c.m_list[i] >= e.truncation_n)
        r.fail("/experiment/M_list/" + std::to_string(i), "needs 0 <= M < truncation_N");
    for (std::size_t i = 0; i < c.alpha_list.size(); ++i)
      if (c.alpha_list[i] < 0.0) r.fail("/experiment/alpha_list/" + std::to_string(i), "must be >= 0");
    for (std::size_t i = 0; i < c.std_multiples.size(); ++i)
      if (c.std_multiples[i] < 0.0)
        r.fail("/experiment/std_multiples/" + std::to_string(i), "must be >= 0");
    if (c.alpha_list.empty() && c.std_multiples.empty())
      r.fail("/experiment", "give alpha_list or std_multiples");
  }
  return c;
}

json to_json(const RunConfig& c) {
  const auto& e = c.ensemble;
  json j;
  j["model"] = {{"equation", to_string(c.equation.kind)},
                {"s", c.s},
                {"beta", c.equation.beta},
                {"N", c.n}};
  j["ensemble"] = {{"variant", to_string(e.variant)},
                   {"s", e.s},
                   {"beta", e.beta},
                   {"sample_max_mode", e.sample_max_mode},
                   {"truncation_N", e.truncation_n},
                   {"r", cutoff_to_json(e.cutoff)},
                   {"seed", e.master_seed},
                   {"samples", c.samples}};
  j["integrator"] = {{"scheme", to_string(c.integrator.scheme)},
                     {"dt", c.integrator.dt},
                     {"t_final", c.t_final},
                     {"stride", c.stride},
                     {"sigma", c.sigma}};
  j["experiment"] = {{"N_list", c.n_list},
                     {"M_list", c.m_list},
                     {"p_list", c.p_list},
                     {"alpha_list", c.alpha_list},
                     {"std_multiples", c.std_multiples},
                     {"p", c.p},
                     {"p_cap", c.p_cap},
                     {"N_ref", c.n_ref},
                     {"functional", to_string(c.functional.kind)},
                     {"M", c.functional.m},
                     {"alpha", {c.functional.alpha.a1, c.functional.alpha.a2}},
                     {"field", c.functional.on_v ? "v" : "u"},
                     {"oversample", c.functional.oversample},
                     {"value", c.functional.value},
                     {"index", c.index},
                     {"marginal", c.marginal == Marginal::u ? "u" : "v"}};
  if (!c.state_path.empty()) j["state"] = c.state_path;
  j["output"] = {{"directory", c.output_dir}, {"emit_raw", c.emit_raw}};
  return j;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string version_string() {
  return std::string("qiwave ") + QIWAVE_VERSION + " (" + QIWAVE_REVISION + ")";
}

int run(const std::string& command, const std::string& config_path, const Options& opt,
        std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (opt.workers < 1) throw ValidationError("--workers must be >= 1");
    const ConfigDocument doc = load_config(config_path);
    const std::string base_dir = fs::path(config_path).parent_path().string();
    RunConfig c = resolve_config(command, doc, base_dir.empty() ? "." : base_dir);
    if (opt.out) c.output_dir = *opt.out;
    else if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.output_dir = env;
    if (c.ensemble.variant == MeasureVariant::point_mass)
      c.ensemble.point = std::make_shared<PhaseState>(load_state(c.state_path));

    Artifacts a = execute(c, opt.workers);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir(c.output_dir);
    fs::create_directories(dir);
    json schema = {{"command", command}, {"files", json::object()}};
    json files = json::array();
    for (const auto& [name, table] : a.tables) {
      write_file(dir / name, table.render());
      schema["files"][name] = table.schema();
      files.push_back(name);
    }
    for (const auto& [name, body, what] : a.documents) {
      write_file(dir / name, body.dump(1) + "\n");
      schema["files"][name] = {{"format", "json"}, {"description", what}};
      files.push_back(name);
    }
    if (c.emit_raw && a.raw) {
      const Table raw = raw_table(*a.raw);
      write_file(dir / "raw.csv", raw.render());
      schema["files"]["raw.csv"] = raw.schema();
      files.push_back("raw.csv");
    }
    const json config = to_json(c);
    write_file(dir / "config.json", config.dump(2) + "\n");
    files.push_back("config.json");
    schema["files"]["config.json"] = {{"format", "json"},
                                      {"description", "resolved config, defaults applied"}};
    schema["files"]["metadata.json"] = {
        {"format", "json"},
        {"description", "config echo, seed, version, wall time, cutoff used and a summary"}};
    files.push_back("schema.json");
    files.push_back("metadata.json");
    write_file(dir / "schema.json", schema.dump(2) + "\n");

    json meta = {{"command", command},
                 {"version", version_string()},
                 {"config_file", config_path},
                 {"seed", c.ensemble.master_seed},
                 {"workers", opt.workers},
                 {"wall_time_seconds", wall},
                 {"r_used", a.r_used},
                 {"summary", a.summary},
                 {"files", files},
                 {"config", config}};
    write_file(dir / "metadata.json", meta.dump(2) + "\n");
    log << command << ": wrote " << files.size() << " files to " << dir.string() << '\n';
    return kExitOk;
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const UnsupportedParameter& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IntegrationError& e) {
    log << "runtime error: " << e.what() << " (step " << e.step() << ")\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    log << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Truncated cubic wave dynamics, renormalized energies and Monte Carlo checks"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  std::string config;
  Options opt;
  std::string out;
  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name, descriptions().at(name));
    sub->add_option("config", config, "JSON config file")->required();
    sub->add_option("-j,--workers", opt.workers, "worker threads (outputs do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_option("-o,--out", out,
                    std::string("output directory; overrides ") + kOutputDirEnv +
                        " and output.directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (!out.empty()) opt.out = out;
  return run(app.get_subcommands().front()->get_name(), config, opt, std::cerr);
}

}  // namespace qiwave::cli
