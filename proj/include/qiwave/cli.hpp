#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qiwave/dynamics.hpp"
#include "qiwave/leibniz.hpp"
#include "qiwave/measures.hpp"
#include "qiwave/montecarlo.hpp"
#include "qiwave/sampler.hpp"

namespace qiwave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// A parsed config together with the source line of every JSON pointer in it.
struct ConfigDocument {
  nlohmann::json doc;
  std::map<std::string, int> lines;
  std::string source;  // file name used in messages

  // Line of `pointer`, or of its closest present ancestor.
  int line_of(const std::string& pointer) const;
};

// Throws ValidationError("source:line:col: ...") on malformed JSON.
ConfigDocument parse_config_text(const std::string& text, const std::string& source);
ConfigDocument load_config(const std::string& path);

const std::vector<std::string>& commands();

struct RunConfig {
  std::string command;

  // model
  Equation equation;
  double s = 2.0;
  int n = 8;

  // ensemble
  EnsembleSpec ensemble;
  long samples = 10000;

  // integrator
  IntegratorSpec integrator;
  double t_final = 1.0;
  long stride = 1;
  double sigma = 1.0;  // Sobolev index of the trajectory norm

  // experiment
  std::vector<int> n_list, m_list;
  std::vector<double> p_list, alpha_list, std_multiples;
  double p = 2.0;
  double p_cap = 16.0;
  int n_ref = 0;
  Functional functional;
  long index = 0;  // which ensemble draw `sample` and `evolve` use
  Marginal marginal = Marginal::u;

  std::string state_path;  // resolved against the config directory

  // output
  std::string output_dir = "out";
  bool emit_raw = false;
};

// Reads, applies defaults and validates.  Every failure is a ValidationError
// whose message carries the config line.
RunConfig resolve_config(const std::string& command, const ConfigDocument& doc,
                         const std::string& base_dir = ".");
// The fully resolved config, in the input format.
nlohmann::json to_json(const RunConfig& c);

struct Options {
  int workers = 1;
  std::optional<std::string> out;  // beats QIWAVE_OUTPUT_DIR beats the config
};

// Environment variable that overrides output.directory.
inline constexpr const char* kOutputDirEnv = "QIWAVE_OUTPUT_DIR";

// Runs one command; writes artifacts and returns the exit status.
int run(const std::string& command, const std::string& config_path,
        const Options& opt, std::ostream& log);

// argv entry point.
int main_entry(int argc, char** argv);

// RFC-4180 field quoting and the number format used in every CSV.
std::string csv_quote(const std::string& field);
std::string format_number(double x);

std::string version_string();

}  // namespace qiwave::cli
