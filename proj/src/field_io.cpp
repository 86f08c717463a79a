#include "qiwave/field_io.hpp"

#include <cmath>
#include <fstream>

#include "qiwave/errors.hpp"

namespace qiwave {

using nlohmann::json;

json field_to_json(const SpectralField& f) {
  const int k = f.max_mode();
  json coeffs = json::array();
  auto emit = [&](int n1, int n2) {
    const Complex c = f(n1, n2);
    coeffs.push_back({n1, n2, c.real(), c.imag()});
  };
  for (int n1 = 0; n1 <= k; ++n1) emit(n1, 0);
  for (int n2 = 1; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1) emit(n1, n2);
  return {{"max_mode", k}, {"coeffs", std::move(coeffs)}};
}

SpectralField field_from_json(const json& j) {
  if (!j.is_object() || !j.contains("max_mode") || !j.contains("coeffs"))
    throw ValidationError("field needs \"max_mode\" and \"coeffs\"");
  if (!j["max_mode"].is_number_integer() || j["max_mode"].get<int>() < 0)
    throw ValidationError("max_mode must be a nonnegative integer", "/max_mode");
  const int k = j["max_mode"].get<int>();
  const auto& coeffs = j["coeffs"];
  if (!coeffs.is_array()) throw ValidationError("coeffs must be an array", "/coeffs");
  SpectralField f(k);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const auto& e = coeffs[i];
    const std::string where = "/coeffs/" + std::to_string(i);
    if (!e.is_array() || e.size() != 4 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || !e[2].is_number() || !e[3].is_number())
      throw ValidationError("coefficient entry must be [n1, n2, re, im]", where);
    const int n1 = e[0].get<int>();
    const int n2 = e[1].get<int>();
    const double re = e[2].get<double>();
    const double im = e[3].get<double>();
    if (!(n2 > 0 || (n2 == 0 && n1 >= 0)))
      throw ValidationError("mode outside the index set Λ", where);
    if (!f.in_window(n1, n2))
      throw ValidationError("mode outside the declared window", where);
    if (!std::isfinite(re) || !std::isfinite(im))
      throw ValidationError("non-finite coefficient", where);
    if (n1 == 0 && n2 == 0 && im != 0.0)
      throw ValidationError("zero mode must be real", where);
    f.set(n1, n2, Complex(re, im));
  }
  return f;
}

json state_to_json(const PhaseState& p) {
  return {{"u", field_to_json(p.u)}, {"v", field_to_json(p.v)}};
}

PhaseState state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("u") || !j.contains("v"))
    throw ValidationError("state needs \"u\" and \"v\" fields");
  return {field_from_json(j["u"]), field_from_json(j["v"])};
}

PhaseState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open state file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return state_from_json(j);
}

void save_state(const PhaseState& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << state_to_json(p).dump(1) << '\n';
}

}  // namespace qiwave
