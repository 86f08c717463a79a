#pragma once

#include <json.hpp>

#include "qiwave/spectral_field.hpp"

namespace qiwave {

// {"max_mode": K, "coeffs": [[n1, n2, re, im], ...]} listing the index set
// Λ = {n2 > 0} ∪ {n2 = 0, n1 >= 0}; the conjugate half is implied.
nlohmann::json field_to_json(const SpectralField& f);
SpectralField field_from_json(const nlohmann::json& j);

// {"u": field, "v": field}
nlohmann::json state_to_json(const PhaseState& p);
PhaseState state_from_json(const nlohmann::json& j);

PhaseState load_state(const std::string& path);
void save_state(const PhaseState& p, const std::string& path);

}  // namespace qiwave
