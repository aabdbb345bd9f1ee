#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "rgw/measures.hpp"

namespace rgw {

/// Parses "0.25", "1e-3" or an exact ratio "1/3".
double parse_real(std::string_view text);

/// Reproduction-law schema: {"support":[1,2],"probs":[0.5,0.5]}. Unknown keys are rejected.
/// Probabilities may be numbers or ratio strings such as "1/3".
OffspringLaw law_from_json(const nlohmann::json& j);
ProbVector prob_vector_from_json(const nlohmann::json& j);

/// Accepts inline JSON text or a path to a JSON file.
nlohmann::json load_json_argument(const std::string& text_or_path);

nlohmann::json to_json(const OffspringLaw& law);
nlohmann::json to_json(const ProbVector& rho);

} // namespace rgw
