#pragma once

#include "parkcrit/arrival_law.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace parkcrit {

/// Accepted forms:
///   {"finite": ["27/28", "0", "1/28"]}            entries exact (numbers read by their decimal text)
///   {"family": {"name": "binary0k", "alpha": "1/14", "k": 2}}
///   {"family": {"name": "poisson" | "geometric", "alpha": 0.1}}
///   {"family": {"name": "nongeneric_example", "mix": 0.1}}
/// alpha may be a number or a rational string. Malformed documents raise
/// InvalidInput; law validation errors pass through unchanged.
ArrivalLaw law_from_json(const nlohmann::json& doc);
ArrivalLaw load_law(const std::filesystem::path& path);

/// Inverse of law_from_json for every law it can produce.
nlohmann::json law_to_json(const ArrivalLaw& law);

} // namespace parkcrit
