#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tma/model.hpp"

namespace tma {

/// Malformed model JSON (schema violation, unknown keys, bad kinds). Maps to
/// CLI exit code 2 together with std::invalid_argument from validate().
struct ModelFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Schema: {"mu1": num, "mu2": num, "phi": [num...], "psi": [num...],
///          "d": int, "r": num, "innovation": {"kind": k, "param": num?}}
/// with kind one of "normal" | "student_t" | "laplace" | "scaled_normal".
/// q is implied by the phi length; unknown keys are rejected. The parsed
/// model is validated before it is returned.
TmaModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const TmaModel& model);

TmaModel load_model_file(const std::string& path);

}  // namespace tma
