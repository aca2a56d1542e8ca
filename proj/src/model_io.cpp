#include "tma/model_io.hpp"

#include <fstream>

namespace tma {

namespace {

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ModelFormatError(std::string("model json: missing or non-numeric '") +
                           key + "'");
  }
  return j[key].get<double>();
}

std::vector<double> array_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ModelFormatError(std::string("model json: missing or non-array '") +
                           key + "'");
  }
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) {
      throw ModelFormatError(std::string("model json: non-numeric entry in '") +
                             key + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

Innovation innovation_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ModelFormatError("model json: 'innovation' must be {\"kind\": ..., \"param\": ...}");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "param") {
      throw ModelFormatError("model json: unknown innovation key '" + key + "'");
    }
  }
  const std::string kind = j["kind"].get<std::string>();
  const bool has_param = j.contains("param");
  if (has_param && !j["param"].is_number()) {
    throw ModelFormatError("model json: innovation 'param' must be numeric");
  }
  try {
    if (kind == "normal") {
      if (has_param) {
        throw ModelFormatError("model json: 'normal' takes no param (use scaled_normal)");
      }
      return Innovation::standard_normal();
    }
    if (!has_param) {
      throw ModelFormatError("model json: innovation '" + kind + "' needs 'param'");
    }
    const double param = j["param"].get<double>();
    if (kind == "student_t") return Innovation::student_t(param);
    if (kind == "laplace") return Innovation::laplace(param);
    if (kind == "scaled_normal") return Innovation::scaled_normal(param);
  } catch (const std::domain_error& e) {
    throw ModelFormatError(std::string("model json: ") + e.what());
  }
  throw ModelFormatError("model json: unknown innovation kind '" + kind + "'");
}

}  // namespace

TmaModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ModelFormatError("model json: top level must be an object");
  static const char* known[] = {"mu1", "mu2", "phi", "psi", "d", "r", "innovation"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ModelFormatError("model json: unknown key '" + key + "'");
  }
  TmaModel m;
  m.mu1 = number_field(j, "mu1");
  m.mu2 = number_field(j, "mu2");
  m.phi = array_field(j, "phi");
  m.psi = array_field(j, "psi");
  if (!j.contains("d") || !j["d"].is_number_integer()) {
    throw ModelFormatError("model json: 'd' must be an integer");
  }
  m.d = j["d"].get<int>();
  m.r = number_field(j, "r");
  if (!j.contains("innovation")) {
    throw ModelFormatError("model json: missing 'innovation'");
  }
  m.innovation = innovation_from_json(j["innovation"]);
  validate(m);
  return m;
}

nlohmann::json model_to_json(const TmaModel& model) {
  nlohmann::json inn;
  switch (model.innovation.kind()) {
    case InnovationKind::StandardNormal:
      inn = {{"kind", "normal"}};
      break;
    case InnovationKind::StudentT:
      inn = {{"kind", "student_t"}, {"param", model.innovation.param()}};
      break;
    case InnovationKind::Laplace:
      inn = {{"kind", "laplace"}, {"param", model.innovation.param()}};
      break;
    case InnovationKind::ScaledNormal:
      inn = {{"kind", "scaled_normal"}, {"param", model.innovation.param()}};
      break;
  }
  return nlohmann::json{{"mu1", model.mu1}, {"mu2", model.mu2},
                        {"phi", model.phi}, {"psi", model.psi},
                        {"d", model.d},     {"r", model.r},
                        {"innovation", inn}};
}

TmaModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError("model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace tma
