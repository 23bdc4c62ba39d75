#include "bacnoma/scenario_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace bacnoma::model {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("scenario: " + message);
}

double as_number(const json& j, const char* field) {
  if (!j.is_number()) fail(std::string("field \"") + field + "\" must be a number");
  return j.get<double>();
}

Vec2 as_position(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(std::string("field \"") + field + "\" must be a [x, y] pair");
  }
  return Vec2{j[0].get<double>(), j[1].get<double>()};
}

// Accepts a value given either directly in watts or as "<name>_dbm".
// Exactly one spelling may appear.
double power_field(const json& j, const std::string& name, bool& found) {
  const std::string dbm_name = name + "_dbm";
  const bool has_watts = j.contains(name);
  const bool has_dbm = j.contains(dbm_name);
  if (has_watts && has_dbm) {
    fail("give \"" + name + "\" or \"" + dbm_name + "\", not both");
  }
  found = has_watts || has_dbm;
  if (has_watts) return as_number(j.at(name), name.c_str());
  if (has_dbm) return dbm_to_watts(as_number(j.at(dbm_name), dbm_name.c_str()));
  return 0.0;
}

DevicePlacement placement_from_json(const json& j) {
  DevicePlacement placement;
  if (j.is_array()) {
    placement.kind = DevicePlacement::Kind::Explicit;
    placement.positions.reserve(j.size());
    for (const auto& entry : j) {
      placement.positions.push_back(as_position(entry, "device_placement"));
    }
    return placement;
  }
  if (j.is_object() && j.contains("uniform_square")) {
    placement.kind = DevicePlacement::Kind::UniformSquare;
    placement.edge = as_number(j.at("uniform_square"), "uniform_square");
    return placement;
  }
  fail("field \"device_placement\" must be a list of [x, y] pairs or "
       "{\"uniform_square\": edge}");
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) fail("document must be a JSON object");

  ScenarioConfig config;
  if (!j.contains("M")) fail("missing required field \"M\"");
  if (!j.at("M").is_number_integer()) fail("field \"M\" must be an integer");
  config.m = j.at("M").get<int>();

  if (!j.contains("alpha")) fail("missing required field \"alpha\"");
  config.alpha = as_number(j.at("alpha"), "alpha");

  if (!j.contains("r0")) fail("missing required field \"r0\"");
  config.r0 = as_number(j.at("r0"), "r0");

  bool found = false;
  config.sigma2 = power_field(j, "sigma2", found);
  if (!found) fail("missing required field \"sigma2\" (or \"sigma2_dbm\")");
  config.p_max = power_field(j, "p_max", found);
  if (!found) fail("missing required field \"p_max\" (or \"p_max_dbm\")");

  if (j.contains("bs_position")) {
    config.bs_position = as_position(j.at("bs_position"), "bs_position");
  }
  if (j.contains("user_position")) {
    config.user_position = as_position(j.at("user_position"), "user_position");
  }
  if (j.contains("path_loss_exponent")) {
    config.path_loss_exponent =
        as_number(j.at("path_loss_exponent"), "path_loss_exponent");
  }
  if (j.contains("device_placement")) {
    config.device_placement = placement_from_json(j.at("device_placement"));
  }
  if (j.contains("fading")) {
    if (!j.at("fading").is_boolean()) fail("field \"fading\" must be a boolean");
    config.fading = j.at("fading").get<bool>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      fail("field \"seed\" must be an unsigned integer");
    }
    config.seed = j.at("seed").get<std::uint64_t>();
  }

  config.validate();
  return config;
}

nlohmann::json scenario_to_json(const ScenarioConfig& config) {
  json j;
  j["M"] = config.m;
  j["bs_position"] = {config.bs_position.x, config.bs_position.y};
  j["user_position"] = {config.user_position.x, config.user_position.y};
  if (config.device_placement.kind == DevicePlacement::Kind::Explicit) {
    json list = json::array();
    for (const auto& p : config.device_placement.positions) {
      list.push_back({p.x, p.y});
    }
    j["device_placement"] = std::move(list);
  } else {
    j["device_placement"] = {{"uniform_square", config.device_placement.edge}};
  }
  j["path_loss_exponent"] = config.path_loss_exponent;
  j["alpha"] = config.alpha;
  j["sigma2"] = config.sigma2;
  j["p_max"] = config.p_max;
  j["r0"] = config.r0;
  j["fading"] = config.fading;
  j["seed"] = config.seed;
  return j;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("scenario: " + path + " is not valid JSON (" +
                                e.what() + ")");
  }
  return scenario_from_json(j);
}

}  // namespace bacnoma::model
