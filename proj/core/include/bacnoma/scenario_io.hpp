#ifndef BACNOMA_SCENARIO_IO_HPP
#define BACNOMA_SCENARIO_IO_HPP

#include <string>

#include <nlohmann/json.hpp>

#include "bacnoma/model.hpp"

namespace bacnoma::model {

// Parses a scenario from JSON. Required fields: M, alpha, r0, one of
// sigma2 | sigma2_dbm, and one of p_max | p_max_dbm. Optional fields with
// defaults: bs_position [0,0], user_position [3,0], path_loss_exponent 3,
// device_placement {"uniform_square": 5} (or a list of [x,y] pairs),
// fading true, seed. Throws std::invalid_argument naming the bad field.
// The result has been validated.
ScenarioConfig scenario_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const ScenarioConfig& config);

// Reads and parses a scenario file. Throws std::runtime_error if the file
// cannot be read, std::invalid_argument on malformed content.
ScenarioConfig load_scenario(const std::string& path);

}  // namespace bacnoma::model

#endif  // BACNOMA_SCENARIO_IO_HPP
