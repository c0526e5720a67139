#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace mmc {

/// Result of one observable evaluation. The mode records how trustworthy the
/// number is: exact comes from enumeration or a closed form, lower_estimate
/// and upper_estimate come from candidate searches bounded on one side.
struct Report {
  std::string name;
  double value = 0.0;
  std::string mode;  // exact | lower_estimate | upper_estimate
  nlohmann::json params = nlohmann::json::object();
  std::string family;  // description of the candidate family, empty if none
  std::uint64_t seed = 0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"name", name},     {"value", value}, {"mode", mode},
                          {"params", params}, {"family", family}, {"seed", seed}};
  }
};

}  // namespace mmc
