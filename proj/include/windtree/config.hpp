#pragma once

// JSON table configurations and built-in presets.
//
// Schema:
//   {"lattice": "square" | "triangular",
//    "generator": <generator>}
//   generator:
//     {"kind": "constant", "obstacle": <obstacle>}
//     {"kind": "iid", "seed": 7, "weights": [{"obstacle": <obstacle>, "weight": 0.5}, ...]}
//     {"kind": "annulus", "base": <obstacle>, "annuli": [{"inner": 4, "outer": 12}, ...],
//      "patch": [{"site": [i, j], "obstacle": <obstacle>}, ...], "background": <generator>}
//     {"kind": "explicit", "default": <obstacle>, "sites": [{"site": [i, j], "obstacle": <obstacle>}, ...]}
//   obstacle:
//     {"type": "empty"}
//     {"type": "rect", "a": "1/2", "b": "1/2"}       dimensions as exact fraction strings
//     {"type": "disk", "r": 0.49}
//     {"type": "five_disk", "R": 0.4, "r": 0.15}     or "disks": [{"offset": [x, y], "r": ...} x5]

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "windtree/table.hpp"

namespace windtree {

using Json = nlohmann::ordered_json;

/// Configuration problem; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TableConfig table_from_json(const Json& doc);
ObstacleSpec obstacle_from_json(const Json& node, const std::string& path = "obstacle");
Json obstacle_to_json(const ObstacleSpec& spec);

/// Parses a config file, reporting JSON syntax errors with line and column.
Json read_config_file(const std::string& file);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
Json preset(const std::string& name);

}  // namespace windtree
