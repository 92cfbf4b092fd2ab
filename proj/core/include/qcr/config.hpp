// Scenario files: sectioned key-value text.
//
//   name = wall_single
//   duration = 8
//
//   [approach]
//   direction = 1, 0, 0
//   speed = 2.58
//
//   [obstacle1]
//   type = wall
//   point = 3.5, 0, 0
//   normal = -1, 0, 0
//
// Lines starting with ';' or '#' are comments. Duplicate keys or sections
// are parse errors; unknown keys are validation errors. The full key list is
// in docs/scenario_format.md.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "qcr/scenario.hpp"

namespace qcr {

/// Parses and validates scenario text. Throws ParseError or ValidationError.
Scenario parse_scenario(std::string_view text);

/// Reads and parses a scenario file. Throws ConfigError if unreadable.
Scenario load_scenario(const std::filesystem::path& path);

/// Text that parse_scenario() turns back into an equal Scenario.
std::string serialize(const Scenario& scenario);

}  // namespace qcr
