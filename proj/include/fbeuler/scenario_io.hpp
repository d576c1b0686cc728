#pragma once

#include <string>

#include "fbeuler/evolution.hpp"

namespace fbeuler {

/// Parses the versioned scenario JSON (schema 1). Unknown keys anywhere in
/// the document are errors. Throws ConfigError with a descriptive message.
Scenario parse_scenario(const std::string& json_text);

/// Reads and parses a scenario file.
Scenario load_scenario(const std::string& path);

} // namespace fbeuler
