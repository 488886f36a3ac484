#pragma once

#include <map>
#include <string>

#include "tsou/harness.hpp"

namespace tsou {

// `key = value` lines; `#` starts a comment. Keys use the CLI flag names
// without dashes (alpha, target-g, ...).
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin = "<config>");
std::map<std::string, std::string> read_config_file(const std::string& path);

// Applies recognised keys to cfg; unknown keys or malformed values raise
// InputError with the key name.
void apply_config(const std::map<std::string, std::string>& values, ExperimentConfig& cfg);

}  // namespace tsou
