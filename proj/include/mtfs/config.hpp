#pragma once

#include <stdexcept>
#include <string>

#include "mtfs/overlay.hpp"

namespace mtfs {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reads a JSON mount configuration (schema 1) and fills defaults: all three
// techniques are configured but inactive unless the file says otherwise.
// Throws ConfigError with parse position or the offending field name.
MountConfig load_config(const std::string& path);
MountConfig parse_config(const std::string& json_text);

std::string config_to_json(const MountConfig& cfg);

// The default pipeline: delay, inf, suffix in that order, all inactive.
std::vector<TechniqueConfig> default_techniques();

} // namespace mtfs
