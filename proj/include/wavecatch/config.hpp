#pragma once

#include <string>

#include <json.hpp>

#include "wavecatch/harness.hpp"

namespace wavecatch {

/// Validated scenario + campaign configuration. The file format is JSON
/// with unit-suffixed keys; every key has a documented default but the
/// eight top-level blocks must all be present. Unknown keys are rejected
/// with the offending path.
struct Config {
  Scenario scenario;
  CampaignSpec campaign;

  static Config defaults();
};

Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

/// Canonical dump: all keys resolved, alphabetical order, so
/// load -> dump -> load is the identity.
nlohmann::json dump_config(const Config& config);

/// Applies one `--set path.to.key=value` override onto the raw JSON tree
/// before parsing. The value is parsed as JSON when possible, else kept as
/// a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace wavecatch
