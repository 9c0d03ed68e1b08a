#pragma once

// JSON experiment configuration. Missing keys take their defaults; unknown
// keys are rejected so typos do not silently fall back.

#include <filesystem>

#include <json.hpp>

#include "gfkchain/chain_transfer.hpp"

namespace gfkchain::cli {

inline constexpr const char* kArtifactName = "gfkchain";
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Throws UserError on unknown keys, wrong types, or out-of-range values.
chain::ChainConfig config_from_json(const nlohmann::json& doc);

/// Fully materialized config; config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const chain::ChainConfig& config);

/// Reads and parses a config file. Unreadable or malformed files are user errors.
chain::ChainConfig load_config(const std::filesystem::path& path);

}  // namespace gfkchain::cli
