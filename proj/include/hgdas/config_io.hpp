#pragma once

#include <string>

#include "hgdas/experiment.hpp"

namespace hgdas {

// Flat key = value text ('#' comments); a leading '{' or a .json path
// switches to JSON with the same flat keys.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Canonical key = value dump; also the config-hash input.
std::string canonical_config_text(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

// Fully commented sample accepted by parse_config_text.
std::string sample_config_text();

}  // namespace hgdas
