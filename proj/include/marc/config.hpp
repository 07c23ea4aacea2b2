#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "marc/experiment.hpp"

namespace marc {

/// Sets one `section.key` value. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Flat `section.key = value` lines; `#` starts a comment.
void apply_config_text(ExperimentConfig& config, std::string_view text);
void load_config_file(ExperimentConfig& config, const std::string& path);

/// Every key accepted by apply_setting.
const std::vector<std::string>& config_keys();

/// `1,2,5` or `1..30` (inclusive), or a mix of both.
std::vector<std::uint64_t> parse_u64_list(std::string_view text);

}  // namespace marc
