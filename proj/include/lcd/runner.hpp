#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lcd/report.hpp"

namespace lcd {

std::vector<std::string> operation_names();

// Validates the whole config (unknown keys rejected, ConfigError with the key path) before any
// computation, then dispatches on "operation". A seed override replaces the config seed.
ExperimentReport run(const json& config, std::optional<std::uint64_t> seed_override = {});

json load_config(const std::filesystem::path& file);

}  // namespace lcd
