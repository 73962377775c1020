#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "flexbench/algo_config.hpp"
#include "flexbench/material.hpp"

namespace flexbench {

nlohmann::ordered_json algo_config_to_json(const AlgoConfig& c);
// Missing keys keep their defaults. Throws SchemaError.
AlgoConfig algo_config_from_json(const nlohmann::ordered_json& j, AlgoConfig base = {});

nlohmann::ordered_json material_to_json(const MaterialParams& m);
MaterialParams material_from_json(const nlohmann::ordered_json& j);

// Throw IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace flexbench
