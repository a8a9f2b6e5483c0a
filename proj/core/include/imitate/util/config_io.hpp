#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace imitate {

using Json = nlohmann::json;

/// Reads a JSON or YAML document (chosen by extension: .yaml/.yml are YAML) into a JSON value.
Json load_document(const std::filesystem::path& path);

/// Resolves `value` against the directory of `relative_to` unless it is already absolute.
std::filesystem::path resolve_path(const std::filesystem::path& relative_to, const std::string& value);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace imitate
