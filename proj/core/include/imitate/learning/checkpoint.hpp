#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

namespace imitate::learning {

/// Checkpoint file: {"format": "imitate-checkpoint", "version": 1, "workers": [agent state per rank]}.
/// Written to a temporary sibling and renamed so a crash never leaves a torn file.
void save_checkpoint(const std::filesystem::path& path, const std::vector<nlohmann::json>& worker_states);

/// Returns the per-rank agent states. Throws FormatError on unreadable, foreign or
/// future-version files.
std::vector<nlohmann::json> load_checkpoint(const std::filesystem::path& path);

}  // namespace imitate::learning
