#include "imitate/learning/checkpoint.hpp"

#include <fstream>

#include "imitate/util/config_io.hpp"
#include "imitate/util/error.hpp"

namespace imitate::learning {

namespace {
constexpr const char* kFormat = "imitate-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::vector<nlohmann::json>& worker_states) {
  if (worker_states.empty()) throw InvalidArgument("save_checkpoint: no worker states");
  const nlohmann::json j = {{"format", kFormat}, {"version", kVersion}, {"workers", worker_states}};
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_text_file(tmp, j.dump());
  std::filesystem::rename(tmp, path);
}

std::vector<nlohmann::json> load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw FormatError("checkpoint file not found: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormat) {
    throw FormatError(path.string() + " is not a checkpoint file");
  }
  if (j.value("version", -1) != kVersion) {
    throw FormatError("unsupported checkpoint version " + j["version"].dump() + " in " + path.string());
  }
  const auto& w = j.at("workers");
  if (!w.is_array() || w.empty()) throw FormatError("checkpoint " + path.string() + " has no worker states");
  return w.get<std::vector<nlohmann::json>>();
}

}  // namespace imitate::learning
