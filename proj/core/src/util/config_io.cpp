#include "imitate/util/config_io.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "imitate/util/error.hpp"

namespace imitate {
namespace {

Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      Json out = Json::array();
      for (const auto& item : node) out.push_back(yaml_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      Json out = Json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return out;
    }
    case YAML::NodeType::Scalar: {
      const std::string text = node.Scalar();
      if (node.Tag() == "!") return text;  // quoted scalar
      bool b = false;
      if (YAML::convert<bool>::decode(node, b)) return b;
      try {
        std::size_t used = 0;
        const long long i = std::stoll(text, &used);
        if (used == text.size()) return i;
      } catch (const std::exception&) {
      }
      try {
        std::size_t used = 0;
        const double d = std::stod(text, &used);
        if (used == text.size()) return d;
      } catch (const std::exception&) {
      }
      return text;
    }
  }
  return nullptr;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write file: " + path.string());
  out << contents;
  if (!out) throw FormatError("failed writing file: " + path.string());
}

Json load_document(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const std::string ext = path.extension().string();
  if (ext == ".yaml" || ext == ".yml") {
    try {
      return yaml_to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::filesystem::path resolve_path(const std::filesystem::path& relative_to, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_absolute()) return p;
  return relative_to.parent_path() / p;
}

}  // namespace imitate
