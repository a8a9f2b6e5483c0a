#include "imitate/kinematics/character.hpp"

#include <cmath>

#include "imitate/util/config_io.hpp"
#include "imitate/util/error.hpp"

namespace imitate::kin {
namespace {

Vec3 read_vec3(const Json& j, const char* key, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw FormatError(std::string("field '") + key + "' must be a 3-array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Json write_vec3(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Geometry read_geometry(const Json& j) {
  Geometry g;
  if (j.is_null()) return g;
  const std::string type = j.value("type", "none");
  if (type == "none") {
    g.type = Geometry::Type::none;
  } else if (type == "sphere") {
    g.type = Geometry::Type::sphere;
    g.center = read_vec3(j, "center", Vec3::Zero());
    g.radius = j.at("radius").get<double>();
  } else if (type == "capsule") {
    g.type = Geometry::Type::capsule;
    g.from = read_vec3(j, "from", Vec3::Zero());
    g.to = read_vec3(j, "to", Vec3::Zero());
    g.radius = j.at("radius").get<double>();
  } else if (type == "box") {
    g.type = Geometry::Type::box;
    g.center = read_vec3(j, "center", Vec3::Zero());
    g.half_extents = read_vec3(j, "half_extents", Vec3::Zero());
  } else {
    throw FormatError("unknown geometry type '" + type + "'");
  }
  return g;
}

Json write_geometry(const Geometry& g) {
  switch (g.type) {
    case Geometry::Type::none:
      return Json{{"type", "none"}};
    case Geometry::Type::sphere:
      return Json{{"type", "sphere"}, {"center", write_vec3(g.center)}, {"radius", g.radius}};
    case Geometry::Type::capsule:
      return Json{{"type", "capsule"}, {"from", write_vec3(g.from)}, {"to", write_vec3(g.to)}, {"radius", g.radius}};
    case Geometry::Type::box:
      return Json{{"type", "box"}, {"center", write_vec3(g.center)}, {"half_extents", write_vec3(g.half_extents)}};
  }
  return nullptr;
}

}  // namespace

int joint_dof_dim(JointKind kind) {
  switch (kind) {
    case JointKind::spherical:
      return 3;
    case JointKind::revolute:
      return 1;
    default:
      return 0;
  }
}

const char* to_string(JointKind kind) {
  switch (kind) {
    case JointKind::free:
      return "free";
    case JointKind::fixed:
      return "fixed";
    case JointKind::revolute:
      return "revolute";
    case JointKind::spherical:
      return "spherical";
  }
  return "?";
}

JointKind joint_kind_from_string(const std::string& s) {
  if (s == "free") return JointKind::free;
  if (s == "fixed") return JointKind::fixed;
  if (s == "revolute") return JointKind::revolute;
  if (s == "spherical") return JointKind::spherical;
  throw FormatError("unknown joint kind '" + s + "'");
}

Vec3 up_vector(UpAxis axis) { return axis == UpAxis::y ? Vec3::UnitY() : Vec3::UnitZ(); }

CharacterModel::CharacterModel(std::string name, UpAxis up, std::vector<JointSpec> joints,
                               std::vector<BodySpec> bodies, std::vector<std::string> feet,
                               std::vector<std::string> end_effectors, Vec3 default_root_pos,
                               Quat default_root_rot)
    : name_(std::move(name)),
      joints_(std::move(joints)),
      bodies_(std::move(bodies)),
      default_root_pos_(default_root_pos),
      default_root_rot_(default_root_rot) {
  if (joints_.empty()) throw FormatError("character '" + name_ + "' has no joints");
  if (bodies_.size() != joints_.size()) {
    throw FormatError("character '" + name_ + "': expected one body per joint (" + std::to_string(joints_.size()) +
                      "), got " + std::to_string(bodies_.size()));
  }
  const auto& root = joints_.front();
  if (root.parent != -1 || (root.kind != JointKind::free && root.kind != JointKind::fixed)) {
    throw FormatError("joint 0 must be the root (parent -1, kind free or fixed)");
  }

  layout_.up = up;
  layout_.kinds.resize(joints_.size());
  layout_.offsets.assign(joints_.size(), -1);
  children_.resize(joints_.size());
  layout_.kinds[0] = root.kind;

  // Preorder check: each joint's parent must lie on the ancestor path of the previous joint.
  std::vector<int> path{0};
  for (int j = 1; j < static_cast<int>(joints_.size()); ++j) {
    auto& js = joints_[j];
    if (js.kind == JointKind::free) throw FormatError("joint '" + js.name + "': only the root may be free");
    if (js.parent < 0 || js.parent >= j) {
      throw FormatError("joint '" + js.name + "': parent index must precede the joint");
    }
    while (!path.empty() && path.back() != js.parent) path.pop_back();
    if (path.empty()) throw FormatError("joint '" + js.name + "' breaks depth-first joint order");
    path.push_back(j);
    children_[js.parent].push_back(j);
    if (js.kind == JointKind::revolute) {
      const double n = js.axis.norm();
      if (!(n > 0.0) || !std::isfinite(n)) throw FormatError("joint '" + js.name + "': revolute axis must be non-zero");
      js.axis /= n;
    }
    layout_.kinds[j] = js.kind;
    layout_.offsets[j] = layout_.dof_count;
    layout_.dof_count += joint_dof_dim(js.kind);
  }

  for (const auto& f : feet) {
    const int idx = joint_index(f);
    if (idx < 0) throw FormatError("unknown foot body '" + f + "'");
    feet_.push_back(idx);
  }
  for (const auto& e : end_effectors) {
    const int idx = joint_index(e);
    if (idx < 0) throw FormatError("unknown end effector '" + e + "'");
    end_effectors_.push_back(idx);
  }
  if (end_effectors_.empty()) {
    for (int j = 1; j < num_joints(); ++j) {
      if (children_[j].empty()) end_effectors_.push_back(j);
    }
  }
}

bool CharacterModel::has_spherical() const {
  for (const auto& j : joints_) {
    if (j.kind == JointKind::spherical) return true;
  }
  return false;
}

int CharacterModel::joint_index(const std::string& name) const {
  for (int j = 0; j < num_joints(); ++j) {
    if (joints_[j].name == name) return j;
  }
  return -1;
}

CharacterModel CharacterModel::from_json(const Json& doc) {
  try {
    const std::string name = doc.value("name", "character");
    const std::string up = doc.value("up_axis", "z");
    if (up != "y" && up != "z") throw FormatError("up_axis must be 'y' or 'z'");

    std::vector<JointSpec> joints;
    for (const auto& jj : doc.at("joints")) {
      JointSpec js;
      js.name = jj.at("name").get<std::string>();
      js.kind = joint_kind_from_string(jj.at("kind").get<std::string>());
      if (jj.contains("parent") && !jj.at("parent").is_null()) {
        const auto& p = jj.at("parent");
        if (p.is_string()) {
          const std::string pname = p.get<std::string>();
          js.parent = -1;
          for (int k = 0; k < static_cast<int>(joints.size()); ++k) {
            if (joints[k].name == pname) js.parent = k;
          }
          if (js.parent < 0) throw FormatError("joint '" + js.name + "': unknown parent '" + pname + "'");
        } else {
          js.parent = p.get<int>();
        }
      }
      js.local_offset = read_vec3(jj, "local_offset", Vec3::Zero());
      js.axis = read_vec3(jj, "axis", Vec3::UnitZ());
      js.torque_limit = jj.value("torque_limit", 0.0);
      if (jj.contains("pd_gains")) {
        const auto& g = jj.at("pd_gains");
        js.pd_gains.kp = g.at(0).get<double>();
        js.pd_gains.kd = g.at(1).get<double>();
      }
      joints.push_back(std::move(js));
    }

    std::vector<BodySpec> bodies;
    for (const auto& bj : doc.at("bodies")) {
      BodySpec b;
      b.mass = bj.value("mass", 1.0);
      b.inertia = read_vec3(bj, "inertia", Vec3::Ones());
      b.com = read_vec3(bj, "com", Vec3::Zero());
      b.geometry = read_geometry(bj.value("geometry", Json()));
      if (!(b.mass > 0.0)) throw FormatError("body masses must be positive");
      bodies.push_back(b);
    }

    std::vector<std::string> feet = doc.value("feet", std::vector<std::string>{});
    std::vector<std::string> effectors = doc.value("end_effectors", std::vector<std::string>{});
    const Vec3 root_pos = read_vec3(doc, "default_root_pos", Vec3::Zero());
    const Vec3 root_rot = read_vec3(doc, "default_root_rot", Vec3::Zero());
    return CharacterModel(name, up == "y" ? UpAxis::y : UpAxis::z, std::move(joints), std::move(bodies),
                          std::move(feet), std::move(effectors), root_pos, exp_map_to_quat(root_rot));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("character document: ") + e.what());
  }
}

CharacterModel CharacterModel::load(const std::filesystem::path& path) {
  try {
    return from_json(load_document(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Json CharacterModel::to_json() const {
  Json joints = Json::array();
  for (const auto& j : joints_) {
    Json jj{{"name", j.name}, {"kind", to_string(j.kind)}, {"parent", j.parent},
            {"local_offset", write_vec3(j.local_offset)}, {"axis", write_vec3(j.axis)},
            {"torque_limit", j.torque_limit}, {"pd_gains", Json::array({j.pd_gains.kp, j.pd_gains.kd})}};
    joints.push_back(std::move(jj));
  }
  Json bodies = Json::array();
  for (const auto& b : bodies_) {
    bodies.push_back(Json{{"mass", b.mass}, {"inertia", write_vec3(b.inertia)}, {"com", write_vec3(b.com)},
                          {"geometry", write_geometry(b.geometry)}});
  }
  Json feet = Json::array();
  for (int f : feet_) feet.push_back(joints_[f].name);
  Json effectors = Json::array();
  for (int e : end_effectors_) effectors.push_back(joints_[e].name);
  return Json{{"name", name_},
              {"up_axis", layout_.up == UpAxis::y ? "y" : "z"},
              {"joints", joints},
              {"bodies", bodies},
              {"feet", feet},
              {"end_effectors", effectors},
              {"default_root_pos", write_vec3(default_root_pos_)},
              {"default_root_rot", write_vec3(quat_to_exp_map(default_root_rot_))}};
}

}  // namespace imitate::kin
