#include "imitate/kinematics/forward_kinematics.hpp"

#include <algorithm>
#include <limits>

namespace imitate::kin {

std::vector<Transform> forward_kinematics(const CharacterModel& ch, const Pose& pose) {
  check_pose(ch, pose);
  std::vector<Transform> out(ch.num_joints());
  out[0] = {pose.root_pos, pose.root_rot};
  for (int j = 1; j < ch.num_joints(); ++j) {
    const auto& js = ch.joint(j);
    const Transform& parent = out[js.parent];
    out[j].pos = parent.apply(js.local_offset);
    out[j].rot = parent.rot * joint_rotation(ch, pose, j);
  }
  return out;
}

std::vector<Vec3> joint_positions(const CharacterModel& ch, const Pose& pose) {
  const auto frames = forward_kinematics(ch, pose);
  std::vector<Vec3> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.pos);
  return out;
}

std::vector<Vec3> body_com_positions(const CharacterModel& ch, const std::vector<Transform>& frames) {
  std::vector<Vec3> out;
  out.reserve(frames.size());
  for (int j = 0; j < ch.num_joints(); ++j) out.push_back(frames[j].apply(ch.bodies()[j].com));
  return out;
}

std::vector<ContactPoint> contact_points(const BodySpec& body) {
  const auto& g = body.geometry;
  switch (g.type) {
    case Geometry::Type::sphere:
      return {{g.center, g.radius}};
    case Geometry::Type::capsule:
      return {{g.from, g.radius}, {g.to, g.radius}};
    case Geometry::Type::box: {
      std::vector<ContactPoint> pts;
      for (int sx : {-1, 1}) {
        for (int sy : {-1, 1}) {
          for (int sz : {-1, 1}) {
            const Vec3 corner(sx * g.half_extents.x(), sy * g.half_extents.y(), sz * g.half_extents.z());
            pts.push_back({g.center + corner, 0.0});
          }
        }
      }
      return pts;
    }
    case Geometry::Type::none:
      break;
  }
  return {{body.com, 0.0}};
}

double body_lowest_point(const CharacterModel& ch, const std::vector<Transform>& frames, int j) {
  const Vec3 up = ch.up();
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& cp : contact_points(ch.bodies()[j])) {
    lowest = std::min(lowest, frames[j].apply(cp.local).dot(up) - cp.radius);
  }
  return lowest;
}

}  // namespace imitate::kin
