#pragma once

#include <vector>

#include "imitate/kinematics/pose.hpp"

namespace imitate::kin {

struct Transform {
  Vec3 pos = Vec3::Zero();
  Quat rot;

  Vec3 apply(const Vec3& p) const { return pos + rot.rotate(p); }
};

/// World transform of every joint frame; index 0 is the root.
///
/// Joint j = parent(j) * translate(local_offset) * rotate(local rotation).
std::vector<Transform> forward_kinematics(const CharacterModel& ch, const Pose& pose);

/// World positions of the joint origins, one per joint.
std::vector<Vec3> joint_positions(const CharacterModel& ch, const Pose& pose);

/// World COM position of each body given joint transforms.
std::vector<Vec3> body_com_positions(const CharacterModel& ch, const std::vector<Transform>& frames);

/// Lowest extent of body j along the up axis, using its collision geometry
/// (falls back to the COM for bodies without geometry).
double body_lowest_point(const CharacterModel& ch, const std::vector<Transform>& frames, int j);

/// Local contact sample points of a body's geometry with the radius to subtract.
struct ContactPoint {
  Vec3 local;
  double radius = 0.0;
};
std::vector<ContactPoint> contact_points(const BodySpec& body);

}  // namespace imitate::kin
