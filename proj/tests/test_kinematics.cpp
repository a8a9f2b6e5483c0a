#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "imitate/kinematics/character.hpp"
#include "imitate/kinematics/forward_kinematics.hpp"
#include "imitate/kinematics/motion.hpp"
#include "imitate/kinematics/pose.hpp"
#include "imitate/kinematics/quat.hpp"
#include "imitate/util/error.hpp"

namespace imitate::kin {
namespace {

const std::string kData = IMITATE_DATA_DIR;

Vec3 random_exp_map(std::mt19937_64& g, double max_angle) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, max_angle);
  return Vec3(n(g), n(g), n(g)).normalized() * u(g);
}

// Homogeneous-matrix forward kinematics built from Eigen's own angle-axis,
// independent of the Quat class.
std::vector<Eigen::Matrix4d> matrix_chain_fk(const CharacterModel& ch, const Pose& pose) {
  std::vector<Eigen::Matrix4d> out(ch.num_joints());
  const auto aa = [](const Vec3& v) {
    const double a = v.norm();
    return a < 1e-300 ? Mat3::Identity().eval() : Eigen::AngleAxisd(a, v / a).toRotationMatrix();
  };
  const Vec3 root_em = quat_to_exp_map(pose.root_rot);
  for (int j = 0; j < ch.num_joints(); ++j) {
    const JointSpec& js = ch.joint(j);
    Eigen::Matrix4d local = Eigen::Matrix4d::Identity();
    if (j == 0) {
      local.block<3, 3>(0, 0) = aa(root_em);
      local.block<3, 1>(0, 3) = pose.root_pos;
      out[0] = local;
      continue;
    }
    Eigen::Matrix4d trans = Eigen::Matrix4d::Identity();
    trans.block<3, 1>(0, 3) = js.local_offset;
    if (js.kind == JointKind::revolute) {
      local.block<3, 3>(0, 0) = Eigen::AngleAxisd(pose.dofs[ch.dof_offset(j)], js.axis.normalized()).toRotationMatrix();
    } else if (js.kind == JointKind::spherical) {
      local.block<3, 3>(0, 0) = aa(pose.dofs.segment<3>(ch.dof_offset(j)));
    }
    out[j] = out[js.parent] * trans * local;
  }
  return out;
}

Pose random_pose(const CharacterModel& ch, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Pose p = zero_pose(ch);
  p.root_pos = Vec3(u(g), u(g), u(g));
  p.root_rot = exp_map_to_quat(random_exp_map(g, 3.0));
  for (int j = 1; j < ch.num_joints(); ++j) {
    if (ch.joint(j).kind == JointKind::revolute) p.dofs[ch.dof_offset(j)] = u(g);
    if (ch.joint(j).kind == JointKind::spherical) p.dofs.segment<3>(ch.dof_offset(j)) = random_exp_map(g, 3.0);
  }
  return p;
}

TEST(Quat, ExpMapRoundTrip) {
  std::mt19937_64 g(1);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Vec3 v = random_exp_map(g, std::numbers::pi - 1e-6);
    worst = std::max(worst, (quat_to_exp_map(exp_map_to_quat(v)) - v).norm());
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Quat, MatchesEigenRotation) {
  std::mt19937_64 g(2);
  for (int k = 0; k < 200; ++k) {
    const Vec3 v = random_exp_map(g, 3.0);
    const Vec3 p(0.3, -1.2, 2.0);
    const Mat3 R = Eigen::AngleAxisd(v.norm(), v.normalized()).toRotationMatrix();
    EXPECT_LE((exp_map_to_quat(v).rotate(p) - R * p).norm(), 1e-12);
    EXPECT_LE((exp_map_to_quat(v).to_matrix() - R).norm(), 1e-12);
  }
}

TEST(Quat, SlerpEndpointsAndMidpoint) {
  const Quat a = exp_map_to_quat({0.0, 0.0, 0.2});
  const Quat b = exp_map_to_quat({0.0, 0.0, 1.0});
  EXPECT_LE(rotation_distance(slerp(a, b, 0.0), a), 1e-12);
  EXPECT_LE(rotation_distance(slerp(a, b, 1.0), b), 1e-12);
  EXPECT_NEAR(quat_to_exp_map(slerp(a, b, 0.5)).z(), 0.6, 1e-12);
  EXPECT_THROW(slerp(a, b, 1.5), InvalidArgument);
}

TEST(Quat, RotationDistanceIgnoresSign) {
  const Quat q = exp_map_to_quat({0.4, -0.2, 0.9});
  EXPECT_NEAR(rotation_distance(q, q.negated()), 0.0, 1e-12);
  EXPECT_NEAR(rotation_distance(Quat::identity(), exp_map_to_quat({0, 1.25, 0})), 1.25, 1e-12);
}

TEST(Quat, NonFiniteInputThrows) {
  EXPECT_THROW(exp_map_to_quat({std::nan(""), 0, 0}), InvalidArgument);
  EXPECT_THROW(Quat(0, 0, 0, 0), InvalidArgument);
}

TEST(Quat, StoredComponentsRestoreExactly) {
  const Quat q = exp_map_to_quat({0.1, 0.7, -0.3}) * exp_map_to_quat({1.0, 0.2, 0.0});
  EXPECT_EQ(Quat::from_stored(q.w(), q.x(), q.y(), q.z()), q);
  EXPECT_THROW(Quat::from_stored(2.0, 0, 0, 0), InvalidArgument);
}

TEST(ForwardKinematics, HumanoidMatchesMatrixChain) {
  const CharacterModel ch = CharacterModel::load(kData + "/characters/humanoid.json");
  std::mt19937_64 g(3);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Pose p = random_pose(ch, g);
    const auto fk = forward_kinematics(ch, p);
    const auto oracle = matrix_chain_fk(ch, p);
    for (int j = 0; j < ch.num_joints(); ++j) {
      worst = std::max(worst, (fk[j].pos - oracle[j].block<3, 1>(0, 3)).norm());
      worst = std::max(worst, (fk[j].rot.to_matrix() - oracle[j].block<3, 3>(0, 0)).norm());
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(ForwardKinematics, ChainAtZeroPoseHangsDown) {
  const CharacterModel ch = CharacterModel::load(kData + "/characters/chain3.json");
  const auto pos = joint_positions(ch, default_pose(ch));
  ASSERT_EQ(pos.size(), 5u);
  EXPECT_NEAR(pos[4].y(), pos[0].y() - 1.2, 1e-12);
}

TEST(Character, HumanoidFrameWidthAndOrder) {
  const CharacterModel ch = CharacterModel::load(kData + "/characters/humanoid.json");
  EXPECT_EQ(ch.frame_width(), 34);
  EXPECT_EQ(ch.joint(1).name, "abdomen");
  for (int j = 1; j < ch.num_joints(); ++j) EXPECT_LT(ch.joint(j).parent, j);
}

TEST(Character, MissingFileIsFormatError) {
  EXPECT_THROW(CharacterModel::load(kData + "/characters/nope.json"), std::exception);
}

TEST(Pose, FrameRoundTrip) {
  const CharacterModel ch = CharacterModel::load(kData + "/characters/humanoid.json");
  std::mt19937_64 g(4);
  const Pose p = random_pose(ch, g);
  const Pose back = pose_from_frame(ch.layout(), frame_from_pose(p));
  EXPECT_LE((back.root_pos - p.root_pos).norm(), 1e-15);
  EXPECT_LE(rotation_distance(back.root_rot, p.root_rot), 1e-9);
  EXPECT_EQ(back.dofs, p.dofs);
}

TEST(Motion, SamplesHitFramesExactly) {
  const CharacterModel ch = CharacterModel::load(kData + "/characters/chain3.json");
  const MotionClip clip = load_motion(kData + "/motions/chain3_sine.json", ch);
  EXPECT_NEAR(clip.duration(), 2.0, 1e-12);
  for (int f = 0; f < clip.num_frames(); f += 7) {
    const Pose p = sample_pose_only(clip, f / clip.fps());
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(p.dofs[d], clip.frames()(f, 6 + d), 1e-12);
  }
}

// Dense resampling oracle: linear interpolation of revolute DoFs between
// neighbouring frames, with wrap-around for the looping clip.
TEST(Motion, DenseResamplingMatchesLinearOracle) {
  const CharacterModel ch = CharacterModel::load(kData + "/characters/chain3.json");
  const MotionClip clip = load_motion(kData + "/motions/chain3_sine.json", ch);
  const double T = clip.duration();
  for (int k = 0; k < 1000; ++k) {
    const double t = 5.0 * k / 999.0;
    double tw = std::fmod(t, T);
    if (tw < 0) tw += T;
    const double fpos = tw * clip.fps();
    const int f0 = std::min(static_cast<int>(std::floor(fpos)), clip.num_frames() - 2);
    const double u = fpos - f0;
    const Pose p = sample_pose_only(clip, t);
    for (int d = 0; d < 3; ++d) {
      const double expect = (1 - u) * clip.frames()(f0, 6 + d) + u * clip.frames()(f0 + 1, 6 + d);
      EXPECT_NEAR(p.dofs[d], expect, 1e-9) << "t=" << t;
    }
  }
}

TEST(Motion, VelocityMatchesAnalyticSine) {
  const CharacterModel ch = CharacterModel::load(kData + "/characters/chain3.json");
  const MotionClip clip = load_motion(kData + "/motions/chain3_sine.json", ch);
  // q0 = 0.6 sin(pi t); central differences at h = 1/60 s
  const double t = 0.5 / 3.0;
  const PoseSample s = sample_pose(clip, t);
  EXPECT_NEAR(s.vel.dof_vel[0], 0.6 * std::numbers::pi * std::cos(std::numbers::pi * t), 5e-3);
}

TEST(Motion, WrongFrameWidthRejected) {
  const CharacterModel humanoid = CharacterModel::load(kData + "/characters/humanoid.json");
  EXPECT_THROW(load_motion(kData + "/motions/chain3_sine.json", humanoid), std::exception);
}

TEST(Motion, DatasetWeights) {
  const CharacterModel ch = CharacterModel::load(kData + "/characters/chain3.json");
  const MotionLibrary lib = MotionLibrary::load(kData + "/datasets/chain3_dataset.json", ch);
  ASSERT_EQ(lib.size(), 3);
  EXPECT_NEAR(lib.probability(2), 0.5, 1e-12);
  Rng rng(5);
  int hits = 0;
  for (int k = 0; k < 4000; ++k) hits += lib.sample_clip(rng) == 2;
  EXPECT_NEAR(hits / 4000.0, 0.5, 0.04);
}

}  // namespace
}  // namespace imitate::kin
