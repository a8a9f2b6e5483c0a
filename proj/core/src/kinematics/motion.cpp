#include "imitate/kinematics/motion.hpp"

#include <cmath>

#include "imitate/util/config_io.hpp"
#include "imitate/util/error.hpp"

namespace imitate::kin {
namespace {

Eigen::VectorXd lerp(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double u) { return a + u * (b - a); }

Pose interpolate_frames(const MotionClip& clip, int i0, double u) {
  const auto& layout = clip.layout();
  const Pose p0 = pose_from_frame(layout, clip.frames().row(i0).transpose());
  if (u == 0.0) return p0;
  const Pose p1 = pose_from_frame(layout, clip.frames().row(i0 + 1).transpose());
  Pose out;
  out.root_pos = p0.root_pos + u * (p1.root_pos - p0.root_pos);
  out.root_rot = slerp(p0.root_rot, p1.root_rot, u);
  out.dofs = lerp(p0.dofs, p1.dofs, u);
  for (int j = 1; j < layout.num_joints(); ++j) {
    if (layout.kinds[j] != JointKind::spherical) continue;
    const int off = layout.offsets[j];
    const Quat q0 = exp_map_to_quat(p0.dofs.segment<3>(off));
    const Quat q1 = exp_map_to_quat(p1.dofs.segment<3>(off));
    out.dofs.segment<3>(off) = quat_to_exp_map(slerp(q0, q1, u));
  }
  return out;
}

/// Pose within one pass over the frames, tt in [0, duration].
Pose pose_in_clip(const MotionClip& clip, double tt) {
  const int n = clip.num_frames();
  if (n == 1) return pose_from_frame(clip.layout(), clip.frames().row(0).transpose());
  double f = tt * clip.fps();
  const double nearest = std::round(f);
  if (std::abs(f - nearest) < 1e-9) f = nearest;
  int i0 = static_cast<int>(std::floor(f));
  i0 = std::clamp(i0, 0, n - 1);
  if (i0 == n - 1) return pose_from_frame(clip.layout(), clip.frames().row(n - 1).transpose());
  const double u = std::clamp(f - i0, 0.0, 1.0);
  return interpolate_frames(clip, i0, u);
}

Vec3 cycle_offset(const MotionClip& clip) {
  const int n = clip.num_frames();
  Vec3 d = (clip.frames().row(n - 1).head<3>() - clip.frames().row(0).head<3>()).transpose();
  const Vec3 up = up_vector(clip.layout().up);
  return d - d.dot(up) * up;
}

/// Pose at arbitrary t: clamped for non-looping clips, wrapped otherwise.
Pose pose_at(const MotionClip& clip, double t) {
  const double dur = clip.duration();
  if (clip.loop() == LoopMode::none || dur <= 0.0) return pose_in_clip(clip, std::clamp(t, 0.0, dur));
  const double cycles = std::floor(t / dur);
  double tt = t - cycles * dur;
  if (tt >= dur) tt = 0.0;
  if (tt < 0.0) tt = 0.0;
  Pose p = pose_in_clip(clip, tt);
  p.root_pos += cycles * cycle_offset(clip);
  return p;
}

}  // namespace

MotionClip::MotionClip(double fps, LoopMode loop, std::string character, FrameLayout layout, Eigen::MatrixXd frames)
    : fps_(fps), loop_(loop), character_(std::move(character)), layout_(std::move(layout)), frames_(std::move(frames)) {
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) throw InvalidArgument("motion fps must be positive");
  if (frames_.rows() < 1) throw InvalidArgument("motion clip needs at least one frame");
  if (frames_.cols() != layout_.frame_width()) {
    throw InvalidArgument("motion frame width " + std::to_string(frames_.cols()) + " does not match character width " +
                          std::to_string(layout_.frame_width()));
  }
  for (Eigen::Index r = 0; r < frames_.rows(); ++r) {
    if (!frames_.row(r).allFinite()) throw InvalidArgument("motion frame " + std::to_string(r) + " is not finite");
  }
}

PoseVelocity pose_difference_velocity(const FrameLayout& layout, const Pose& a, const Pose& b, double dt) {
  PoseVelocity v;
  v.root_lin_vel = (b.root_pos - a.root_pos) / dt;
  v.root_ang_vel = quat_to_exp_map(b.root_rot * a.root_rot.conjugate()) / dt;
  v.dof_vel = (b.dofs - a.dofs) / dt;
  for (int j = 1; j < layout.num_joints(); ++j) {
    if (layout.kinds[j] != JointKind::spherical) continue;
    const int off = layout.offsets[j];
    const Quat qa = exp_map_to_quat(a.dofs.segment<3>(off));
    const Quat qb = exp_map_to_quat(b.dofs.segment<3>(off));
    v.dof_vel.segment<3>(off) = quat_to_exp_map(qa.conjugate() * qb) / dt;
  }
  return v;
}

Pose sample_pose_only(const MotionClip& clip, double t) {
  if (clip.num_frames() < 1) throw InvalidArgument("cannot sample an empty clip");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("sample time must be finite and non-negative");
  return pose_at(clip, t);
}

PoseSample sample_pose(const MotionClip& clip, double t) {
  PoseSample out;
  out.pose = sample_pose_only(clip, t);
  const auto& layout = clip.layout();
  if (clip.num_frames() == 1) {
    out.vel.dof_vel = Eigen::VectorXd::Zero(layout.dof_count);
    return out;
  }
  const double h = 0.5 / clip.fps();
  const double dur = clip.duration();
  double t0 = t - h;
  double t1 = t + h;
  if (clip.loop() == LoopMode::none) {
    const double tc = std::min(t, dur);
    t0 = tc - h;
    t1 = tc + h;
    if (t0 < 0.0) {
      t0 = tc;
    } else if (t1 > dur) {
      t1 = tc;
    }
  }
  out.vel = pose_difference_velocity(layout, pose_at(clip, t0), pose_at(clip, t1), t1 - t0);
  return out;
}

MotionClip motion_from_json(const Json& doc, const CharacterModel& ch) {
  if (!doc.is_object()) throw FormatError("motion document must be a JSON object");
  double fps;
  std::string loop;
  std::string character;
  try {
    fps = doc.at("fps").get<double>();
    loop = doc.value("loop", "none");
    character = doc.value("character", ch.name());
  } catch (const Json::exception& e) {
    throw FormatError(std::string("motion header: ") + e.what());
  }
  if (loop != "none" && loop != "wrap") throw FormatError("motion loop must be 'none' or 'wrap'");
  if (doc.contains("frame_width") && doc.at("frame_width").get<int>() != ch.frame_width()) {
    throw FormatError("motion declares frame_width " + std::to_string(doc.at("frame_width").get<int>()) +
                      " but character '" + ch.name() + "' has " + std::to_string(ch.frame_width()));
  }
  if (!doc.contains("frames") || !doc.at("frames").is_array() || doc.at("frames").empty()) {
    throw FormatError("motion has no frames");
  }
  const auto& rows = doc.at("frames");
  Eigen::MatrixXd frames(rows.size(), ch.frame_width());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != ch.frame_width()) {
      throw FormatError("motion frame row " + std::to_string(r) + " has width " +
                        std::to_string(row.is_array() ? row.size() : 0) + ", expected " +
                        std::to_string(ch.frame_width()));
    }
    for (int c = 0; c < ch.frame_width(); ++c) {
      if (!row[c].is_number()) {
        throw FormatError("motion frame row " + std::to_string(r) + " column " + std::to_string(c) + " is not a number");
      }
      const double v = row[c].get<double>();
      if (!std::isfinite(v)) throw FormatError("motion frame row " + std::to_string(r) + " is not finite");
      frames(static_cast<Eigen::Index>(r), c) = v;
    }
  }
  if (!(fps > 0.0)) throw FormatError("motion fps must be positive");
  return MotionClip(fps, loop == "wrap" ? LoopMode::wrap : LoopMode::none, character, ch.layout(), std::move(frames));
}

MotionClip load_motion(const std::filesystem::path& path, const CharacterModel& ch) {
  try {
    return motion_from_json(load_document(path), ch);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Json motion_to_json(const MotionClip& clip) {
  Json rows = Json::array();
  for (int r = 0; r < clip.num_frames(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < clip.frames().cols(); ++c) row.push_back(clip.frames()(r, c));
    rows.push_back(std::move(row));
  }
  return Json{{"fps", clip.fps()},
              {"loop", clip.loop() == LoopMode::wrap ? "wrap" : "none"},
              {"character", clip.character()},
              {"frame_width", clip.layout().frame_width()},
              {"frames", std::move(rows)}};
}

void save_motion(const MotionClip& clip, const std::filesystem::path& path) {
  write_text_file(path, motion_to_json(clip).dump());
}

MotionLibrary::MotionLibrary(std::vector<MotionClip> clips, std::vector<double> weights) : clips_(std::move(clips)) {
  if (clips_.empty()) throw InvalidArgument("motion library needs at least one clip");
  if (weights.size() != clips_.size()) throw InvalidArgument("one weight per clip required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("clip weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("clip weights must not all be zero");
  for (double w : weights) probs_.push_back(w / total);
}

MotionLibrary MotionLibrary::load(const std::filesystem::path& path, const CharacterModel& ch) {
  const Json doc = load_document(path);
  if (doc.is_object()) {
    try {
      return MotionLibrary({motion_from_json(doc, ch)}, {1.0});
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  if (!doc.is_array()) throw FormatError(path.string() + ": expected a motion object or a dataset array");
  std::vector<MotionClip> clips;
  std::vector<double> weights;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& entry = doc[i];
    if (!entry.is_object() || !entry.contains("file")) {
      throw FormatError(path.string() + ": dataset entry " + std::to_string(i) + " needs a 'file'");
    }
    const double w = entry.value("weight", 1.0);
    if (!(w >= 0.0)) throw FormatError(path.string() + ": dataset entry " + std::to_string(i) + " has negative weight");
    clips.push_back(load_motion(resolve_path(path, entry.at("file").get<std::string>()), ch));
    weights.push_back(w);
  }
  return MotionLibrary(std::move(clips), std::move(weights));
}

int MotionLibrary::sample_clip(Rng& rng) const {
  if (clips_.size() == 1) return 0;
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) {
    acc += probs_[i];
    if (u < acc) return i;
  }
  return size() - 1;
}

}  // namespace imitate::kin
