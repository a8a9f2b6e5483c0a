#include "imitate/envs/vec_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "imitate/eval/metrics.hpp"
#include "imitate/kinematics/forward_kinematics.hpp"
#include "imitate/util/error.hpp"

namespace imitate::envs {
namespace {

constexpr double kTimeEps = 1e-9;

std::shared_ptr<const kin::MotionLibrary> load_motions(const EnvConfig& c, const kin::CharacterModel& ch) {
  if (c.motion_file.empty()) return nullptr;
  return std::make_shared<const kin::MotionLibrary>(kin::MotionLibrary::load(c.motion_file, ch));
}

}  // namespace

VecEnv::VecEnv(EnvConfig config, int num_envs, std::uint64_t seed) : config_(std::move(config)) {
  character_ = std::make_shared<const kin::CharacterModel>(kin::CharacterModel::load(config_.character_file));
  motions_ = load_motions(config_, *character_);
  init(num_envs, seed);
}

VecEnv::VecEnv(EnvConfig config, std::shared_ptr<const kin::CharacterModel> character,
               std::shared_ptr<const kin::MotionLibrary> motions, int num_envs, std::uint64_t seed)
    : config_(std::move(config)), character_(std::move(character)), motions_(std::move(motions)) {
  if (!character_) throw InvalidArgument("VecEnv requires a character");
  init(num_envs, seed);
}

void VecEnv::init(int num_envs, std::uint64_t seed) {
  if (num_envs < 1) throw InvalidArgument("num_envs must be at least 1");
  const auto& ch = *character_;
  const bool needs_motion = config_.task != Task::swing_up && config_.task != Task::target_location;
  if (needs_motion && (!motions_ || motions_->size() == 0)) {
    throw ConfigError(std::string("task ") + to_string(config_.task) + " requires a motion library");
  }
  if (config_.task == Task::swing_up && ch.num_joints() < 2) throw ConfigError("swing_up needs at least one link");

  engine_ = engine::make_engine(character_, config_.engine, num_envs, derive_seed(seed, 0xE61E));
  rng_ = Rng(derive_seed(seed, 0xE17));
  slots_.assign(num_envs, Slot{});

  terminate_on_contact_.assign(ch.num_joints(), 0);
  if (config_.contact_termination_bodies) {
    for (const auto& name : *config_.contact_termination_bodies) {
      const int j = ch.joint_index(name);
      if (j < 0) throw ConfigError("contact_termination_bodies: unknown body '" + name + "'");
      terminate_on_contact_[j] = 1;
    }
  } else {
    for (int j = 0; j < ch.num_joints(); ++j) {
      terminate_on_contact_[j] = std::find(ch.feet().begin(), ch.feet().end(), j) == ch.feet().end();
    }
  }

  obs_dim_ = character_obs_dim(ch);
  if (is_tracking(config_.task)) obs_dim_ += 2 + joint_feature_dim(ch) + 6 + ch.dof_count();
  if (config_.task == Task::target_location) obs_dim_ += 2;
  const bool amp_like = config_.task == Task::amp || (config_.task == Task::target_location && motions_);
  disc_dim_ = amp_like ? amp_feature_dim(ch) : 0;

  if (config_.task == Task::swing_up) {
    const kin::Pose p = kin::default_pose(ch);
    const auto coms = kin::body_com_positions(ch, kin::forward_kinematics(ch, p));
    swing_length_ = (coms.back() - p.root_pos).norm();
    if (!(swing_length_ > 0.0)) throw ConfigError("swing_up: last body COM coincides with the root");
  }
  obs_ = Eigen::MatrixXd::Zero(obs_dim_, num_envs);
}

int VecEnv::add_delta_dim() const { return config_.task == Task::add ? envs::add_delta_dim(*character_) : 0; }

kin::PoseSample VecEnv::reference_at(int i, double t) const {
  const Slot& s = slots_.at(i);
  return kin::sample_pose(motions_->clip(s.clip), s.t0 + t);
}

kin::PoseSample VecEnv::reference_sample(int i) const {
  if (!motions_) throw ContractError("this environment has no reference motion");
  return reference_at(i, slots_.at(i).time);
}

double VecEnv::time_limit(int i) const {
  double limit = config_.episode_length;
  if (is_tracking(config_.task)) {
    const auto& clip = motions_->clip(slots_[i].clip);
    if (clip.loop() == kin::LoopMode::none) limit = std::min(limit, clip.duration() - slots_[i].t0);
  }
  return limit;
}

void VecEnv::sample_goal(int i) {
  const auto& ch = *character_;
  const Vec3 root = engine_->get_state(i).pose.root_pos;
  const double d = rng_.uniform(config_.goal_min_dist, config_.goal_max_dist);
  Vec3 goal = root;
  if (ch.up_axis() == kin::UpAxis::z) {
    const double a = rng_.uniform(0.0, 2.0 * std::numbers::pi);
    goal.x() += d * std::cos(a);
    goal.y() += d * std::sin(a);
    goal.z() = config_.engine.ground_height;
  } else {
    goal.x() += rng_.uniform() < 0.5 ? -d : d;
    goal.y() = config_.engine.ground_height;
    goal.z() = 0.0;
  }
  slots_[i].goal = goal;
}

void VecEnv::reset_env(int i) {
  const auto& ch = *character_;
  Slot& s = slots_[i];
  s.time = 0.0;
  s.dwell = 0.0;
  s.needs_reset = false;
  engine::SimState state;
  if (motions_ && (is_tracking(config_.task) || config_.rsi_enabled())) {
    s.clip = motions_->sample_clip(rng_);
    s.t0 = config_.rsi_enabled() ? rng_.uniform(0.0, motions_->clip(s.clip).duration()) : 0.0;
    const kin::PoseSample ref = reference_at(i, 0.0);
    state = engine_->make_state(ref.pose, ref.vel);
  } else {
    s.clip = 0;
    s.t0 = 0.0;
    kin::Pose pose = kin::default_pose(ch);
    for (Eigen::Index k = 0; k < pose.dofs.size(); ++k) pose.dofs[k] += config_.reset_noise * rng_.normal();
    state = engine_->make_state(pose, kin::zero_velocity(ch));
  }
  s.prev_pose = state.pose;
  engine_->set_state(i, state);
  if (config_.task == Task::target_location) sample_goal(i);
}

void VecEnv::set_reference_start(int i, int clip, double t0) {
  if (!motions_) throw ContractError("this environment has no reference motion");
  if (clip < 0 || clip >= motions_->size()) throw InvalidArgument("clip index out of range");
  if (!(t0 >= 0.0)) throw InvalidArgument("reference start time must be non-negative");
  Slot& s = slots_.at(i);
  s.clip = clip;
  s.t0 = t0;
  s.time = 0.0;
  s.dwell = 0.0;
  s.needs_reset = false;
  const kin::PoseSample ref = reference_at(i, 0.0);
  engine_->set_state(i, engine_->make_state(ref.pose, ref.vel));
  s.prev_pose = ref.pose;
  write_obs(i);
}

Eigen::MatrixXd VecEnv::reset() {
  for (int i = 0; i < num_envs(); ++i) {
    reset_env(i);
    write_obs(i);
  }
  return obs_;
}

Eigen::MatrixXd VecEnv::reset(const std::vector<int>& ids) {
  for (int i : ids) {
    if (i < 0 || i >= num_envs()) throw InvalidArgument("env index out of range");
    reset_env(i);
    write_obs(i);
  }
  return obs_;
}

Eigen::MatrixXd VecEnv::reset_done() {
  for (int i = 0; i < num_envs(); ++i) {
    if (!slots_[i].needs_reset) continue;
    reset_env(i);
    write_obs(i);
  }
  return obs_;
}

Eigen::VectorXd VecEnv::command_from_action(int i, const Eigen::VectorXd& a) const {
  const auto& ch = *character_;
  const double scale = config_.action_scale;
  const bool tracking = is_tracking(config_.task);
  Eigen::VectorXd cmd = Eigen::VectorXd::Zero(ch.dof_count());
  switch (config_.engine.control_mode) {
    case engine::ControlMode::none:
      break;
    case engine::ControlMode::pos:
    case engine::ControlMode::pd_1d: {
      const Eigen::VectorXd base =
          tracking ? reference_at(i, slots_[i].time + control_dt()).pose.dofs : Eigen::VectorXd::Zero(ch.dof_count());
      cmd = base + scale * a;
      for (int j = 1; j < ch.num_joints(); ++j) {
        if (ch.joint(j).kind != kin::JointKind::spherical) continue;
        const int off = ch.dof_offset(j);
        const kin::Quat q = kin::exp_map_to_quat(base.segment<3>(off)) * kin::exp_map_to_quat(scale * a.segment<3>(off));
        cmd.segment<3>(off) = kin::quat_to_exp_map(q);
      }
      break;
    }
    case engine::ControlMode::vel:
      cmd = scale * a;
      if (tracking) cmd += reference_at(i, slots_[i].time + control_dt()).vel.dof_vel;
      break;
    case engine::ControlMode::torque:
      for (int j = 1; j < ch.num_joints(); ++j) {
        const int dim = ch.dof_dim(j);
        if (dim == 0) continue;
        const int off = ch.dof_offset(j);
        cmd.segment(off, dim) = a.segment(off, dim) * ch.joint(j).torque_limit;
      }
      break;
  }
  return cmd;
}

void VecEnv::write_obs(int i) {
  const auto& ch = *character_;
  const engine::SimState& st = engine_->get_state(i);
  if (st.failed) {
    obs_.col(i).setZero();
    return;
  }
  std::vector<double> out;
  out.reserve(obs_dim_);
  FeatureWriter w(out);
  add_character_obs(ch, st.pose, st.vel, w);
  if (is_tracking(config_.task)) {
    const Slot& s = slots_[i];
    const auto& clip = motions_->clip(s.clip);
    const double t_next = s.t0 + s.time + control_dt();
    double phase = clip.duration() > 0.0 ? t_next / clip.duration() : 0.0;
    phase = clip.loop() == kin::LoopMode::wrap ? phase - std::floor(phase) : std::min(phase, 1.0);
    w.add(std::sin(2.0 * std::numbers::pi * phase));
    w.add(std::cos(2.0 * std::numbers::pi * phase));
    const kin::PoseSample ref = kin::sample_pose(clip, t_next);
    add_joint_features(ch, ref.pose, w);
    const Eigen::VectorXd delta = add_difference_obs(ch, st.pose, st.vel, ref.pose, ref.vel);
    w.add(inverse_heading(ch, st.pose.root_rot).rotate(Vec3(delta.head<3>())));
    w.add(delta.segment(3, 3 + ch.dof_count()));
  }
  if (config_.task == Task::target_location) w.add(target_location_task(ch, st.pose, slots_[i].goal).local_goal);
  obs_.col(i) = Eigen::Map<const Eigen::VectorXd>(out.data(), obs_dim_);
}

StepResult VecEnv::step(const Eigen::Ref<const Eigen::MatrixXd>& actions) {
  const auto& ch = *character_;
  const int n = num_envs();
  if (actions.rows() != action_dim() || actions.cols() != n) {
    throw InvalidArgument("actions must be action_dim x num_envs");
  }
  for (int i = 0; i < n; ++i) {
    if (slots_[i].needs_reset) {
      reset_env(i);
      write_obs(i);
    }
  }

  const double dt = control_dt();
  const bool tracking = is_tracking(config_.task);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  StepResult r;
  r.reward = Eigen::VectorXd::Zero(n);
  r.done.assign(n, DoneFlag::null);
  Eigen::MatrixXd task_reward = Eigen::MatrixXd::Zero(1, n);
  Eigen::MatrixXd e_pos_info, e_vel_info, disc, delta;
  if (tracking) {
    e_pos_info = Eigen::MatrixXd::Zero(1, n);
    e_vel_info = Eigen::MatrixXd::Zero(1, n);
  }
  if (disc_dim_ > 0) disc = Eigen::MatrixXd::Zero(disc_dim_, n);
  if (config_.task == Task::add) delta = Eigen::MatrixXd::Zero(add_delta_dim(), n);

  for (int i = 0; i < n; ++i) {
    Slot& s = slots_[i];
    s.prev_pose = engine_->get_state(i).pose;
    const Eigen::VectorXd a = actions.col(i);
    const bool finite_action = a.allFinite();

    if (config_.task == Task::view_motion) {
      const kin::PoseSample ref = reference_at(i, s.time + dt);
      engine_->set_state(i, engine_->make_state(ref.pose, ref.vel));
    } else {
      engine_->step_env(i, finite_action ? command_from_action(i, a) : a);
      if (tracking && config_.engine.backend == engine::Backend::kinematic && ch.root_is_free()) {
        engine::SimState st = engine_->get_state(i);
        if (!st.failed) {
          const kin::PoseSample ref = reference_at(i, s.time + dt);
          st.pose.root_pos = ref.pose.root_pos;
          st.pose.root_rot = ref.pose.root_rot;
          st.vel.root_lin_vel = ref.vel.root_lin_vel;
          st.vel.root_ang_vel = ref.vel.root_ang_vel;
          engine_->update_contacts(st);
          engine_->set_state(i, st);
        }
      }
    }
    s.time += dt;

    const engine::SimState& st = engine_->get_state(i);
    bool fail = st.failed || !finite_action;
    bool succ = false;
    double reward = 0.0;
    if (!fail) {
      for (int j = 0; j < ch.num_joints(); ++j) fail = fail || (terminate_on_contact_[j] && st.contacts[j]);
      if (config_.fall_height && st.pose.root_pos.dot(ch.up()) < *config_.fall_height) fail = true;
    }
    if (!st.failed) {
      if (tracking) {
        const kin::PoseSample ref = reference_at(i, s.time);
        const double ep = eval::e_pos(ch, st.pose, ref.pose);
        e_pos_info(0, i) = ep;
        e_vel_info(0, i) = eval::e_vel(ch.layout(), st.vel.dof_vel, ref.vel.dof_vel);
        if (config_.task != Task::view_motion) {
          task_reward(0, i) = tracking_reward(ch, st.pose, st.vel, ref.pose, ref.vel, config_.tracking);
          if (config_.pose_error_termination && ep > config_.pose_error_threshold) fail = true;
        }
        if (config_.task == Task::add) delta.col(i) = add_difference_obs(ch, st.pose, st.vel, ref.pose, ref.vel);
      } else if (config_.task == Task::target_location) {
        const auto tl = target_location_task(ch, st.pose, s.goal);
        task_reward(0, i) = tl.reward;
        s.dwell = tl.distance < config_.goal_radius ? s.dwell + dt : 0.0;
        succ = s.dwell >= config_.goal_dwell - kTimeEps;
      } else if (config_.task == Task::swing_up) {
        const auto coms = kin::body_com_positions(ch, kin::forward_kinematics(ch, st.pose));
        const double h = (coms.back() - st.pose.root_pos).dot(ch.up());
        task_reward(0, i) = 0.5 * (1.0 + h / swing_length_);
      }
      if (disc_dim_ > 0) disc.col(i) = amp_observation_pair(ch, s.prev_pose, st.pose, dt);
      reward = task_reward(0, i);
    } else {
      if (tracking) {
        e_pos_info(0, i) = nan;
        e_vel_info(0, i) = nan;
      }
      if (disc_dim_ > 0) disc.col(i).setConstant(nan);
      if (config_.task == Task::add) delta.col(i).setConstant(nan);
    }
    if (!finite_action || st.failed) reward = 0.0;

    const bool time_up = s.time >= time_limit(i) - kTimeEps;
    r.done[i] = resolve_done(fail, succ, time_up);
    r.reward[i] = reward;
    s.needs_reset = r.done[i] != DoneFlag::null;
    write_obs(i);
  }

  r.obs = obs_;
  r.info["task_reward"] = std::move(task_reward);
  if (tracking) {
    r.info["e_pos"] = std::move(e_pos_info);
    r.info["e_vel"] = std::move(e_vel_info);
  }
  if (disc_dim_ > 0) r.info["disc_obs"] = std::move(disc);
  if (config_.task == Task::add) r.info["add_delta"] = std::move(delta);
  return r;
}

Eigen::MatrixXd VecEnv::sample_reference_disc_obs(int n, Rng& rng) const {
  if (!motions_ || disc_dim_ == 0) throw ContractError("this environment produces no discriminator observations");
  const double dt = control_dt();
  Eigen::MatrixXd out(disc_dim_, n);
  for (int k = 0; k < n; ++k) {
    const auto& clip = motions_->clip(motions_->sample_clip(rng));
    const double span = clip.loop() == kin::LoopMode::wrap ? clip.duration() : std::max(0.0, clip.duration() - dt);
    const double t = rng.uniform(0.0, span);
    out.col(k) = amp_observation_pair(*character_, kin::sample_pose_only(clip, t), kin::sample_pose_only(clip, t + dt), dt);
  }
  return out;
}

nlohmann::json VecEnv::save_state() const {
  nlohmann::json slots = nlohmann::json::array();
  nlohmann::json states = nlohmann::json::array();
  for (int i = 0; i < num_envs(); ++i) {
    const Slot& s = slots_[i];
    engine::SimState prev;
    prev.pose = s.prev_pose;
    prev.vel = kin::zero_velocity(*character_);
    slots.push_back({{"clip", s.clip},
                     {"t0", s.t0},
                     {"time", s.time},
                     {"dwell", s.dwell},
                     {"goal", {s.goal.x(), s.goal.y(), s.goal.z()}},
                     {"needs_reset", s.needs_reset},
                     {"prev", engine::state_to_json(prev)}});
    states.push_back(engine::state_to_json(engine_->get_state(i)));
  }
  return {{"slots", slots}, {"states", states}, {"rng", rng_.serialize()}, {"engine", engine_->backend_state()}};
}

void VecEnv::load_state(const nlohmann::json& j) {
  try {
    const auto& slots = j.at("slots");
    const auto& states = j.at("states");
    if (!slots.is_array() || static_cast<int>(slots.size()) != num_envs() || states.size() != slots.size()) {
      throw FormatError("environment state: env count mismatch");
    }
    for (int i = 0; i < num_envs(); ++i) {
      const auto& sj = slots[i];
      Slot s;
      s.clip = sj.at("clip").get<int>();
      s.t0 = sj.at("t0").get<double>();
      s.time = sj.at("time").get<double>();
      s.dwell = sj.at("dwell").get<double>();
      const auto g = sj.at("goal").get<std::vector<double>>();
      if (g.size() != 3) throw FormatError("environment state: goal must have 3 components");
      s.goal = Vec3(g[0], g[1], g[2]);
      s.needs_reset = sj.at("needs_reset").get<bool>();
      s.prev_pose = engine::state_from_json(sj.at("prev")).pose;
      if (motions_ && (s.clip < 0 || s.clip >= motions_->size())) throw FormatError("environment state: bad clip index");
      engine_->set_state(i, engine::state_from_json(states[i]));
      slots_[i] = s;
    }
    rng_.deserialize(j.at("rng").get<std::string>());
    engine_->set_backend_state(j.at("engine"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("environment state: ") + e.what());
  }
  for (int i = 0; i < num_envs(); ++i) write_obs(i);
}

}  // namespace imitate::envs
