// Acceptance gate: one PASS/FAIL line per criterion. Pass criterion names as
// arguments to run a subset. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Geometry>

#include "imitate/cli/args.hpp"
#include "imitate/cli/run.hpp"
#include "imitate/envs/vec_env.hpp"
#include "imitate/eval/evaluate.hpp"
#include "imitate/eval/metrics.hpp"
#include "imitate/kinematics/forward_kinematics.hpp"
#include "imitate/kinematics/quat.hpp"
#include "imitate/learning/adam.hpp"
#include "imitate/learning/agent.hpp"
#include "imitate/learning/checkpoint.hpp"
#include "imitate/learning/communicator.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace imitate;

namespace {

const std::string kData = IMITATE_DATA_DIR;

// Tolerances and budgets.
constexpr double kGaeTol = 1e-6;
constexpr double kGaeSeconds = 5.0;
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 30.0;
constexpr double kRotTol = 1e-9;
constexpr double kFkTol = 1e-9;
constexpr double kMetricTol = 1e-12;
constexpr double kDeepMimicEpos = 0.05;
constexpr int kDeepMimicIters = 300;
constexpr int kDeepMimicSeeds = 5;
constexpr int kDeepMimicRequired = 4;
constexpr double kPendulumFraction = 0.9;
constexpr int kPendulumIters = 200;
constexpr double kPendulumSeconds = 300.0;
constexpr double kAmpSeparation = 1.0;
constexpr double kAmpStyle = 0.8;
constexpr int kDiscUpdates = 500;
constexpr double kAddEpos = 0.08;
constexpr double kUnionTol = 1e-6;
constexpr double kPlaybackEpos = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

envs::EnvConfig env_cfg(const std::string& name) { return envs::EnvConfig::load(kData + "/envs/" + name + ".yaml"); }
learning::AgentConfig agent_cfg(const std::string& name) {
  return learning::AgentConfig::load(kData + "/agents/" + name + ".yaml");
}

eval::PolicyFn mean_policy(learning::Agent& agent) {
  return [&agent](const Eigen::MatrixXd& obs) { return agent.act(obs, true); };
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "imitate_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome gae_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  double worst = 0.0;
  bool all_flags[4] = {false, false, false, false};
  for (int k = 0; k < 200; ++k) {
    const oracle::GaeCase c = oracle::random_gae_case(rng);
    for (auto d : c.done) all_flags[static_cast<int>(d)] = true;
    const auto got = learning::compute_returns_advantages(c.r, c.v, c.done, c.boot, c.params);
    const auto want = oracle::gae(c.r, c.v, c.done, c.boot, c.params);
    worst = std::max({worst, (got.advantages - want.advantages).cwiseAbs().maxCoeff(),
                      (got.returns - want.returns).cwiseAbs().maxCoeff()});
  }
  const double secs = seconds_since(t0);
  const bool flags = all_flags[0] && all_flags[1] && all_flags[2] && all_flags[3];
  return {worst <= kGaeTol && secs < kGaeSeconds && flags,
          fmt("200 sequences, max abs err %.2e (tol %.0e), all done flags %s, %.3f s", worst, kGaeTol,
              flags ? "seen" : "MISSING", secs)};
}

Outcome gradient_checks() {
  const auto t0 = std::chrono::steady_clock::now();
  const char* names[] = {"ppo", "awr", "amp_disc", "add_disc"};
  const oracle::GradCase cases[] = {oracle::GradCase::ppo, oracle::GradCase::awr, oracle::GradCase::amp_disc,
                                    oracle::GradCase::add_disc};
  std::string detail;
  bool pass = true;
  for (int k = 0; k < 4; ++k) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) worst = std::max(worst, oracle::loss_gradient_error(cases[k], seed));
    pass = pass && worst <= kGradTol;
    detail += fmt("%s %.1e, ", names[k], worst);
  }
  const double secs = seconds_since(t0);
  return {pass && secs < kGradSeconds, detail + fmt("rel tol %.0e, %.3f s", kGradTol, secs)};
}

Outcome rotation_fk() {
  std::mt19937_64 g(7);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, std::numbers::pi - 1e-6);
  double rot = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const kin::Vec3 v = kin::Vec3(n(g), n(g), n(g)).normalized() * u(g);
    rot = std::max(rot, (kin::quat_to_exp_map(kin::exp_map_to_quat(v)) - v).norm());
  }
  // FK against homogeneous matrices built from Eigen's angle-axis
  const kin::CharacterModel ch = kin::CharacterModel::load(kData + "/characters/humanoid.json");
  double fk = 0.0;
  std::uniform_real_distribution<double> w(-1.5, 1.5);
  for (int k = 0; k < 500; ++k) {
    kin::Pose p = kin::zero_pose(ch);
    p.root_pos = kin::Vec3(w(g), w(g), w(g));
    const kin::Vec3 rv = kin::Vec3(n(g), n(g), n(g)).normalized() * u(g);
    p.root_rot = kin::exp_map_to_quat(rv);
    for (Eigen::Index d = 0; d < p.dofs.size(); ++d) p.dofs[d] = w(g);
    const auto frames = kin::forward_kinematics(ch, p);
    std::vector<Eigen::Matrix4d> T(ch.num_joints());
    for (int j = 0; j < ch.num_joints(); ++j) {
      const auto& js = ch.joint(j);
      Eigen::Matrix4d local = Eigen::Matrix4d::Identity();
      if (j == 0) {
        local.block<3, 3>(0, 0) = Eigen::AngleAxisd(rv.norm(), rv.normalized()).toRotationMatrix();
        local.block<3, 1>(0, 3) = p.root_pos;
        T[0] = local;
        continue;
      }
      Eigen::Matrix4d trans = Eigen::Matrix4d::Identity();
      trans.block<3, 1>(0, 3) = js.local_offset;
      const int off = ch.dof_offset(j);
      if (js.kind == kin::JointKind::revolute) {
        local.block<3, 3>(0, 0) = Eigen::AngleAxisd(p.dofs[off], js.axis.normalized()).toRotationMatrix();
      } else if (js.kind == kin::JointKind::spherical) {
        const kin::Vec3 e = p.dofs.segment<3>(off);
        local.block<3, 3>(0, 0) = Eigen::AngleAxisd(e.norm(), e.normalized()).toRotationMatrix();
      }
      T[j] = T[js.parent] * trans * local;
    }
    for (int j = 0; j < ch.num_joints(); ++j) {
      fk = std::max(fk, (frames[j].pos - T[j].block<3, 1>(0, 3)).norm());
      fk = std::max(fk, (frames[j].rot.to_matrix() - T[j].block<3, 3>(0, 0)).norm());
    }
  }
  return {rot <= kRotTol && fk <= kFkTol,
          fmt("1e4 exp-map round trips max %.2e, humanoid FK vs matrix chain max %.2e (tol %.0e)", rot, fk, kRotTol)};
}

Outcome metrics() {
  std::mt19937_64 g(8);
  std::normal_distribution<double> n;
  const auto pts = [&](int k) {
    std::vector<kin::Vec3> v;
    for (int i = 0; i < k; ++i) v.emplace_back(n(g), n(g), n(g));
    return v;
  };
  const auto epos = [](const std::vector<kin::Vec3>& s, const std::vector<kin::Vec3>& r) {
    return eval::e_pos({s.begin() + 1, s.end()}, s[0], {r.begin() + 1, r.end()}, r[0]);
  };
  double worst_pos = 0.0, worst_vel = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto a = pts(15), b = pts(15);
    worst_pos = std::max(worst_pos, std::abs(epos(a, b) - oracle::e_pos(a, b)));
  }
  // e_vel oracle on the humanoid layout: per-joint velocity-vector distance over N+1
  const kin::CharacterModel ch = kin::CharacterModel::load(kData + "/characters/humanoid.json");
  const int N = ch.num_joints() - 1;
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd a(ch.dof_count()), b(ch.dof_count());
    for (int d = 0; d < ch.dof_count(); ++d) {
      a[d] = n(g);
      b[d] = n(g);
    }
    double s = 0.0;
    for (int j = 1; j < ch.num_joints(); ++j) {
      const int off = ch.dof_offset(j), dim = ch.dof_dim(j);
      if (dim > 0) s += (b.segment(off, dim) - a.segment(off, dim)).norm();
    }
    worst_vel = std::max(worst_vel, std::abs(eval::e_vel(ch.layout(), a, b) - s / (N + 1)));
  }
  const auto ref = pts(10);
  const double same = epos(ref, ref);
  auto shifted = ref;
  for (auto& p : shifted) p += kin::Vec3(1.0, 0.0, 0.0);
  const double shift = epos(shifted, ref);
  const bool exact = shift == 1.0 / 10.0;
  return {worst_pos <= kMetricTol && worst_vel <= kMetricTol && same == 0.0 && exact,
          fmt("e_pos max err %.1e, e_vel max err %.1e (tol %.0e), identical -> %g, unit shift N=9 -> %.17g (1/10 %s)",
              worst_pos, worst_vel, kMetricTol, same, shift, exact ? "exact" : "INEXACT")};
}

Outcome deepmimic_chain() {
  const envs::EnvConfig cfg = env_cfg("deepmimic_chain3_env");
  const learning::AgentConfig acfg = agent_cfg("deepmimic_chain3_ppo_agent");
  envs::VecEnv eval_env(cfg, 16, 0xE7A1);
  const auto zero = [](const Eigen::MatrixXd& o) { return Eigen::MatrixXd::Zero(3, o.cols()).eval(); };
  const double baseline = eval::run_episodes(eval_env, zero, 32, eval::Weighting::episode, 1).e_pos_mean;
  int passed = 0;
  std::string detail;
  double total = 0.0;
  for (int seed = 1; seed <= kDeepMimicSeeds; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    envs::VecEnv env(cfg, 64, derive_seed(seed, 0xE000));
    learning::Agent agent(acfg, env, seed);
    for (int k = 0; k < kDeepMimicIters; ++k) agent.train_iteration();
    const double e = eval::run_episodes(eval_env, mean_policy(agent), 32, eval::Weighting::episode, 1).e_pos_mean;
    const double secs = seconds_since(t0);
    total += secs;
    passed += e <= kDeepMimicEpos;
    detail += fmt("s%d %.4f (%.0fs) ", seed, e, secs);
  }
  return {passed >= kDeepMimicRequired,
          fmt("%d/%d seeds e_pos <= %.2f m after %d iters: %szero-residual baseline %.4f, total %.0f s on 1 core",
              passed, kDeepMimicSeeds, kDeepMimicEpos, kDeepMimicIters, detail.c_str(), baseline, total)};
}

Outcome pendulum_swing_up() {
  const auto t0 = std::chrono::steady_clock::now();
  envs::VecEnv eval_env(env_cfg("swing_up_pendulum_env"), 16, 77);
  const double limit = eval_env.character().joint(1).torque_limit;
  double best_pd = -1e300, best_kp = 0, best_kd = 0;
  for (double kp : {5.0, 10.0, 20.0, 40.0}) {
    for (double kd : {0.5, 1.0, 2.0}) {
      const auto pd = [&](const Eigen::MatrixXd& o) {
        Eigen::MatrixXd a(1, o.cols());
        for (int i = 0; i < o.cols(); ++i) {
          const auto& s = eval_env.engine().get_state(i);
          const double tau = kp * (std::numbers::pi - s.pose.dofs[0]) - kd * s.vel.dof_vel[0];
          a(0, i) = std::clamp(tau / limit, -1.0, 1.0);
        }
        return a;
      };
      const double r = eval::run_episodes(eval_env, pd, 32, eval::Weighting::episode, 1).return_mean;
      if (r > best_pd) {
        best_pd = r;
        best_kp = kp;
        best_kd = kd;
      }
    }
  }
  const double pd_secs = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  envs::VecEnv env(env_cfg("swing_up_pendulum_train_env"), 32, derive_seed(1, 0xE000));
  learning::Agent agent(agent_cfg("swing_up_pendulum_ppo_agent"), env, 1);
  for (int k = 0; k < kPendulumIters; ++k) agent.train_iteration();
  const double ret = eval::run_episodes(eval_env, mean_policy(agent), 32, eval::Weighting::episode, 1).return_mean;
  const double secs = seconds_since(t1);
  return {ret >= kPendulumFraction * best_pd && secs <= kPendulumSeconds,
          fmt("PPO return %.2f vs best PD %.2f (kp %g kd %g), ratio %.3f >= %.2f, training+eval %.0f s, PD grid %.0f s",
              ret, best_pd, best_kp, best_kd, ret / best_pd, kPendulumFraction, secs, pd_secs)};
}

// Discriminator trained directly with the library loss and optimizer.
struct DiscTrainer {
  learning::PolicyModel model;
  learning::Adam opt;
  learning::RunningNormalizer norm;

  DiscTrainer(int dim, const learning::AgentConfig& cfg, std::uint64_t seed)
      : model(1, 1, dim, cfg.model), norm(dim, cfg.normalizer_clip) {
    Rng rng(seed);
    model.init(rng);
    opt = learning::Adam(model.disc_segment().offset, Eigen::VectorXd::Constant(model.disc_segment().size, cfg.disc_lr));
  }
  void update(const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake, double gp) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(model.num_params());
    learning::disc_loss(model, norm.normalize(real), norm.normalize(fake), gp, g);
    opt.step(model.params(), g);
  }
  Eigen::VectorXd score(const Eigen::MatrixXd& x) const { return model.disc_score(norm.normalize(x)); }
};

Eigen::MatrixXd random_columns(const Eigen::MatrixXd& pool, int n, Rng& rng) {
  Eigen::MatrixXd out(pool.rows(), n);
  for (int c = 0; c < n; ++c) out.col(c) = pool.col(rng.integer(0, static_cast<int>(pool.cols()) - 1));
  return out;
}

Outcome amp_separation() {
  const learning::AgentConfig cfg = agent_cfg("amp_chain3_agent");
  envs::VecEnv env(env_cfg("amp_chain3_env"), 32, 5);
  Rng rng(11);
  // fake: uniformly random actions on the simulated chain
  std::vector<Eigen::VectorXd> cols;
  env.reset();
  for (int t = 0; t < 200; ++t) {
    Eigen::MatrixXd a(3, 32);
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = rng.uniform(-1.0, 1.0);
    const envs::StepResult r = env.step(a);
    const Eigen::MatrixXd& d = r.info.at("disc_obs");
    for (int i = 0; i < d.cols(); ++i)
      if (d.col(i).allFinite()) cols.push_back(d.col(i));
    env.reset_done();
  }
  Eigen::MatrixXd fake(env.disc_obs_dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) fake.col(static_cast<Eigen::Index>(c)) = cols[c];
  const Eigen::MatrixXd real = env.sample_reference_disc_obs(static_cast<int>(fake.cols()), rng);

  DiscTrainer disc(env.disc_obs_dim(), cfg, 3);
  disc.norm.update(real);
  disc.norm.update(fake);
  const int b = cfg.disc_batch_size;
  for (int k = 0; k < kDiscUpdates; ++k) disc.update(random_columns(real, b, rng), random_columns(fake, b, rng), cfg.gp_coef);

  const Eigen::MatrixXd real_test = env.sample_reference_disc_obs(2000, rng);
  const Eigen::VectorXd dr = disc.score(real_test), df = disc.score(fake);
  double style = 0.0;
  for (Eigen::Index i = 0; i < dr.size(); ++i) style += learning::style_reward(dr[i]);
  style /= static_cast<double>(dr.size());
  const double sep = dr.mean() - df.mean();
  return {sep > kAmpSeparation && style >= kAmpStyle,
          fmt("%d updates (lr %g): mean D(real) %.3f, mean D(fake) %.3f, separation %.3f > %.1f; "
              "style reward of held-out replay %.3f >= %.1f",
              kDiscUpdates, cfg.disc_lr, dr.mean(), df.mean(), sep, kAmpSeparation, style, kAmpStyle)};
}

Outcome add_sanity() {
  const auto t0 = std::chrono::steady_clock::now();
  const envs::EnvConfig cfg = env_cfg("add_chain3_env");
  envs::VecEnv env(cfg, 64, derive_seed(1, 0xE000));
  learning::Agent agent(agent_cfg("add_chain3_agent"), env, 1);
  for (int k = 0; k < kDeepMimicIters; ++k) agent.train_iteration();
  const long updates = static_cast<long>(kDeepMimicIters) * agent.config().epochs * agent.config().minibatches;

  // held-out differences: stochastic-policy rollouts plus a signed per-dimension grid
  envs::VecEnv probe(cfg, 16, 4242);
  std::vector<Eigen::VectorXd> deltas;
  Eigen::MatrixXd obs = probe.reset();
  for (int t = 0; t < 60; ++t) {
    const envs::StepResult r = probe.step(agent.act(obs, false));
    const Eigen::MatrixXd& d = r.info.at("add_delta");
    for (int i = 0; i < d.cols(); ++i)
      if (d.col(i).allFinite() && d.col(i).norm() > 0) deltas.push_back(d.col(i));
    obs = probe.reset_done();
  }
  const int dim = probe.add_delta_dim();
  for (int k = 0; k < dim; ++k) {
    for (double s : {-0.5, -0.1, -0.02, 0.02, 0.1, 0.5}) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
      d[k] = s;
      deltas.push_back(d);
    }
  }
  Eigen::MatrixXd D(dim, static_cast<Eigen::Index>(deltas.size()));
  for (std::size_t c = 0; c < deltas.size(); ++c) D.col(static_cast<Eigen::Index>(c)) = deltas[c];
  const double r0 = agent.add_reward(Eigen::MatrixXd::Zero(dim, 1))[0];
  const Eigen::VectorXd rs = agent.add_reward(D);
  const double rmax = rs.maxCoeff();

  envs::VecEnv eval_env(cfg, 16, 0xE7A1);
  const double e = eval::run_episodes(eval_env, mean_policy(agent), 32, eval::Weighting::episode, 1).e_pos_mean;
  const bool ok = r0 > rmax && updates >= kDiscUpdates && e <= kAddEpos;
  return {ok, fmt("%ld disc updates: reward(0) %.4f vs max over %d nonzero deltas %.4f; e_pos %.4f <= %.2f after %d "
                  "iters, %.0f s",
                  updates, r0, static_cast<int>(rs.size()), rmax, e, kAddEpos, kDeepMimicIters, seconds_since(t0))};
}

cli::RunArgs small_run(const fs::path& dir, const std::string& agent_json, int workers, int iters) {
  std::ofstream(dir / "agent.json") << agent_json;
  cli::RunArgs a;
  a.num_envs = 8;
  a.num_workers = workers;
  a.env_config = kData + "/envs/amp_chain3_env.yaml";
  a.agent_config = (dir / "agent.json").string();
  a.log_file = (dir / "log.txt").string();
  a.out_model_file = (dir / "model.json").string();
  a.seed = 42;
  a.max_iters = iters;
  return a;
}

std::string strip_wall_time(const std::string& csv) {
  std::stringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      if (col++ != 2) out += cell + ",";
    }
    out += "\n";
  }
  return out;
}

constexpr const char* kSmallAmp =
    R"({"agent":"amp","steps_per_env":16,"epochs":2,"minibatches":2,"disc_batch_size":64,"model":{"hidden":[32,32]}})";

Outcome determinism() {
  std::ostringstream sink;
  const fs::path a = scratch("det_a"), b = scratch("det_b"), w2 = scratch("det_w2");
  cli::run_train(small_run(a, kSmallAmp, 1, 10), sink, sink);
  cli::run_train(small_run(b, kSmallAmp, 1, 10), sink, sink);
  const std::string la = slurp(a / "log.csv"), lb = slurp(b / "log.csv");
  const bool logs_equal = !la.empty() && strip_wall_time(la) == strip_wall_time(lb);

  // two-rank reduction vs the union batch on the chain tracking model
  envs::VecEnv env(env_cfg("deepmimic_chain3_env"), 64, 1);
  const learning::AgentConfig cfg = agent_cfg("deepmimic_chain3_ppo_agent");
  learning::PolicyModel model(env.obs_dim(), env.action_dim(), 0, cfg.model);
  Rng rng(9);
  model.init(rng);
  learning::PolicyBatch full;
  full.x = env.reset();
  full.actions = model.action_mean(full.x) + 0.2 * Eigen::MatrixXd::Random(env.action_dim(), 64);
  full.old_log_prob = learning::gaussian_log_prob(model.action_mean(full.x), model.log_std(), full.actions).array() +
                      0.1 * Eigen::ArrayXd::Random(64);
  full.advantages = Eigen::VectorXd::Random(64);
  full.returns = Eigen::VectorXd::Random(64);
  const learning::PpoParams pp{cfg.clip, cfg.value_coef, cfg.entropy_coef};
  Eigen::VectorXd g_union = Eigen::VectorXd::Zero(model.num_params());
  learning::ppo_loss(model, full, pp, g_union);
  learning::Communicator comm(2);
  std::vector<Eigen::VectorXd> reduced(2);
  std::vector<std::thread> threads;
  for (int r = 0; r < 2; ++r) {
    threads.emplace_back([&, r] {
      learning::PolicyBatch h;
      h.x = full.x.middleCols(32 * r, 32);
      h.actions = full.actions.middleCols(32 * r, 32);
      h.old_log_prob = full.old_log_prob.segment(32 * r, 32);
      h.advantages = full.advantages.segment(32 * r, 32);
      h.returns = full.returns.segment(32 * r, 32);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(model.num_params());
      learning::ppo_loss(model, h, pp, g);
      reduced[r] = comm.allreduce_mean(r, g);
    });
  }
  for (auto& t : threads) t.join();
  const double union_err = (reduced[0] - g_union).cwiseAbs().maxCoeff();

  // two worker threads through the CLI; every iteration runs epochs x minibatches updates
  cli::run_train(small_run(w2, kSmallAmp, 2, 10), sink, sink);
  const auto workers = learning::load_checkpoint(w2 / "model.json");
  bool replicas = workers.size() == 2;
  for (const char* key : {"params", "obs_norm", "disc_norm", "policy_opt", "disc_opt"})
    replicas = replicas && workers[0].at(key) == workers[1].at(key);
  return {logs_equal && union_err <= kUnionTol && replicas,
          fmt("10-iter log %s modulo wall_time; W=2 mean vs union gradient max diff %.1e (tol %.0e); "
              "replicas after 40 updates %s",
              logs_equal ? "byte-identical" : "DIFFERS", union_err, kUnionTol,
              replicas ? "bit-identical" : "DIFFER")};
}

Outcome cli_contract() {
  const fs::path dir = scratch("cli");
  std::ofstream(dir / "args.txt") << "--num_envs 4096\n--max_iters 3\n";
  const cli::RunArgs parsed = cli::parse_args({"--arg_file", (dir / "args.txt").string(), "--num_envs", "8"});
  const bool override_ok = parsed.num_envs == 8 && parsed.max_iters == 3;

  std::ostringstream sink;
  const fs::path full = scratch("cli_full"), split = scratch("cli_split");
  const std::string ppo = R"({"agent":"ppo","steps_per_env":16,"epochs":2,"minibatches":2,"model":{"hidden":[32,32]}})";
  cli::RunArgs a = small_run(full, ppo, 1, 6);
  a.env_config = kData + "/envs/deepmimic_chain3_env.yaml";
  cli::run_train(a, sink, sink);
  cli::RunArgs b1 = small_run(split, ppo, 1, 3);
  b1.env_config = a.env_config;
  cli::run_train(b1, sink, sink);
  cli::RunArgs b2 = b1;
  b2.max_iters = 6;
  b2.model_file = b2.out_model_file;
  cli::run_train(b2, sink, sink);
  const bool resume_ok = strip_wall_time(slurp(full / "log.csv")) == strip_wall_time(slurp(split / "log.csv")) &&
                         learning::load_checkpoint(full / "model.json") == learning::load_checkpoint(split / "model.json");

  cli::RunArgs t;
  t.mode = "test";
  t.model_file = "playback";
  t.num_envs = 4;
  t.test_episodes = 8;
  t.env_config = kData + "/envs/deepmimic_chain3_kinematic_env.yaml";
  t.log_file = (dir / "log.txt").string();
  const double e = cli::run_test(t, sink, sink).report.summary().e_pos_mean;
  return {override_ok && resume_ok && e <= kPlaybackEpos,
          fmt("arg file 4096 overridden to %d; 3+3 resume %s 6-iter run; playback e_pos %.1e <= %.0e", parsed.num_envs,
              resume_ok ? "reproduces" : "DIFFERS from", e, kPlaybackEpos)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"gae_oracle", gae_oracle},       {"gradient_checks", gradient_checks},
      {"rotation_fk", rotation_fk},     {"metrics", metrics},
      {"deepmimic_chain", deepmimic_chain}, {"pendulum_swing_up", pendulum_swing_up},
      {"amp_separation", amp_separation}, {"add_sanity", add_sanity},
      {"determinism", determinism},     {"cli", cli_contract},
  };
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
