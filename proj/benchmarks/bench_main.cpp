#include <benchmark/benchmark.h>

#include "imitate/engine/planar_engine.hpp"
#include "imitate/envs/vec_env.hpp"
#include "imitate/kinematics/forward_kinematics.hpp"
#include "imitate/learning/losses.hpp"
#include "imitate/learning/model.hpp"
#include "imitate/learning/returns.hpp"

using namespace imitate;

namespace {

const std::string kData = IMITATE_DATA_DIR;

void BM_HumanoidForwardKinematics(benchmark::State& state) {
  const kin::CharacterModel ch = kin::CharacterModel::load(kData + "/characters/humanoid.json");
  kin::Pose p = kin::default_pose(ch);
  p.dofs.setConstant(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(kin::forward_kinematics(ch, p));
}
BENCHMARK(BM_HumanoidForwardKinematics);

// One control step (20 substeps) of the walker for a batch of envs.
void BM_PlanarWalkerStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto ch = std::make_shared<const kin::CharacterModel>(kin::CharacterModel::load(kData + "/characters/walker2d.json"));
  engine::EngineConfig cfg;
  cfg.backend = engine::Backend::planar_dynamics;
  engine::PlanarEngine e(ch, cfg, n);
  const Eigen::MatrixXd cmd = Eigen::MatrixXd::Constant(ch->dof_count(), n, 0.1);
  for (auto _ : state) e.step(cmd);
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_PlanarWalkerStep)->Arg(1)->Arg(64);

void BM_ChainEnvStep(benchmark::State& state) {
  envs::VecEnv env(envs::EnvConfig::load(kData + "/envs/deepmimic_chain3_env.yaml"), 64, 1);
  env.reset();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.step(a));
    env.reset_done();
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ChainEnvStep);

// PPO loss forward and backward on a [64, 64] model, minibatch of 512.
void BM_PpoLossGradient(benchmark::State& state) {
  learning::ModelConfig mc;
  mc.actor_hidden = mc.critic_hidden = {64, 64};
  learning::PolicyModel m(40, 8, 0, mc);
  Rng rng(1);
  m.init(rng);
  learning::PolicyBatch b;
  b.x = Eigen::MatrixXd::Random(40, 512);
  b.actions = Eigen::MatrixXd::Random(8, 512);
  b.old_log_prob = learning::gaussian_log_prob(m.action_mean(b.x), m.log_std(), b.actions);
  b.advantages = Eigen::VectorXd::Random(512);
  b.returns = Eigen::VectorXd::Random(512);
  Eigen::VectorXd g(m.num_params());
  for (auto _ : state) {
    g.setZero();
    benchmark::DoNotOptimize(learning::ppo_loss(m, b, {}, g));
  }
  state.SetItemsProcessed(state.iterations() * 512);
}
BENCHMARK(BM_PpoLossGradient);

void BM_Gae(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const Eigen::VectorXd r = Eigen::VectorXd::Random(T), v = Eigen::VectorXd::Random(T),
                        boot = Eigen::VectorXd::Random(T);
  std::vector<envs::DoneFlag> done(T, envs::DoneFlag::null);
  for (int t = 37; t < T; t += 101) done[t] = envs::DoneFlag::time;
  for (auto _ : state) benchmark::DoNotOptimize(learning::compute_returns_advantages(r, v, done, boot, {}));
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_Gae)->Arg(32)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
