#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>

#include "imitate/envs/vec_env.hpp"
#include "imitate/learning/adam.hpp"
#include "imitate/learning/agent.hpp"
#include "imitate/learning/checkpoint.hpp"
#include "imitate/learning/communicator.hpp"
#include "imitate/learning/losses.hpp"
#include "imitate/learning/normalizer.hpp"
#include "imitate/learning/returns.hpp"
#include "imitate/util/error.hpp"
#include "support/oracles.hpp"

namespace imitate::learning {
namespace {

using envs::DoneFlag;

const std::string kData = IMITATE_DATA_DIR;

TEST(Normalizer, ConstantAndTwoValueExamples) {
  RunningNormalizer n(1);
  n.update(Eigen::MatrixXd::Constant(1, 10, 3.0));
  EXPECT_DOUBLE_EQ(n.mean()[0], 3.0);
  EXPECT_DOUBLE_EQ(n.variance()[0], 0.0);
  RunningNormalizer m(1);
  Eigen::MatrixXd x(1, 2);
  x << 1.0, 3.0;
  m.update(x);
  EXPECT_DOUBLE_EQ(m.mean()[0], 2.0);
  EXPECT_DOUBLE_EQ(m.variance()[0], 1.0);
  Eigen::MatrixXd probe(1, 1);
  probe << 100.0;
  EXPECT_DOUBLE_EQ(m.normalize(probe)(0, 0), 5.0);
}

TEST(Normalizer, ChunkedMatchesTwoPass) {
  Rng rng(1);
  Eigen::MatrixXd data(3, 1000);
  for (Eigen::Index k = 0; k < data.size(); ++k) data(k) = 10.0 + 4.0 * rng.normal();
  RunningNormalizer n(3);
  for (int c = 0; c < 1000;) {
    const int len = std::min(rng.integer(1, 97), 1000 - c);
    n.update(data.middleCols(c, len));
    c += len;
  }
  const Eigen::VectorXd mean = data.rowwise().mean();
  const Eigen::VectorXd var = (data.colwise() - mean).array().square().rowwise().mean();
  EXPECT_LE((n.mean() - mean).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((n.variance() - var).cwiseAbs().maxCoeff(), 1e-6);
  const RunningNormalizer back = RunningNormalizer::from_json(nlohmann::json::parse(n.to_json().dump()));
  EXPECT_EQ(back, n);
}

TEST(Gae, SingleStepCases) {
  ReturnParams p;
  p.discount = 0.9;
  p.lambda = 0.8;
  p.fail_value = -1.0;
  const Eigen::VectorXd r = Eigen::VectorXd::Constant(1, 2.0), v = Eigen::VectorXd::Constant(1, 0.5),
                        boot = Eigen::VectorXd::Constant(1, 3.0);
  EXPECT_DOUBLE_EQ(compute_returns_advantages(r, v, {DoneFlag::fail}, boot, p).returns[0], 2.0 - 0.9);
  EXPECT_DOUBLE_EQ(compute_returns_advantages(r, v, {DoneFlag::succ}, boot, p).returns[0], 2.0);
  EXPECT_DOUBLE_EQ(compute_returns_advantages(r, v, {DoneFlag::time}, boot, p).returns[0], 2.0 + 0.9 * 3.0);
  EXPECT_DOUBLE_EQ(compute_returns_advantages(r, v, {DoneFlag::null}, boot, p).advantages[0], 2.0 + 2.7 - 0.5);
}

TEST(Gae, LambdaOneIsDiscountedMonteCarlo) {
  ReturnParams p;
  p.discount = 0.5;
  p.lambda = 1.0;
  Eigen::VectorXd r(3), v(3), boot = Eigen::VectorXd::Zero(3);
  r << 1, 2, 4;
  v << 7, -3, 0.25;
  const auto out = compute_returns_advantages(r, v, {DoneFlag::null, DoneFlag::null, DoneFlag::fail}, boot, p);
  EXPECT_NEAR(out.returns[0], 1 + 0.5 * 2 + 0.25 * 4, 1e-12);
  EXPECT_NEAR(out.returns[1], 2 + 0.5 * 4, 1e-12);
}

TEST(Gae, MatchesExplicitSumOracle) {
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const oracle::GaeCase c = oracle::random_gae_case(rng);
    const auto got = compute_returns_advantages(c.r, c.v, c.done, c.boot, c.params);
    const auto want = oracle::gae(c.r, c.v, c.done, c.boot, c.params);
    EXPECT_LE((got.advantages - want.advantages).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((got.returns - want.returns).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Gae, MissingBootstrapIsContractError) {
  const Eigen::VectorXd r = Eigen::VectorXd::Ones(2), v = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd boot(2);
  boot << 0.0, std::nan("");
  EXPECT_THROW(compute_returns_advantages(r, v, {DoneFlag::null, DoneFlag::null}, boot, {}), ContractError);
}

TEST(PpoLoss, UnitRatioGivesNegativeMeanAdvantage) {
  Rng rng(3);
  PolicyModel m = oracle::tiny_model(rng);
  PolicyBatch b = oracle::random_batch(m, rng, 10);
  b.old_log_prob = gaussian_log_prob(m.action_mean(b.x), m.log_std(), b.actions);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m.num_params());
  const LossStats s = ppo_loss(m, b, {0.2, 0.0, 0.0}, g);
  EXPECT_NEAR(s.policy, -b.advantages.mean(), 1e-12);
  EXPECT_EQ(s.clip_fraction, 0.0);
}

TEST(PpoLoss, PositiveAdvantageIsClippedAtOnePlusEpsilon) {
  Rng rng(4);
  PolicyModel m = oracle::tiny_model(rng);
  PolicyBatch b = oracle::random_batch(m, rng, 1);
  b.advantages[0] = 1.0;
  b.old_log_prob = gaussian_log_prob(m.action_mean(b.x), m.log_std(), b.actions).array() - 1.0;  // ratio e
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m.num_params());
  const LossStats s = ppo_loss(m, b, {0.2, 0.0, 0.0}, g);
  EXPECT_NEAR(s.policy, -1.2, 1e-12);
  EXPECT_LE(g.segment(0, m.critic_segment().offset).norm(), 1e-15);
}

TEST(PpoLoss, HugeClipEqualsVanillaPolicyGradient) {
  Rng rng(5);
  PolicyModel m = oracle::tiny_model(rng);
  PolicyBatch b = oracle::random_batch(m, rng, 12);
  b.old_log_prob = gaussian_log_prob(m.action_mean(b.x), m.log_std(), b.actions);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m.num_params()), w = g;
  ppo_loss(m, b, {1e9, 0.0, 0.0}, g);
  // at ratio 1 the gradient of -mean(ratio A) equals that of -mean(A log pi)
  PolicyBatch wb = b;
  wb.weights = b.advantages;
  awr_loss(m, wb, 0.0, w);
  EXPECT_LE((g - w).norm(), 1e-12 * (1.0 + g.norm()));
}

TEST(Gradients, MatchCentralDifferences) {
  for (std::uint64_t seed : {1, 2, 3}) {
    EXPECT_LE(oracle::loss_gradient_error(oracle::GradCase::ppo, seed), 1e-4);
    EXPECT_LE(oracle::loss_gradient_error(oracle::GradCase::awr, seed), 1e-4);
    EXPECT_LE(oracle::loss_gradient_error(oracle::GradCase::amp_disc, seed), 1e-4);
    EXPECT_LE(oracle::loss_gradient_error(oracle::GradCase::add_disc, seed), 1e-4);
  }
}

TEST(AwrWeights, ExpAndClamp) {
  Eigen::VectorXd a(3);
  a << 0.0, 1.0, 10.0;
  const Eigen::VectorXd w = awr_weights(a, 0.5, 20.0);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  EXPECT_NEAR(w[1], std::exp(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(w[2], 20.0);
}

TEST(StyleReward, Examples) {
  EXPECT_DOUBLE_EQ(style_reward(1.0), 1.0);
  EXPECT_DOUBLE_EQ(style_reward(0.0), 0.75);
  EXPECT_DOUBLE_EQ(style_reward(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(style_reward(-5.0), 0.0);
}

TEST(DiscLoss, SwappingRealAndFakeMirrorsScores) {
  Rng rng(6);
  PolicyModel m = oracle::tiny_model(rng);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(2, 8), b = Eigen::MatrixXd::Random(2, 8);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m.num_params());
  const DiscStats s1 = disc_loss(m, a, b, 0.0, g);
  const DiscStats s2 = disc_loss(m, b, a, 0.0, g);
  EXPECT_NEAR(s1.real_mean, s2.fake_mean, 1e-12);
  EXPECT_NEAR(s1.fake_mean, s2.real_mean, 1e-12);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(4), g(4);
  g << 1.0, -2.0, 0.0, 5.0;
  Adam opt(1, Eigen::VectorXd::Constant(2, 0.1));
  opt.step(p, g);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_NEAR(p[1], 0.1, 1e-6);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(p[3], 0.0);
}

TEST(AverageGradients, ExamplesAndLayoutError) {
  Eigen::VectorXd a(2), b(2);
  a << 1.0, 2.0;
  b << 3.0, 6.0;
  EXPECT_EQ(average_gradients({a, b}), Eigen::Vector2d(2.0, 4.0));
  EXPECT_EQ(average_gradients({a}), a);
  EXPECT_THROW(average_gradients({a, Eigen::VectorXd::Zero(3)}), ContractError);
  EXPECT_THROW(average_gradients({}), ContractError);
}

TEST(Communicator, TwoRankMeanEqualsUnionBatchGradient) {
  Rng rng(7);
  PolicyModel m = oracle::tiny_model(rng);
  const PolicyBatch full = oracle::random_batch(m, rng, 16);
  const auto half = [&](int r) {
    PolicyBatch h;
    h.x = full.x.middleCols(8 * r, 8);
    h.actions = full.actions.middleCols(8 * r, 8);
    h.old_log_prob = full.old_log_prob.segment(8 * r, 8);
    h.advantages = full.advantages.segment(8 * r, 8);
    h.returns = full.returns.segment(8 * r, 8);
    return h;
  };
  Eigen::VectorXd g_full = Eigen::VectorXd::Zero(m.num_params());
  ppo_loss(m, full, {}, g_full);
  Communicator comm(2);
  std::vector<Eigen::VectorXd> reduced(2);
  std::vector<std::thread> threads;
  for (int r = 0; r < 2; ++r) {
    threads.emplace_back([&, r] {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(m.num_params());
      ppo_loss(m, half(r), {}, g);
      reduced[r] = comm.allreduce_mean(r, g);
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE((reduced[0] - g_full).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(reduced[0], reduced[1]);
}

AgentConfig small_config(AgentType type) {
  AgentConfig c = AgentConfig::from_json({{"agent", to_string(type)},
                                          {"steps_per_env", 8},
                                          {"epochs", 2},
                                          {"minibatches", 2},
                                          {"awr_steps", 4},
                                          {"awr_batch_size", 32},
                                          {"disc_batch_size", 32},
                                          {"model", {{"hidden", {16, 16}}}}});
  return c;
}

envs::EnvConfig env_for(AgentType type) {
  const char* name = type == AgentType::amp   ? "amp_chain3_env"
                     : type == AgentType::add ? "add_chain3_env"
                                              : "deepmimic_chain3_env";
  return envs::EnvConfig::load(kData + "/envs/" + name + ".yaml");
}

TEST(Agent, EveryAlgorithmTrainsWithFiniteStats) {
  for (AgentType type : {AgentType::ppo, AgentType::awr, AgentType::amp, AgentType::add}) {
    envs::VecEnv env(env_for(type), 4, 1);
    Agent agent(small_config(type), env, 3);
    for (int k = 0; k < 3; ++k) {
      const IterationStats s = agent.train_iteration();
      EXPECT_EQ(s.samples, 32L * (k + 1)) << to_string(type);
      EXPECT_TRUE(std::isfinite(s.policy_loss)) << to_string(type);
      EXPECT_TRUE(std::isfinite(s.value_loss)) << to_string(type);
      EXPECT_EQ(std::isfinite(s.disc_loss), type == AgentType::amp || type == AgentType::add) << to_string(type);
    }
    EXPECT_TRUE(agent.model().params().allFinite());
  }
}

TEST(Agent, AddRewardPrefersZeroDelta) {
  envs::VecEnv env(env_for(AgentType::add), 2, 1);
  Agent agent(small_config(AgentType::add), env, 1);
  const Eigen::VectorXd r = agent.add_reward(Eigen::MatrixXd::Zero(env.add_delta_dim(), 1));
  EXPECT_TRUE(std::isfinite(r[0]));
  EXPECT_GE(r[0], 0.0);
}

TEST(Checkpoint, RoundTripAndContinuation) {
  const auto dir = std::filesystem::temp_directory_path() / "imitate_test_learning";
  std::filesystem::create_directories(dir);
  const auto path = dir / "ckpt.json";
  const AgentConfig cfg = small_config(AgentType::ppo);

  envs::VecEnv env_a(env_for(AgentType::ppo), 3, 5);
  Agent a(cfg, env_a, 9);
  for (int k = 0; k < 2; ++k) a.train_iteration();
  save_checkpoint(path, {a.state()});
  const IterationStats next_a = a.train_iteration();

  envs::VecEnv env_b(env_for(AgentType::ppo), 3, 77);
  Agent b(cfg, env_b, 1234);
  b.load_state(load_checkpoint(path).at(0));
  EXPECT_EQ(b.iteration(), 2);
  const IterationStats next_b = b.train_iteration();
  EXPECT_EQ(a.model().params(), b.model().params());
  EXPECT_EQ(next_a.policy_loss, next_b.policy_loss);
  EXPECT_EQ(a.state().dump(), b.state().dump());
}

TEST(Checkpoint, WrongArchitectureAndBadFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "imitate_test_learning";
  std::filesystem::create_directories(dir);
  envs::VecEnv env(env_for(AgentType::ppo), 2, 5);
  Agent a(small_config(AgentType::ppo), env, 1);
  AgentConfig wide = small_config(AgentType::ppo);
  wide.model.actor_hidden = {32};
  Agent b(wide, env, 1);
  try {
    b.load_policy(a.state());
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("architecture"), std::string::npos);
  }
  EXPECT_THROW(load_checkpoint(dir / "missing.json"), FormatError);
  {
    std::ofstream(dir / "garbage.json") << "{not json";
  }
  EXPECT_THROW(load_checkpoint(dir / "garbage.json"), FormatError);
  {
    std::ofstream(dir / "future.json") << R"({"format":"imitate-checkpoint","version":99,"workers":[{}]})";
  }
  EXPECT_THROW(load_checkpoint(dir / "future.json"), FormatError);
}

TEST(Agent, TwoWorkerReplicasStayIdentical) {
  Communicator comm(2);
  std::vector<std::unique_ptr<envs::VecEnv>> envs;
  std::vector<std::unique_ptr<Agent>> agents;
  for (int r = 0; r < 2; ++r) envs.push_back(std::make_unique<envs::VecEnv>(env_for(AgentType::amp), 3, 100 + r));
  for (int r = 0; r < 2; ++r)
    agents.push_back(std::make_unique<Agent>(small_config(AgentType::amp), *envs[r], 5, &comm, r));
  std::vector<std::thread> threads;
  for (int r = 0; r < 2; ++r) {
    threads.emplace_back([&, r] {
      for (int k = 0; k < 4; ++k) agents[r]->train_iteration();
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(agents[0]->model().params(), agents[1]->model().params());
  EXPECT_EQ(agents[0]->obs_normalizer(), agents[1]->obs_normalizer());
  EXPECT_EQ(agents[0]->disc_normalizer(), agents[1]->disc_normalizer());
}

}  // namespace
}  // namespace imitate::learning
