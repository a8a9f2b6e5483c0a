#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "imitate/envs/vec_env.hpp"
#include "imitate/eval/evaluate.hpp"
#include "imitate/eval/metrics.hpp"
#include "imitate/kinematics/forward_kinematics.hpp"
#include "support/oracles.hpp"

namespace imitate::eval {
namespace {

const std::string kData = IMITATE_DATA_DIR;

std::vector<Vec3> random_points(std::mt19937_64& g, int n) {
  std::normal_distribution<double> d;
  std::vector<Vec3> out;
  for (int k = 0; k < n; ++k) out.emplace_back(d(g), d(g), d(g));
  return out;
}

double e_pos_of(const std::vector<Vec3>& sim, const std::vector<Vec3>& ref) {
  return e_pos(std::vector<Vec3>(sim.begin() + 1, sim.end()), sim[0], std::vector<Vec3>(ref.begin() + 1, ref.end()),
               ref[0]);
}

TEST(EPos, IdenticalIsZeroAndShiftIsOneOverNPlusOne) {
  std::mt19937_64 g(1);
  const auto ref = random_points(g, 9);
  EXPECT_EQ(e_pos_of(ref, ref), 0.0);
  auto shifted = ref;
  for (auto& p : shifted) p += Vec3(0.0, 0.0, 1.0);
  EXPECT_NEAR(e_pos_of(shifted, ref), 1.0 / 9.0, 1e-15);
}

TEST(EPos, MatchesDefinitionOnRandomInputs) {
  std::mt19937_64 g(2);
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_points(g, 12), b = random_points(g, 12);
    EXPECT_NEAR(e_pos_of(a, b), oracle::e_pos(a, b), 1e-12);
  }
}

TEST(EPos, InvariantToCommonRigidMotion) {
  std::mt19937_64 g(3);
  const auto a = random_points(g, 6), b = random_points(g, 6);
  const kin::Mat3 R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  auto ra = a, rb = b;
  for (auto& p : ra) p = R * p + Vec3(4, 5, 6);
  for (auto& p : rb) p = R * p + Vec3(4, 5, 6);
  EXPECT_NEAR(e_pos_of(ra, rb), e_pos_of(a, b), 1e-12);
}

TEST(EPos, PoseLevelRootOffset) {
  const kin::CharacterModel ch = kin::CharacterModel::load(kData + "/characters/humanoid.json");
  kin::Pose ref = kin::default_pose(ch);
  ref.dofs.setConstant(0.2);
  kin::Pose sim = ref;
  sim.root_pos += Vec3(0.3, -0.4, 0.0);
  const int n = ch.num_joints() - 1;
  EXPECT_NEAR(e_pos(ch, sim, ref), 0.5 / (n + 1), 1e-12);
  // a joint-only error never exceeds the sum of its displacement terms
  kin::Pose bent = ref;
  bent.dofs[0] += 0.3;
  EXPECT_GT(e_pos(ch, bent, ref), 0.0);
}

TEST(EVel, Definition) {
  const kin::CharacterModel ch = kin::CharacterModel::load(kData + "/characters/chain3.json");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(3), b(3);
  b << 1.0, -2.0, 0.5;
  // 3 revolute joints plus the tip: N = 4 non-root joints
  EXPECT_NEAR(e_vel(ch.layout(), a, b), 3.5 / 5.0, 1e-12);
  EXPECT_EQ(e_vel(ch.layout(), b, b), 0.0);
}

envs::EnvConfig kinematic_env() { return envs::EnvConfig::load(kData + "/envs/deepmimic_chain3_kinematic_env.yaml"); }

PolicyFn zero_policy(int dim) {
  return [dim](const Eigen::MatrixXd& obs) { return Eigen::MatrixXd::Zero(dim, obs.cols()); };
}

TEST(RunEpisodes, PlaybackHasZeroError) {
  envs::VecEnv env(kinematic_env(), 3, 1);
  const SeedResult r = run_episodes(env, zero_policy(3), 5, Weighting::episode);
  ASSERT_EQ(r.episodes.size(), 5u);
  EXPECT_LE(r.e_pos_mean, 1e-12);
  EXPECT_EQ(r.e_pos_std, 0.0);
  for (const auto& ep : r.episodes) EXPECT_EQ(ep.length, 60);
}

TEST(RunEpisodes, ConstantOffsetPolicyGivesConstantErrorInBothWeightings) {
  envs::VecEnv env(kinematic_env(), 2, 1);
  const PolicyFn offset = [](const Eigen::MatrixXd& obs) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, obs.cols());
    a.row(0).setConstant(0.1);
    return a;
  };
  const SeedResult ep = run_episodes(env, offset, 4, Weighting::episode);
  const SeedResult st = run_episodes(env, offset, 4, Weighting::step);
  EXPECT_GT(ep.e_pos_mean, 0.0);
  EXPECT_NEAR(ep.e_pos_mean, st.e_pos_mean, 1e-9);
}

TEST(RunEpisodes, HookSeesEveryStep) {
  envs::VecEnv env(kinematic_env(), 2, 1);
  int calls = 0;
  run_episodes(env, zero_policy(3), 2, Weighting::episode, 0,
               [&](const envs::VecEnv&, const envs::StepResult& r) { calls += static_cast<int>(r.reward.size()) > 0; });
  EXPECT_EQ(calls, 60);
}

SeedResult fake_seed(std::uint64_t s, double e) {
  SeedResult r;
  r.seed = s;
  r.episodes.resize(3);
  r.e_pos_mean = e;
  r.e_vel_mean = 2 * e;
  return r;
}

TEST(Report, IdenticalSeedsHaveZeroSpread) {
  const EvalReport rep = make_report("m", "ppo", {fake_seed(1, 0.02), fake_seed(2, 0.02), fake_seed(3, 0.02)});
  EXPECT_EQ(rep.summary().seed, "all");
  EXPECT_DOUBLE_EQ(rep.summary().e_pos_mean, 0.02);
  EXPECT_EQ(rep.summary().e_pos_std, 0.0);
}

TEST(Report, SummaryIsPopulationStdOverSeeds) {
  const EvalReport rep = make_report("m", "ppo", {fake_seed(1, 1.0), fake_seed(2, 3.0)});
  EXPECT_DOUBLE_EQ(rep.summary().e_pos_mean, 2.0);
  EXPECT_DOUBLE_EQ(rep.summary().e_pos_std, 1.0);
  EXPECT_EQ(rep.rows.size(), 3u);
}

TEST(Report, CsvHeaderAndRows) {
  const EvalReport rep = make_report("chain", "add", {fake_seed(7, 0.5)});
  const std::string csv = rep.csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "motion,method,seed,episodes,e_pos_mean,e_pos_std,e_vel_mean,e_vel_std");
  EXPECT_NE(csv.find("chain,add,7,3,"), std::string::npos);
  EXPECT_NE(rep.table().find("e_pos"), std::string::npos);
}

}  // namespace
}  // namespace imitate::eval
