#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "imitate/envs/vec_env.hpp"

namespace imitate::eval {

/// Maps a batch of raw observations (obs_dim x B) to actions.
using PolicyFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

/// How per-step errors are pooled within one model's evaluation.
enum class Weighting {
  episode,  // mean over steps per episode, then mean over episodes
  step,     // mean over the concatenated step stream
};

/// Errors are NaN for tasks without a reference.
struct EpisodeErrors {
  double e_pos = 0.0;  // mean over the episode's steps
  double e_vel = 0.0;
  double ret = 0.0;  // undiscounted episode return
  int steps = 0;     // steps with a finite error
  int length = 0;
};

/// One trained model (one seed).
struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeErrors> episodes;
  double e_pos_mean = 0.0, e_pos_std = 0.0;
  double e_vel_mean = 0.0, e_vel_std = 0.0;
  double return_mean = 0.0;
};

/// Called after every env step with the step's result.
using StepHook = std::function<void(const envs::VecEnv&, const envs::StepResult&)>;

/// Runs `episodes` complete episodes with `policy` and pools
/// the per-step errors. Envs are reset first; steps on failed states carry no
/// error. Episodes are assigned to envs before they start, so short episodes are
/// not over-represented.
SeedResult run_episodes(envs::VecEnv& env, const PolicyFn& policy, int episodes, Weighting weighting,
                        std::uint64_t seed = 0, const StepHook& hook = {});

struct EvalRow {
  std::string motion;
  std::string method;
  std::string seed;  // seed value, or "all" for the cross-seed summary
  int episodes = 0;
  double e_pos_mean = 0.0, e_pos_std = 0.0;
  double e_vel_mean = 0.0, e_vel_std = 0.0;
};

/// Per-seed rows (std over episodes) followed by a summary row holding the
/// mean and population std over seeds of the per-seed means.
struct EvalReport {
  std::vector<EvalRow> rows;
  double wall_seconds = 0.0;

  const EvalRow& summary() const { return rows.back(); }
  std::string csv() const;
  std::string table() const;
};

EvalReport make_report(const std::string& motion, const std::string& method, const std::vector<SeedResult>& seeds,
                       double wall_seconds = 0.0);

}  // namespace imitate::eval
