#pragma once

#include <vector>

#include <Eigen/Core>

#include "imitate/envs/env_config.hpp"

namespace imitate::learning {

struct ReturnParams {
  double discount = 0.99;
  double lambda = 0.95;
  double fail_value = 0.0;  // terminal value after FAIL
  double succ_value = 0.0;  // terminal value after SUCC
};

struct ReturnsAdvantages {
  Eigen::VectorXd returns;
  Eigen::VectorXd advantages;
};

/// GAE(lambda) for one env's step sequence.
///
/// values[t] = V(s_t). bootstrap[t] = V(s_{t+1}) must be given wherever
/// dones[t] == TIME and at the last step when it is NULL (truncated batch);
/// other entries are ignored. The value after step t is the FAIL/SUCC terminal
/// value, the bootstrap for TIME and truncation, and values[t+1] otherwise.
ReturnsAdvantages compute_returns_advantages(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                                             const std::vector<envs::DoneFlag>& dones, const Eigen::VectorXd& bootstrap,
                                             const ReturnParams& params);

/// Zero mean, unit std (population, +1e-8).
Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& adv);

}  // namespace imitate::learning
