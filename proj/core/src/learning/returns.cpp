#include "imitate/learning/returns.hpp"

#include <cmath>

#include "imitate/util/error.hpp"

namespace imitate::learning {

ReturnsAdvantages compute_returns_advantages(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                                             const std::vector<envs::DoneFlag>& dones, const Eigen::VectorXd& bootstrap,
                                             const ReturnParams& p) {
  const Eigen::Index T = rewards.size();
  if (values.size() != T || bootstrap.size() != T || static_cast<Eigen::Index>(dones.size()) != T) {
    throw ContractError("compute_returns_advantages: misaligned inputs");
  }
  ReturnsAdvantages out{Eigen::VectorXd(T), Eigen::VectorXd(T)};
  double next_adv = 0.0;
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    double next_value = 0.0;
    bool continues = false;
    switch (dones[t]) {
      case envs::DoneFlag::fail:
        next_value = p.fail_value;
        break;
      case envs::DoneFlag::succ:
        next_value = p.succ_value;
        break;
      case envs::DoneFlag::time:
        if (!std::isfinite(bootstrap[t])) throw ContractError("missing bootstrap value at a TIME boundary");
        next_value = bootstrap[t];
        break;
      case envs::DoneFlag::null:
        if (t == T - 1) {
          if (!std::isfinite(bootstrap[t])) throw ContractError("missing bootstrap value at batch end");
          next_value = bootstrap[t];
        } else {
          next_value = values[t + 1];
          continues = true;
        }
        break;
    }
    const double delta = rewards[t] + p.discount * next_value - values[t];
    const double adv = delta + (continues ? p.discount * p.lambda * next_adv : 0.0);
    out.advantages[t] = adv;
    out.returns[t] = adv + values[t];
    next_adv = adv;
  }
  return out;
}

Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& adv) {
  if (adv.size() == 0) return adv;
  const double mean = adv.mean();
  const double var = (adv.array() - mean).square().mean();
  return (adv.array() - mean) / (std::sqrt(var) + 1e-8);
}

}  // namespace imitate::learning
