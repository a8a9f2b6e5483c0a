#pragma once
// Reference computations shared by the unit tests and the acceptance binary.
// Each is written from the defining formula, not from the library routine it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "imitate/envs/env_config.hpp"
#include "imitate/kinematics/character.hpp"
#include "imitate/kinematics/pose.hpp"
#include "imitate/learning/losses.hpp"
#include "imitate/learning/model.hpp"
#include "imitate/learning/returns.hpp"
#include "imitate/util/rng.hpp"

namespace imitate::oracle {

using envs::DoneFlag;

// A_t = sum_l (gamma lambda)^l delta_{t+l}, summed explicitly up to the end of the episode.
inline learning::ReturnsAdvantages gae(const Eigen::VectorXd& r, const Eigen::VectorXd& v,
                                       const std::vector<DoneFlag>& done, const Eigen::VectorXd& boot,
                                       const learning::ReturnParams& p) {
  const int T = static_cast<int>(r.size());
  const auto next_value = [&](int t) {
    switch (done[t]) {
      case DoneFlag::fail: return p.fail_value;
      case DoneFlag::succ: return p.succ_value;
      case DoneFlag::time: return boot[t];
      case DoneFlag::null: return t == T - 1 ? boot[t] : v[t + 1];
    }
    return 0.0;
  };
  learning::ReturnsAdvantages out{Eigen::VectorXd(T), Eigen::VectorXd(T)};
  for (int t = 0; t < T; ++t) {
    double a = 0.0, w = 1.0;
    for (int u = t; u < T; ++u) {
      a += w * (r[u] + p.discount * next_value(u) - v[u]);
      if (done[u] != DoneFlag::null) break;
      w *= p.discount * p.lambda;
    }
    out.advantages[t] = a;
    out.returns[t] = a + v[t];
  }
  return out;
}

struct GaeCase {
  Eigen::VectorXd r, v, boot;
  std::vector<DoneFlag> done;
  learning::ReturnParams params;
};

inline GaeCase random_gae_case(Rng& rng) {
  GaeCase c;
  const int T = rng.integer(1, 64);
  c.r.resize(T);
  c.v.resize(T);
  c.boot.resize(T);
  c.done.resize(T);
  for (int t = 0; t < T; ++t) {
    c.r[t] = rng.normal();
    c.v[t] = rng.normal();
    c.boot[t] = rng.normal();
    const double u = rng.uniform();
    c.done[t] = u < 0.05 ? DoneFlag::fail : u < 0.08 ? DoneFlag::succ : u < 0.12 ? DoneFlag::time : DoneFlag::null;
  }
  c.params.discount = rng.uniform(0.5, 0.999);
  c.params.lambda = rng.uniform(0.0, 1.0);
  c.params.fail_value = rng.normal();
  c.params.succ_value = rng.normal();
  return c;
}

// |g - fd| / max(|g|, |fd|, 1e-12) over the whole vector, central differences.
inline double gradient_rel_error(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& analytic, double h = 1e-6) {
  Eigen::VectorXd fd(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    xp[k] = x[k] + h;
    const double fp = f(xp);
    xp[k] = x[k] - h;
    const double fm = f(xp);
    xp[k] = x[k];
    fd[k] = (fp - fm) / (2 * h);
  }
  return (analytic - fd).norm() / std::max({analytic.norm(), fd.norm(), 1e-12});
}

// 2-4-2 policy with a 2-input discriminator.
inline learning::PolicyModel tiny_model(Rng& rng, learning::Activation act = learning::Activation::tanh) {
  learning::ModelConfig mc;
  mc.actor_hidden = {4};
  mc.critic_hidden = {4};
  mc.disc_hidden = {4};
  mc.activation = act;
  mc.actor_output_scale = 1.0;
  mc.init_action_std = 0.5;
  learning::PolicyModel m(2, 2, 2, mc);
  m.init(rng);
  for (Eigen::Index k = 0; k < m.params().size(); ++k) m.params()[k] += 0.3 * rng.normal();
  return m;
}

inline learning::PolicyBatch random_batch(const learning::PolicyModel& m, Rng& rng, int n) {
  learning::PolicyBatch b;
  b.x.resize(2, n);
  b.actions.resize(2, n);
  b.advantages.resize(n);
  b.weights.resize(n);
  b.returns.resize(n);
  for (int c = 0; c < n; ++c) {
    b.x.col(c) << rng.normal(), rng.normal();
    b.advantages[c] = rng.normal();
    b.weights[c] = rng.uniform(0.1, 3.0);
    b.returns[c] = rng.normal();
  }
  const Eigen::MatrixXd mean = m.action_mean(b.x);
  for (int c = 0; c < n; ++c) b.actions.col(c) = mean.col(c) + 0.5 * Eigen::Vector2d(rng.normal(), rng.normal());
  // old log-probs near the current ones so both clipped and unclipped samples occur
  b.old_log_prob = learning::gaussian_log_prob(mean, m.log_std(), b.actions);
  for (int c = 0; c < n; ++c) b.old_log_prob[c] += 0.3 * rng.normal();
  return b;
}

enum class GradCase { ppo, awr, amp_disc, add_disc };

// Relative error of the analytic loss gradient against central differences.
inline double loss_gradient_error(GradCase which, std::uint64_t seed) {
  Rng rng(seed);
  learning::PolicyModel m = tiny_model(rng);
  const learning::PolicyBatch b = random_batch(m, rng, 16);
  Eigen::MatrixXd real = Eigen::MatrixXd::Zero(2, 12), fake(2, 12);
  for (int c = 0; c < 12; ++c) {
    if (which == GradCase::amp_disc) real.col(c) << rng.normal(), rng.normal();
    fake.col(c) << rng.normal(), rng.normal();
  }
  const learning::PpoParams pp{0.2, 0.5, 0.01};
  const auto loss = [&](learning::PolicyModel& mm, Eigen::VectorXd& g) {
    switch (which) {
      case GradCase::ppo: return learning::ppo_loss(mm, b, pp, g).total;
      case GradCase::awr: return learning::awr_loss(mm, b, 0.5, g).total;
      default: return learning::disc_loss(mm, real, fake, 5.0, g).total;
    }
  };
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m.num_params());
  loss(m, g);
  learning::PolicyModel probe = m;
  const auto f = [&](const Eigen::VectorXd& p) {
    probe.params() = p;
    Eigen::VectorXd scratch = Eigen::VectorXd::Zero(p.size());
    return loss(probe, scratch);
  };
  return gradient_rel_error(f, m.params(), g);
}

// e_pos straight from the definition on world joint positions (index 0 is the root).
inline double e_pos(const std::vector<kin::Vec3>& sim, const std::vector<kin::Vec3>& ref) {
  const std::size_t n = sim.size() - 1;
  double s = (ref[0] - sim[0]).norm();
  for (std::size_t j = 1; j < sim.size(); ++j) s += ((ref[j] - ref[0]) - (sim[j] - sim[0])).norm();
  return s / static_cast<double>(n + 1);
}

}  // namespace imitate::oracle
