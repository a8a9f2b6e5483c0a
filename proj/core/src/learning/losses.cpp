#include "imitate/learning/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "imitate/util/error.hpp"

namespace imitate::learning {
namespace {

void check_grad(const PolicyModel& model, const Eigen::VectorXd& grad) {
  if (grad.size() != model.num_params()) throw ContractError("gradient vector does not match the parameter layout");
}

/// Backpropagates dL/dlogp (per sample) into actor and log-std gradients.
void add_log_prob_grad(const PolicyModel& model, const Mlp::Cache& cache, const Eigen::MatrixXd& mean,
                       const Eigen::MatrixXd& actions, const Eigen::VectorXd& dlogp, Eigen::VectorXd& grad) {
  const Eigen::VectorXd log_std = model.log_std();
  const Eigen::ArrayXd inv_var = (-2.0 * log_std.array()).exp();
  const Eigen::MatrixXd diff = actions - mean;
  Eigen::MatrixXd dmean = (diff.array().colwise() * inv_var).matrix();
  dmean = dmean * dlogp.asDiagonal();
  model.actor().backward(model.actor_params(), cache, dmean, grad.data() + model.actor_segment().offset);
  // d logp / d log_std_k = z_k^2 - 1
  const Eigen::ArrayXXd z2 = diff.array().square().colwise() * inv_var;
  grad.segment(model.log_std_segment().offset, model.log_std_segment().size) +=
      ((z2 - 1.0).matrix() * dlogp);
}

double add_value_loss(const PolicyModel& model, const PolicyBatch& batch, double coef, Eigen::VectorXd& grad) {
  const Eigen::Index B = batch.x.cols();
  Mlp::Cache cache;
  const Eigen::MatrixXd v = model.critic().forward(model.critic_params(), batch.x, &cache);
  const Eigen::RowVectorXd err = v.row(0) - batch.returns.transpose();
  const double loss = err.squaredNorm() / static_cast<double>(B);
  const Eigen::MatrixXd dv = (2.0 * coef / static_cast<double>(B)) * err;
  model.critic().backward(model.critic_params(), cache, dv, grad.data() + model.critic_segment().offset);
  return loss;
}

double entropy_of(const Eigen::VectorXd& log_std) {
  return log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

}  // namespace

LossStats ppo_loss(const PolicyModel& model, const PolicyBatch& b, const PpoParams& p, Eigen::VectorXd& grad) {
  check_grad(model, grad);
  const Eigen::Index B = b.x.cols();
  if (B == 0) throw ContractError("ppo_loss: empty batch");
  Mlp::Cache cache;
  const Eigen::MatrixXd mean = model.actor().forward(model.actor_params(), b.x, &cache);
  const Eigen::VectorXd logp = gaussian_log_prob(mean, model.log_std(), b.actions);

  LossStats s;
  Eigen::VectorXd dlogp(B);
  double obj_sum = 0.0, clipped = 0.0, kl = 0.0;
  for (Eigen::Index i = 0; i < B; ++i) {
    const double log_ratio = logp[i] - b.old_log_prob[i];
    const double ratio = std::exp(log_ratio);
    const double a = b.advantages[i];
    const double clipped_ratio = std::clamp(ratio, 1.0 - p.clip, 1.0 + p.clip);
    const double unclipped_obj = ratio * a;
    const double clipped_obj = clipped_ratio * a;
    const bool use_unclipped = unclipped_obj <= clipped_obj;
    obj_sum += use_unclipped ? unclipped_obj : clipped_obj;
    dlogp[i] = use_unclipped ? -unclipped_obj / static_cast<double>(B) : 0.0;
    clipped += std::abs(ratio - 1.0) > p.clip ? 1.0 : 0.0;
    kl += (ratio - 1.0) - log_ratio;
  }
  s.policy = -obj_sum / static_cast<double>(B);
  s.clip_fraction = clipped / static_cast<double>(B);
  s.approx_kl = kl / static_cast<double>(B);
  add_log_prob_grad(model, cache, mean, b.actions, dlogp, grad);

  s.entropy = entropy_of(model.log_std());
  if (p.entropy_coef != 0.0) {
    grad.segment(model.log_std_segment().offset, model.log_std_segment().size).array() -= p.entropy_coef;
  }
  s.value = add_value_loss(model, b, p.value_coef, grad);
  s.total = s.policy + p.value_coef * s.value - p.entropy_coef * s.entropy;
  return s;
}

LossStats awr_loss(const PolicyModel& model, const PolicyBatch& b, double value_coef, Eigen::VectorXd& grad) {
  check_grad(model, grad);
  const Eigen::Index B = b.x.cols();
  if (B == 0) throw ContractError("awr_loss: empty batch");
  Mlp::Cache cache;
  const Eigen::MatrixXd mean = model.actor().forward(model.actor_params(), b.x, &cache);
  const Eigen::VectorXd logp = gaussian_log_prob(mean, model.log_std(), b.actions);
  LossStats s;
  s.policy = -b.weights.dot(logp) / static_cast<double>(B);
  const Eigen::VectorXd dlogp = -b.weights / static_cast<double>(B);
  add_log_prob_grad(model, cache, mean, b.actions, dlogp, grad);
  s.entropy = entropy_of(model.log_std());
  s.value = add_value_loss(model, b, value_coef, grad);
  s.total = s.policy + value_coef * s.value;
  return s;
}

Eigen::VectorXd awr_weights(const Eigen::VectorXd& advantages, double beta, double max_weight) {
  return (advantages.array() / beta).exp().min(max_weight).matrix();
}

DiscStats disc_loss(const PolicyModel& model, const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake, double gp_coef,
                    Eigen::VectorXd& grad) {
  check_grad(model, grad);
  if (!model.has_disc()) throw ContractError("disc_loss: model has no discriminator");
  if (real.cols() == 0 || fake.cols() == 0) throw ContractError("disc_loss: empty batch");
  const Mlp& disc = model.disc();
  double* g = grad.data() + model.disc_segment().offset;
  DiscStats s;

  Mlp::Cache real_cache, fake_cache;
  const Eigen::MatrixXd d_real = disc.forward(model.disc_params(), real, &real_cache);
  const Eigen::MatrixXd d_fake = disc.forward(model.disc_params(), fake, &fake_cache);
  const double nr = static_cast<double>(real.cols());
  const double nf = static_cast<double>(fake.cols());
  s.real_loss = (d_real.array() - 1.0).square().sum() / nr;
  s.fake_loss = (d_fake.array() + 1.0).square().sum() / nf;
  s.real_mean = d_real.mean();
  s.fake_mean = d_fake.mean();
  disc.backward(model.disc_params(), real_cache, (2.0 / nr) * (d_real.array() - 1.0).matrix(), g);
  disc.backward(model.disc_params(), fake_cache, (2.0 / nf) * (d_fake.array() + 1.0).matrix(), g);
  s.grad_penalty = gp_coef != 0.0 ? disc.gradient_penalty(model.disc_params(), real, gp_coef, g) : 0.0;
  s.total = s.real_loss + s.fake_loss + gp_coef * s.grad_penalty;
  return s;
}

double style_reward(double d) { return std::max(0.0, 1.0 - 0.25 * (d - 1.0) * (d - 1.0)); }

}  // namespace imitate::learning
