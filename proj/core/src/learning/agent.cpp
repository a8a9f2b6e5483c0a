#include "imitate/learning/agent.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "imitate/learning/losses.hpp"
#include "imitate/learning/returns.hpp"
#include "imitate/util/error.hpp"

namespace imitate::learning {

namespace {

constexpr int kStateVersion = 1;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

int disc_dim_for(const AgentConfig& c, const envs::VecEnv& env) {
  if (c.type == AgentType::amp) {
    if (!env.has_disc_obs()) throw ConfigError("amp agent needs an environment with discriminator observations");
    return env.disc_obs_dim();
  }
  if (c.type == AgentType::add) {
    if (env.add_delta_dim() == 0) throw ConfigError("add agent needs the 'add' task");
    return env.add_delta_dim();
  }
  return 0;
}

nlohmann::json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json mat_json(const Eigen::MatrixXd& m, int cols) {
  return {{"rows", m.rows()},
          {"cols", cols},
          {"data", std::vector<double>(m.data(), m.data() + m.rows() * static_cast<Eigen::Index>(cols))}};
}

void json_mat(const nlohmann::json& j, Eigen::MatrixXd& m) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows != m.rows() || cols > m.cols() || static_cast<long>(data.size()) != static_cast<long>(rows) * cols) {
    throw FormatError("checkpoint replay buffer has the wrong shape");
  }
  m.leftCols(cols) = Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(idx[k]);
  return out;
}

void shuffle(std::vector<int>& v, Rng& rng) {
  for (int k = static_cast<int>(v.size()) - 1; k > 0; --k) std::swap(v[k], v[rng.integer(0, k)]);
}

std::string describe(const char* what, const LossStats& s) {
  std::ostringstream os;
  os << what << " produced a non-finite loss (total=" << s.total << " policy=" << s.policy << " value=" << s.value
     << " kl=" << s.approx_kl << ")";
  return os.str();
}

}  // namespace

Agent::Agent(AgentConfig config, envs::VecEnv& env, std::uint64_t seed, Communicator* comm, int rank)
    : config_(std::move(config)),
      env_(env),
      comm_(comm),
      rank_(rank),
      num_envs_(env.num_envs()),
      model_(env.obs_dim(), env.action_dim(), disc_dim_for(config_, env), config_.model),
      rng_(derive_seed(seed, static_cast<std::uint64_t>(rank) + 1)) {
  if (comm_ && (rank < 0 || rank >= comm_->size())) throw InvalidArgument("agent rank outside the communicator");
  // Every rank draws the same initial weights.
  Rng init_rng(derive_seed(seed, 0x30DE1));
  model_.init(init_rng);

  const Segment pol = model_.policy_segment();
  Eigen::VectorXd lr = Eigen::VectorXd::Constant(pol.size, config_.policy_lr);
  lr.segment(model_.critic_segment().offset, model_.critic_segment().size).setConstant(config_.value_lr);
  policy_opt_ = Adam(pol.offset, lr);
  if (model_.has_disc()) {
    disc_opt_ = Adam(model_.disc_segment().offset, Eigen::VectorXd::Constant(model_.disc_segment().size, config_.disc_lr));
    disc_norm_ = RunningNormalizer(model_.disc_dim(), config_.normalizer_clip);
  }
  obs_norm_ = RunningNormalizer(env.obs_dim(), config_.normalizer_clip);
  ep_return_.assign(num_envs_, 0.0);
  ep_length_.assign(num_envs_, 0);
  if (config_.type == AgentType::awr) {
    replay_.obs = Eigen::MatrixXd::Zero(env.obs_dim(), config_.replay_size);
    replay_.actions = Eigen::MatrixXd::Zero(env.action_dim(), config_.replay_size);
    replay_.returns = Eigen::VectorXd::Zero(config_.replay_size);
  }
  env_.reset();
}

Eigen::MatrixXd Agent::act(const Eigen::Ref<const Eigen::MatrixXd>& obs, bool deterministic) {
  const Eigen::MatrixXd x = config_.normalize_obs ? obs_norm_.normalize(obs) : Eigen::MatrixXd(obs);
  Eigen::MatrixXd a = model_.action_mean(x);
  if (!deterministic) {
    const Eigen::VectorXd std = model_.log_std().array().exp();
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      for (Eigen::Index d = 0; d < a.rows(); ++d) a(d, c) += std(d) * rng_.normal();
  }
  return a;
}

Eigen::VectorXd Agent::reduce(const Eigen::VectorXd& grad) {
  return comm_ ? comm_->allreduce_mean(rank_, grad) : grad;
}

void Agent::collect(Rollout& ro, IterationStats& st) {
  const int T = config_.steps_per_env;
  const int M = T * num_envs_;
  const int ddim = model_.disc_dim();
  ro.obs.resize(env_.obs_dim(), M);
  ro.x.resize(env_.obs_dim(), M);
  ro.actions.resize(env_.action_dim(), M);
  ro.disc.resize(ddim, M);
  ro.log_prob.resize(M);
  ro.values.resize(M);
  ro.rewards.resize(M);
  ro.task_rewards.resize(M);
  ro.bootstrap = Eigen::VectorXd::Zero(M);
  ro.dones.assign(M, envs::DoneFlag::null);

  const char* disc_key = config_.type == AgentType::amp ? "disc_obs" : "add_delta";
  double ret_sum = 0.0, len_sum = 0.0, ep_sum = 0.0, ev_sum = 0.0;
  int ep_n = 0, ev_n = 0;
  st.episodes = 0;
  for (int t = 0; t < T; ++t) {
    const Eigen::MatrixXd obs = env_.reset_done();
    const Eigen::MatrixXd x = config_.normalize_obs ? obs_norm_.normalize(obs) : obs;
    const Eigen::MatrixXd mean = model_.action_mean(x);
    const Eigen::VectorXd log_std = model_.log_std();
    const Eigen::VectorXd std = log_std.array().exp();
    Eigen::MatrixXd a = mean;
    for (int i = 0; i < num_envs_; ++i)
      for (Eigen::Index d = 0; d < a.rows(); ++d) a(d, i) += std(d) * rng_.normal();
    const Eigen::VectorXd lp = gaussian_log_prob(mean, log_std, a);
    const Eigen::VectorXd v = model_.value(x);

    const envs::StepResult res = env_.step(a);

    bool need_next = false;
    for (int i = 0; i < num_envs_; ++i) {
      need_next = need_next || res.done[i] == envs::DoneFlag::time ||
                  (t == T - 1 && res.done[i] == envs::DoneFlag::null);
    }
    Eigen::VectorXd v_next;
    if (need_next) v_next = model_.value(config_.normalize_obs ? obs_norm_.normalize(res.obs) : res.obs);

    const auto e_pos = res.info.find("e_pos");
    const auto e_vel = res.info.find("e_vel");
    for (int i = 0; i < num_envs_; ++i) {
      const int c = column(t, i);
      ro.obs.col(c) = obs.col(i);
      ro.x.col(c) = x.col(i);
      ro.actions.col(c) = a.col(i);
      ro.log_prob(c) = lp(i);
      ro.values(c) = v(i);
      ro.rewards(c) = res.reward(i);
      ro.task_rewards(c) = res.reward(i);
      ro.dones[c] = res.done[i];
      if (ddim > 0) ro.disc.col(c) = res.info.at(disc_key).col(i);
      if (res.done[i] == envs::DoneFlag::time || (t == T - 1 && res.done[i] == envs::DoneFlag::null)) {
        ro.bootstrap(c) = v_next(i);
      }
      if (e_pos != res.info.end() && std::isfinite(e_pos->second(0, i))) {
        ep_sum += e_pos->second(0, i);
        ++ep_n;
      }
      if (e_vel != res.info.end() && std::isfinite(e_vel->second(0, i))) {
        ev_sum += e_vel->second(0, i);
        ++ev_n;
      }
      ep_return_[i] += res.reward(i);
      ++ep_length_[i];
      if (res.done[i] != envs::DoneFlag::null) {
        ret_sum += ep_return_[i];
        len_sum += ep_length_[i];
        ++st.episodes;
        ep_return_[i] = 0.0;
        ep_length_[i] = 0;
      }
    }
  }
  samples_ += M;
  st.mean_return = st.episodes > 0 ? ret_sum / st.episodes : kNaN;
  st.mean_episode_length = st.episodes > 0 ? len_sum / st.episodes : kNaN;
  st.e_pos = ep_n > 0 ? ep_sum / ep_n : kNaN;
  st.e_vel = ev_n > 0 ? ev_sum / ev_n : kNaN;
  st.mean_task_reward = ro.task_rewards.mean();
}

Eigen::VectorXd Agent::discriminator_reward(const Eigen::MatrixXd& raw) const {
  Eigen::MatrixXd in = raw;
  std::vector<char> ok(raw.cols());
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    ok[c] = raw.col(c).allFinite();
    if (!ok[c]) in.col(c).setZero();
  }
  const Eigen::MatrixXd x = config_.normalize_disc_obs ? disc_norm_.normalize(in) : in;
  const Eigen::VectorXd d = model_.disc_score(x);
  Eigen::VectorXd r(raw.cols());
  for (Eigen::Index c = 0; c < raw.cols(); ++c) r(c) = ok[c] ? style_reward(d(c)) : 0.0;
  return r;
}

Eigen::VectorXd Agent::amp_reward(const Eigen::MatrixXd& disc_obs) const {
  if (config_.type != AgentType::amp) throw ContractError("amp_reward needs an amp agent");
  return discriminator_reward(disc_obs);
}

Eigen::VectorXd Agent::add_reward(const Eigen::MatrixXd& delta) const {
  if (config_.type != AgentType::add) throw ContractError("add_reward needs an add agent");
  return discriminator_reward(delta);
}

void Agent::relabel(Rollout& ro) const {
  if (!config_.adversarial()) return;
  const Eigen::VectorXd style = discriminator_reward(ro.disc);
  for (Eigen::Index c = 0; c < ro.rewards.size(); ++c) {
    // failed steps keep a zero reward
    const bool failed = !ro.disc.col(c).allFinite();
    ro.rewards(c) = failed ? 0.0 : config_.task_reward_weight * ro.task_rewards(c) + config_.style_reward_weight * style(c);
  }
}

void Agent::compute_returns(const Rollout& ro, Eigen::VectorXd& returns, Eigen::VectorXd& adv) const {
  const int T = config_.steps_per_env;
  returns.resize(T * num_envs_);
  adv.resize(T * num_envs_);
  Eigen::VectorXd r(T), v(T), b(T);
  std::vector<envs::DoneFlag> d(T);
  for (int i = 0; i < num_envs_; ++i) {
    for (int t = 0; t < T; ++t) {
      const int c = column(t, i);
      r(t) = ro.rewards(c);
      v(t) = ro.values(c);
      b(t) = ro.bootstrap(c);
      d[t] = ro.dones[c];
    }
    const ReturnsAdvantages ra = compute_returns_advantages(r, v, d, b, config_.returns);
    for (int t = 0; t < T; ++t) {
      returns(column(t, i)) = ra.returns(t);
      adv(column(t, i)) = ra.advantages(t);
    }
  }
}

void Agent::disc_step(const Eigen::MatrixXd& fake_raw, IterationStats& st, int& count) {
  std::vector<int> keep;
  for (Eigen::Index c = 0; c < fake_raw.cols() && static_cast<int>(keep.size()) < config_.disc_batch_size; ++c) {
    if (fake_raw.col(c).allFinite()) keep.push_back(static_cast<int>(c));
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(model_.num_params());
  if (!keep.empty()) {
    const int n = static_cast<int>(keep.size());
    const Eigen::MatrixXd fake = gather(fake_raw, keep);
    const Eigen::MatrixXd real = config_.type == AgentType::amp ? env_.sample_reference_disc_obs(n, rng_)
                                                                : Eigen::MatrixXd::Zero(fake.rows(), n);
    const auto norm = [&](const Eigen::MatrixXd& m) {
      return config_.normalize_disc_obs ? disc_norm_.normalize(m) : m;
    };
    const DiscStats ds = disc_loss(model_, norm(real), norm(fake), config_.gp_coef, grad);
    if (!std::isfinite(ds.total) || !grad.allFinite()) {
      std::ostringstream os;
      os << "discriminator update produced a non-finite loss (real=" << ds.real_loss << " fake=" << ds.fake_loss
         << " gp=" << ds.grad_penalty << ")";
      throw NumericalError(os.str());
    }
    st.disc_loss += ds.total;
    st.disc_real += ds.real_mean;
    st.disc_fake += ds.fake_mean;
    ++count;
  }
  // ranks without samples still take part in the reduction
  grad = reduce(grad);
  disc_opt_.step(model_.params(), grad);
}

void Agent::ppo_update(const Rollout& ro, const Eigen::VectorXd& returns, const Eigen::VectorXd& adv_in,
                       IterationStats& st) {
  const int M = static_cast<int>(returns.size());
  const Eigen::VectorXd adv = config_.normalize_advantages ? normalize_advantages(adv_in) : adv_in;
  const PpoParams pp{config_.clip, config_.value_coef, config_.entropy_coef};
  std::vector<int> perm(M);
  for (int k = 0; k < M; ++k) perm[k] = k;
  int n = 0, disc_n = 0;
  for (int e = 0; e < config_.epochs; ++e) {
    shuffle(perm, rng_);
    for (int b = 0; b < config_.minibatches; ++b) {
      const int lo = static_cast<int>(static_cast<long>(M) * b / config_.minibatches);
      const int hi = static_cast<int>(static_cast<long>(M) * (b + 1) / config_.minibatches);
      if (hi <= lo) continue;
      const std::vector<int> idx(perm.begin() + lo, perm.begin() + hi);
      PolicyBatch batch;
      batch.x = gather(ro.x, idx);
      batch.actions = gather(ro.actions, idx);
      batch.old_log_prob = gather(ro.log_prob, idx);
      batch.advantages = gather(adv, idx);
      batch.returns = gather(returns, idx);
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(model_.num_params());
      const LossStats ls = ppo_loss(model_, batch, pp, grad);
      if (!std::isfinite(ls.total) || !grad.allFinite()) throw NumericalError(describe("PPO update", ls));
      grad = reduce(grad);
      policy_opt_.step(model_.params(), grad);
      st.policy_loss += ls.policy;
      st.value_loss += ls.value;
      st.clip_fraction += ls.clip_fraction;
      st.approx_kl += ls.approx_kl;
      ++n;
      if (config_.adversarial()) disc_step(gather(ro.disc, idx), st, disc_n);
    }
  }
  if (n > 0) {
    st.policy_loss /= n;
    st.value_loss /= n;
    st.clip_fraction /= n;
    st.approx_kl /= n;
  }
  if (disc_n > 0) {
    st.disc_loss /= disc_n;
    st.disc_real /= disc_n;
    st.disc_fake /= disc_n;
  }
}

void Agent::push_replay(const Rollout& ro, const Eigen::VectorXd& returns) {
  const int cap = config_.replay_size;
  for (Eigen::Index c = 0; c < returns.size(); ++c) {
    replay_.obs.col(replay_.next) = ro.obs.col(c);
    replay_.actions.col(replay_.next) = ro.actions.col(c);
    replay_.returns(replay_.next) = returns(c);
    replay_.next = (replay_.next + 1) % cap;
    replay_.size = std::min(replay_.size + 1, cap);
  }
}

void Agent::awr_update(IterationStats& st) {
  const int B = std::min(config_.awr_batch_size, replay_.size);
  int n = 0;
  for (int s = 0; s < config_.awr_steps; ++s) {
    std::vector<int> idx(B);
    for (int k = 0; k < B; ++k) idx[k] = rng_.integer(0, replay_.size - 1);
    PolicyBatch batch;
    const Eigen::MatrixXd obs = gather(replay_.obs, idx);
    batch.x = config_.normalize_obs ? obs_norm_.normalize(obs) : obs;
    batch.actions = gather(replay_.actions, idx);
    batch.returns = gather(replay_.returns, idx);
    Eigen::VectorXd adv = batch.returns - model_.value(batch.x);
    if (config_.normalize_advantages) adv = normalize_advantages(adv);
    batch.weights = awr_weights(adv, config_.awr_beta, config_.awr_max_weight);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(model_.num_params());
    const LossStats ls = awr_loss(model_, batch, config_.value_coef, grad);
    if (!std::isfinite(ls.total) || !grad.allFinite()) throw NumericalError(describe("AWR update", ls));
    grad = reduce(grad);
    policy_opt_.step(model_.params(), grad);
    st.policy_loss += ls.policy;
    st.value_loss += ls.value;
    ++n;
  }
  if (n > 0) {
    st.policy_loss /= n;
    st.value_loss /= n;
  }
}

void Agent::sync_normalizer(RunningNormalizer& norm, const Eigen::MatrixXd& batch) {
  RunningNormalizer local(norm.dim(), norm.clip());
  if (batch.cols() > 0) local.update(batch);
  if (!comm_) {
    norm.merge(local);
    return;
  }
  for (const Eigen::VectorXd& packed : comm_->allgather(rank_, local.pack())) {
    norm.merge(RunningNormalizer::unpack(packed, norm.clip()));
  }
}

IterationStats Agent::train_iteration() {
  IterationStats st;
  Rollout ro;
  collect(ro, st);
  relabel(ro);
  st.mean_reward = ro.rewards.mean();

  Eigen::VectorXd returns, adv;
  compute_returns(ro, returns, adv);
  if (config_.type == AgentType::awr) {
    push_replay(ro, returns);
    awr_update(st);
  } else {
    ppo_update(ro, returns, adv, st);
  }

  if (config_.normalize_obs) sync_normalizer(obs_norm_, ro.obs);
  if (model_.has_disc() && config_.normalize_disc_obs) {
    std::vector<int> keep;
    for (Eigen::Index c = 0; c < ro.disc.cols(); ++c)
      if (ro.disc.col(c).allFinite()) keep.push_back(static_cast<int>(c));
    sync_normalizer(disc_norm_, gather(ro.disc, keep));
  }

  if (comm_) {
    // episode-weighted means across workers
    Eigen::VectorXd pack(13);
    const auto z = [](double v) { return std::isfinite(v) ? v : 0.0; };
    pack << st.episodes, z(st.mean_return) * st.episodes, z(st.mean_episode_length) * st.episodes, st.mean_reward,
        st.mean_task_reward, z(st.e_pos), std::isfinite(st.e_pos) ? 1.0 : 0.0, z(st.e_vel), st.policy_loss,
        st.value_loss, st.clip_fraction, st.approx_kl, st.disc_loss;
    const Eigen::VectorXd sum = comm_->allreduce_sum(rank_, pack);
    const double W = comm_->size();
    st.episodes = static_cast<int>(sum(0));
    st.mean_return = sum(0) > 0 ? sum(1) / sum(0) : kNaN;
    st.mean_episode_length = sum(0) > 0 ? sum(2) / sum(0) : kNaN;
    st.mean_reward = sum(3) / W;
    st.mean_task_reward = sum(4) / W;
    st.e_pos = sum(6) > 0 ? sum(5) / sum(6) : kNaN;
    st.e_vel = sum(6) > 0 ? sum(7) / sum(6) : kNaN;
    st.policy_loss = sum(8) / W;
    st.value_loss = sum(9) / W;
    st.clip_fraction = sum(10) / W;
    st.approx_kl = sum(11) / W;
    st.disc_loss = sum(12) / W;
  }

  if (!model_.params().allFinite()) throw NumericalError("model parameters became non-finite");
  ++iteration_;
  st.iteration = iteration_;
  st.samples = samples_ * (comm_ ? comm_->size() : 1);
  st.action_std = model_.log_std().array().exp().mean();
  if (!model_.has_disc()) st.disc_loss = st.disc_real = st.disc_fake = kNaN;
  return st;
}

nlohmann::json Agent::state() const {
  nlohmann::json j;
  j["version"] = kStateVersion;
  j["agent"] = to_string(config_.type);
  j["layout"] = model_.layout();
  j["params"] = vec_json(model_.params());
  j["policy_opt"] = policy_opt_.to_json();
  if (model_.has_disc()) {
    j["disc_opt"] = disc_opt_.to_json();
    j["disc_norm"] = disc_norm_.to_json();
  }
  j["obs_norm"] = obs_norm_.to_json();
  j["iteration"] = iteration_;
  j["samples"] = samples_;
  j["rng"] = rng_.serialize();
  j["env"] = env_.save_state();
  j["ep_return"] = ep_return_;
  j["ep_length"] = ep_length_;
  if (config_.type == AgentType::awr) {
    j["replay"] = {{"size", replay_.size},
                   {"next", replay_.next},
                   {"obs", mat_json(replay_.obs, replay_.size)},
                   {"actions", mat_json(replay_.actions, replay_.size)},
                   {"returns", vec_json(replay_.returns.head(replay_.size))}};
  }
  return j;
}

void Agent::load_policy(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kStateVersion) {
      throw FormatError("unsupported checkpoint version " + j.at("version").dump());
    }
    if (j.at("layout") != model_.layout()) {
      throw FormatError("checkpoint architecture does not match the configured model: checkpoint " +
                        j.at("layout").dump() + " vs model " + model_.layout().dump());
    }
    const Eigen::VectorXd p = json_vec(j.at("params"));
    if (p.size() != model_.num_params()) throw FormatError("checkpoint parameter count mismatch");
    model_.params() = p;
    obs_norm_ = RunningNormalizer::from_json(j.at("obs_norm"));
    if (model_.has_disc()) disc_norm_ = RunningNormalizer::from_json(j.at("disc_norm"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

void Agent::load_state(const nlohmann::json& j) {
  load_policy(j);
  try {
    if (j.at("agent").get<std::string>() != to_string(config_.type)) {
      throw FormatError("checkpoint was written by a '" + j.at("agent").get<std::string>() + "' agent");
    }
    policy_opt_.load_json(j.at("policy_opt"));
    if (model_.has_disc()) disc_opt_.load_json(j.at("disc_opt"));
    iteration_ = j.at("iteration").get<long>();
    samples_ = j.at("samples").get<long>();
    rng_.deserialize(j.at("rng").get<std::string>());
    env_.load_state(j.at("env"));
    ep_return_ = j.at("ep_return").get<std::vector<double>>();
    ep_length_ = j.at("ep_length").get<std::vector<int>>();
    if (static_cast<int>(ep_return_.size()) != num_envs_ || static_cast<int>(ep_length_.size()) != num_envs_) {
      throw FormatError("checkpoint env count does not match num_envs");
    }
    if (config_.type == AgentType::awr) {
      const auto& r = j.at("replay");
      replay_.size = r.at("size").get<int>();
      replay_.next = r.at("next").get<int>();
      if (replay_.size < 0 || replay_.size > config_.replay_size || replay_.next < 0 ||
          replay_.next >= config_.replay_size) {
        throw FormatError("checkpoint replay buffer does not fit replay_size");
      }
      json_mat(r.at("obs"), replay_.obs);
      json_mat(r.at("actions"), replay_.actions);
      const Eigen::VectorXd ret = json_vec(r.at("returns"));
      if (ret.size() != replay_.size) throw FormatError("checkpoint replay returns have the wrong length");
      replay_.returns.head(replay_.size) = ret;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace imitate::learning
