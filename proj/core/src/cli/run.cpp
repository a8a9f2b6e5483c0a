#include "imitate/cli/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include "imitate/learning/checkpoint.hpp"
#include "imitate/util/config_io.hpp"
#include "imitate/util/error.hpp"

namespace imitate::cli {

namespace fs = std::filesystem;

const std::vector<std::string>& log_columns() {
  static const std::vector<std::string> cols = {
      "iteration",   "samples",     "wall_time",  "mean_return", "mean_ep_len",   "mean_reward",
      "task_reward", "e_pos",       "e_vel",      "policy_loss", "value_loss",    "clip_frac",
      "approx_kl",   "action_std",  "disc_loss",  "disc_real",   "disc_fake"};
  return cols;
}

fs::path csv_sibling(const fs::path& log_file) {
  fs::path p = log_file;
  if (p.extension() == ".csv") return p += ".csv";
  return p.replace_extension(".csv");
}

namespace {

constexpr int kTrajectoryEvery = 10;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<std::string> row_values(const learning::IterationStats& s, double wall) {
  char w[32];
  std::snprintf(w, sizeof(w), "%.2f", wall);
  return {std::to_string(s.iteration), std::to_string(s.samples), w,
          num(s.mean_return),          num(s.mean_episode_length), num(s.mean_reward),
          num(s.mean_task_reward),     num(s.e_pos),              num(s.e_vel),
          num(s.policy_loss),          num(s.value_loss),         num(s.clip_fraction),
          num(s.approx_kl),            num(s.action_std),         num(s.disc_loss),
          num(s.disc_real),            num(s.disc_fake)};
}

std::string table_line(const std::vector<std::string>& cells) {
  std::string line;
  for (const auto& c : cells) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%13s", c.c_str());
    line += buf;
  }
  return line + "\n";
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t k = 0; k < cells.size(); ++k) line += (k ? "," : "") + cells[k];
  return line + "\n";
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

bool non_empty_file(const fs::path& p) { return fs::exists(p) && fs::file_size(p) > 0; }

/// One deterministic episode on a fresh single env, saved as a motion file.
void export_trajectory(const envs::EnvConfig& cfg, const eval::PolicyFn& policy, std::uint64_t seed,
                       const fs::path& path) {
  envs::VecEnv env(cfg, 1, seed);
  Eigen::MatrixXd obs = env.reset();
  std::vector<Eigen::VectorXd> frames{kin::frame_from_pose(env.engine().get_state(0).pose)};
  const int max_steps = static_cast<int>(std::ceil(cfg.episode_length / env.control_dt())) + 1;
  for (int t = 0; t < max_steps; ++t) {
    const envs::StepResult r = env.step(policy(obs));
    const engine::SimState& st = env.engine().get_state(0);
    if (st.failed) break;
    frames.push_back(kin::frame_from_pose(st.pose));
    if (r.done[0] != envs::DoneFlag::null) break;
    obs = r.obs;
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(frames.size()), frames.front().size());
  for (std::size_t k = 0; k < frames.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = frames[k].transpose();
  ensure_parent(path);
  kin::save_motion(kin::MotionClip(1.0 / env.control_dt(), kin::LoopMode::none, env.character().name(),
                                   env.character().layout(), m),
                   path);
}

void warn_compat(const RunArgs& args, std::ostream& err) {
  if (args.device != "cpu") err << "warning: device '" << args.device << "' is not supported; running on cpu\n";
  if (args.logger != "csv") {
    err << "warning: logger '" << args.logger << "' is not implemented; writing the csv log only\n";
  }
}

std::uint64_t env_seed(std::uint64_t seed, int rank) { return derive_seed(seed, 0xE000u + static_cast<unsigned>(rank)); }

std::string motion_label(const envs::EnvConfig& cfg) {
  return cfg.motion_file.empty() ? std::string("-") : fs::path(cfg.motion_file).stem().string();
}

}  // namespace

std::vector<learning::IterationStats> run_train(const RunArgs& args, std::ostream& out, std::ostream& err) {
  if (args.mode != "train") throw InvalidArgument("run_train needs --mode train");
  if (args.env_config.empty()) throw InvalidArgument("--env_config is required");
  if (args.agent_config.empty()) throw InvalidArgument("--agent_config is required for training");
  warn_compat(args, err);
  const unsigned cores = std::thread::hardware_concurrency();
  if (cores > 0 && static_cast<unsigned>(args.num_workers) > cores) {
    err << "warning: " << args.num_workers << " workers on " << cores << " logical cores\n";
  }

  const envs::EnvConfig env_cfg = envs::EnvConfig::load(args.env_config);
  const learning::AgentConfig agent_cfg = learning::AgentConfig::load(args.agent_config);
  const int W = args.num_workers;

  learning::Communicator comm(W);
  learning::Communicator* cp = W > 1 ? &comm : nullptr;
  std::vector<std::unique_ptr<envs::VecEnv>> envs;
  std::vector<std::unique_ptr<learning::Agent>> agents;
  for (int r = 0; r < W; ++r) {
    envs.push_back(std::make_unique<envs::VecEnv>(env_cfg, args.num_envs, env_seed(args.seed, r)));
    agents.push_back(std::make_unique<learning::Agent>(agent_cfg, *envs.back(), args.seed, cp, r));
  }

  const bool resume = !args.model_file.empty();
  if (resume) {
    const auto states = learning::load_checkpoint(args.model_file);
    if (static_cast<int>(states.size()) != W) {
      throw FormatError("checkpoint holds " + std::to_string(states.size()) + " worker states but --num_workers is " +
                        std::to_string(W));
    }
    for (int r = 0; r < W; ++r) agents[r]->load_state(states[r]);
    out << "resumed from " << args.model_file << " at iteration " << agents[0]->iteration() << "\n";
  }

  const fs::path log_path = args.log_file;
  const fs::path csv_path = csv_sibling(log_path);
  ensure_parent(log_path);
  ensure_parent(args.out_model_file);
  const bool append = resume && non_empty_file(log_path) && non_empty_file(csv_path);
  std::ofstream log(log_path, append ? std::ios::app : std::ios::trunc);
  std::ofstream csv(csv_path, append ? std::ios::app : std::ios::trunc);
  if (!log || !csv) throw InvalidArgument("cannot open log file " + log_path.string());
  if (!append) {
    log << table_line(log_columns());
    csv << csv_line(log_columns());
  }
  out << table_line(log_columns());

  const auto start = std::chrono::steady_clock::now();
  std::vector<learning::IterationStats> history;
  while (agents[0]->iteration() < args.max_iters) {
    std::vector<learning::IterationStats> st(W);
    std::vector<std::exception_ptr> errors(W);
    int first_failure = -1;
    std::mutex failure_mutex;
    const auto work = [&](int r) {
      try {
        st[r] = agents[r]->train_iteration();
      } catch (...) {
        errors[r] = std::current_exception();
        {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (first_failure < 0) first_failure = r;
        }
        comm.abort();
      }
    };
    std::vector<std::thread> threads;
    for (int r = 1; r < W; ++r) threads.emplace_back(work, r);
    work(0);
    for (auto& t : threads) t.join();
    if (first_failure >= 0) {
      try {
        std::rethrow_exception(errors[first_failure]);
      } catch (const NumericalError& e) {
        const fs::path dump = fs::path(args.out_model_file).string() + ".diag.json";
        nlohmann::json d = {{"error", e.what()}, {"worker", first_failure}, {"iteration", agents[0]->iteration()},
                            {"args", render_args(args)}};
        if (!history.empty()) d["last_row"] = row_values(history.back(), 0.0);
        write_text_file(dump, d.dump(2));
        err << "error: " << e.what() << " (diagnostics written to " << dump.string() << ")\n";
        throw;
      }
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto cells = row_values(st[0], wall);
    log << table_line(cells) << std::flush;
    csv << csv_line(cells) << std::flush;
    out << table_line(cells) << std::flush;
    history.push_back(st[0]);

    std::vector<nlohmann::json> states;
    for (const auto& a : agents) states.push_back(a->state());
    learning::save_checkpoint(args.out_model_file, states);

    const long it = agents[0]->iteration();
    if (args.visualize && (it % kTrajectoryEvery == 0 || it == args.max_iters)) {
      learning::Agent& a = *agents[0];
      char name[64];
      std::snprintf(name, sizeof(name), "trajectory_%06ld.json", it);
      const fs::path p = fs::path(args.out_model_file).parent_path() / name;
      export_trajectory(env_cfg, [&](const Eigen::MatrixXd& o) { return a.act(o, true); }, args.seed, p);
    }
  }
  return history;
}

TestResult run_test(const RunArgs& args, std::ostream& out, std::ostream& err) {
  if (args.mode != "test") throw InvalidArgument("run_test needs --mode test");
  if (args.env_config.empty()) throw InvalidArgument("--env_config is required");
  warn_compat(args, err);
  const envs::EnvConfig env_cfg = envs::EnvConfig::load(args.env_config);
  envs::VecEnv env(env_cfg, args.num_envs, derive_seed(args.seed, 0x7E57));

  std::unique_ptr<learning::Agent> agent;
  eval::PolicyFn policy;
  std::string method;
  if (args.model_file == "playback") {
    const int dim = env.action_dim();
    policy = [dim](const Eigen::MatrixXd& obs) { return Eigen::MatrixXd::Zero(dim, obs.cols()).eval(); };
    method = "playback";
  } else {
    if (args.agent_config.empty()) throw InvalidArgument("--agent_config is required to rebuild the model");
    const auto states = learning::load_checkpoint(args.model_file);
    agent = std::make_unique<learning::Agent>(learning::AgentConfig::load(args.agent_config), env, args.seed);
    agent->load_policy(states.front());
    learning::Agent* a = agent.get();
    policy = [a](const Eigen::MatrixXd& obs) { return a->act(obs, true); };
    method = learning::to_string(agent->config().type);
  }

  const auto start = std::chrono::steady_clock::now();
  const eval::SeedResult sr = eval::run_episodes(env, policy, args.test_episodes, eval::Weighting::episode, args.seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  TestResult res;
  res.report = eval::make_report(motion_label(env_cfg), method, {sr}, wall);
  res.mean_return = sr.return_mean;
  res.episodes = static_cast<int>(sr.episodes.size());
  const fs::path log_path = args.log_file;
  res.csv_file = log_path.parent_path() / (log_path.stem().string() + "_test.csv");
  ensure_parent(res.csv_file);
  write_text_file(res.csv_file, res.report.csv());
  out << res.report.table();
  out << "episodes " << res.episodes << "  mean return " << num(res.mean_return) << "  wall " << num(wall) << " s\n";
  if (args.visualize) {
    const fs::path p = log_path.parent_path() / (log_path.stem().string() + "_trajectory.json");
    export_trajectory(env_cfg, policy, args.seed, p);
    out << "trajectory written to " << p.string() << "\n";
  }
  return res;
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const RunArgs args = parse_args(argc, argv);
    if (args.mode == "train") {
      run_train(args, out, err);
    } else {
      run_test(args, out, err);
    }
    return 0;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace imitate::cli
