#include "imitate/eval/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "imitate/util/error.hpp"

namespace imitate::eval {

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& std) {
  mean = 0.0;
  std = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) std += (x - mean) * (x - mean);
  std = std::sqrt(std / static_cast<double>(v.size()));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

SeedResult run_episodes(envs::VecEnv& env, const PolicyFn& policy, int episodes, Weighting weighting,
                        std::uint64_t seed, const StepHook& hook) {
  if (episodes < 1) throw InvalidArgument("run_episodes: episodes must be positive");
  const bool tracking = envs::is_tracking(env.config().task);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const int n = env.num_envs();
  // quota per env, fixed up front
  std::vector<int> quota(n, episodes / n);
  for (int i = 0; i < episodes % n; ++i) ++quota[i];

  struct Acc {
    double pos = 0.0, vel = 0.0, ret = 0.0;
    int steps = 0, length = 0;
  };
  std::vector<Acc> acc(n);
  std::vector<int> done_count(n, 0);
  SeedResult out;
  out.seed = seed;
  double step_pos = 0.0, step_vel = 0.0;
  long step_n = 0;

  Eigen::MatrixXd obs = env.reset();
  int remaining = episodes;
  while (remaining > 0) {
    const envs::StepResult r = env.step(policy(obs));
    if (hook) hook(env, r);
    const Eigen::MatrixXd none = Eigen::MatrixXd::Constant(1, n, nan);
    const Eigen::MatrixXd& ep = tracking ? r.info.at("e_pos") : none;
    const Eigen::MatrixXd& ev = tracking ? r.info.at("e_vel") : none;
    for (int i = 0; i < n; ++i) {
      if (done_count[i] >= quota[i]) continue;
      acc[i].ret += r.reward(i);
      ++acc[i].length;
      if (std::isfinite(ep(0, i)) && std::isfinite(ev(0, i))) {
        acc[i].pos += ep(0, i);
        acc[i].vel += ev(0, i);
        ++acc[i].steps;
      }
      if (r.done[i] == envs::DoneFlag::null) continue;
      EpisodeErrors e;
      e.steps = acc[i].steps;
      e.length = acc[i].length;
      e.ret = acc[i].ret;
      e.e_pos = e.steps > 0 ? acc[i].pos / e.steps : nan;
      e.e_vel = e.steps > 0 ? acc[i].vel / e.steps : nan;
      step_pos += acc[i].pos;
      step_vel += acc[i].vel;
      step_n += acc[i].steps;
      out.episodes.push_back(e);
      acc[i] = Acc{};
      ++done_count[i];
      --remaining;
    }
    obs = env.reset_done();
  }

  std::vector<double> pos, vel;
  for (const auto& e : out.episodes) {
    out.return_mean += e.ret / static_cast<double>(out.episodes.size());
    // an episode that failed on its first step has no error samples
    if (e.steps == 0) continue;
    pos.push_back(e.e_pos);
    vel.push_back(e.e_vel);
  }
  mean_std(pos, out.e_pos_mean, out.e_pos_std);
  mean_std(vel, out.e_vel_mean, out.e_vel_std);
  if (weighting == Weighting::step) {
    out.e_pos_mean = step_n > 0 ? step_pos / static_cast<double>(step_n) : nan;
    out.e_vel_mean = step_n > 0 ? step_vel / static_cast<double>(step_n) : nan;
  }
  if (pos.empty()) out.e_pos_mean = out.e_pos_std = out.e_vel_mean = out.e_vel_std = nan;
  return out;
}

EvalReport make_report(const std::string& motion, const std::string& method, const std::vector<SeedResult>& seeds,
                       double wall_seconds) {
  if (seeds.empty()) throw InvalidArgument("make_report: no seeds");
  EvalReport rep;
  rep.wall_seconds = wall_seconds;
  std::vector<double> pos, vel;
  int total = 0;
  for (const auto& s : seeds) {
    EvalRow row{motion, method, std::to_string(s.seed), static_cast<int>(s.episodes.size()),
                s.e_pos_mean, s.e_pos_std, s.e_vel_mean, s.e_vel_std};
    rep.rows.push_back(row);
    pos.push_back(s.e_pos_mean);
    vel.push_back(s.e_vel_mean);
    total += row.episodes;
  }
  EvalRow sum{motion, method, "all", total, 0, 0, 0, 0};
  mean_std(pos, sum.e_pos_mean, sum.e_pos_std);
  mean_std(vel, sum.e_vel_mean, sum.e_vel_std);
  rep.rows.push_back(sum);
  return rep;
}

std::string EvalReport::csv() const {
  std::ostringstream os;
  os << "motion,method,seed,episodes,e_pos_mean,e_pos_std,e_vel_mean,e_vel_std\n";
  os.precision(10);
  for (const auto& r : rows) {
    os << r.motion << ',' << r.method << ',' << r.seed << ',' << r.episodes << ',' << r.e_pos_mean << ','
       << r.e_pos_std << ',' << r.e_vel_mean << ',' << r.e_vel_std << '\n';
  }
  return os.str();
}

std::string EvalReport::table() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %-10s %-8s %8s  %-24s %-24s\n", "motion", "method", "seed", "episodes",
                "e_pos [m]", "e_vel [rad/s]");
  os << line;
  for (const auto& r : rows) {
    const std::string p = fmt(r.e_pos_mean) + " +/- " + fmt(r.e_pos_std);
    const std::string v = fmt(r.e_vel_mean) + " +/- " + fmt(r.e_vel_std);
    std::snprintf(line, sizeof(line), "%-16s %-10s %-8s %8d  %-24s %-24s\n", r.motion.c_str(), r.method.c_str(),
                  r.seed.c_str(), r.episodes, p.c_str(), v.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace imitate::eval
