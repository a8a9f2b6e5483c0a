#pragma once

#include "imitate/engine/engine.hpp"
#include "imitate/util/rng.hpp"

namespace imitate::engine {

/// Pose playback backend: commands are applied directly to the joint DoFs.
///
/// pos / pd_1d: the command is the next joint pose (plus optional Gaussian noise).
/// vel: joint DoFs are integrated with the commanded velocity.
/// none: the state is left unchanged. The root is never moved by commands.
class KinematicEngine final : public Engine {
 public:
  KinematicEngine(std::shared_ptr<const kin::CharacterModel> character, EngineConfig config, int num_envs,
                  std::uint64_t seed);

  nlohmann::json backend_state() const override;
  void set_backend_state(const nlohmann::json& j) override;

 protected:
  void advance(int env, SimState& s, const Eigen::VectorXd& command) override;

 private:
  std::vector<Rng> noise_;
};

}  // namespace imitate::engine
