#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace imitate::learning {

/// Adaptive-moment optimizer over a contiguous slice [offset, offset + size) of a
/// flat parameter vector, with a per-parameter learning rate.
class Adam {
 public:
  Adam() = default;
  Adam(int offset, Eigen::VectorXd learning_rates, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  int offset() const { return offset_; }
  int size() const { return static_cast<int>(lr_.size()); }
  long steps() const { return t_; }

  /// `grad` covers the full parameter vector; only the slice is read.
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  nlohmann::json to_json() const;
  void load_json(const nlohmann::json& j);

 private:
  int offset_ = 0;
  Eigen::VectorXd lr_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
};

}  // namespace imitate::learning
