#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace imitate::learning {

/// Running per-dimension mean and population variance.
///
/// Batches are merged with the pairwise (Chan) update, so any chunking of the
/// same data gives the two-pass statistics up to rounding.
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(int dim, double clip = 5.0);

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  /// Population variance; ones before any data.
  Eigen::VectorXd variance() const;
  double clip() const { return clip_; }

  /// `batch` is dim x B.
  void update(const Eigen::Ref<const Eigen::MatrixXd>& batch);
  void merge(double count, const Eigen::VectorXd& mean, const Eigen::VectorXd& m2);
  void merge(const RunningNormalizer& other) { merge(other.count_, other.mean_, other.m2_); }

  /// clamp((x - mean) / sqrt(var + 1e-5), -clip, clip), column-wise.
  Eigen::MatrixXd normalize(const Eigen::Ref<const Eigen::MatrixXd>& x) const;

  /// Packs (count, mean, m2) for cross-worker reduction.
  Eigen::VectorXd pack() const;
  static RunningNormalizer unpack(const Eigen::VectorXd& packed, double clip);

  nlohmann::json to_json() const;
  static RunningNormalizer from_json(const nlohmann::json& j);

  friend bool operator==(const RunningNormalizer&, const RunningNormalizer&) = default;

 private:
  double count_ = 0.0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
  double clip_ = 5.0;
};

}  // namespace imitate::learning
