#include "imitate/learning/normalizer.hpp"

#include <vector>

#include "imitate/util/error.hpp"

namespace imitate::learning {

RunningNormalizer::RunningNormalizer(int dim, double clip)
    : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)), clip_(clip) {
  if (dim < 0) throw InvalidArgument("normalizer dimension must be non-negative");
  if (!(clip > 0.0)) throw InvalidArgument("normalizer clip must be positive");
}

Eigen::VectorXd RunningNormalizer::variance() const {
  if (count_ <= 0.0) return Eigen::VectorXd::Ones(dim());
  return m2_ / count_;
}

void RunningNormalizer::update(const Eigen::Ref<const Eigen::MatrixXd>& batch) {
  if (batch.rows() != dim()) throw InvalidArgument("normalizer update: dimension mismatch");
  if (batch.cols() == 0) return;
  const double n = static_cast<double>(batch.cols());
  const Eigen::VectorXd mean = batch.rowwise().mean();
  const Eigen::VectorXd m2 = (batch.colwise() - mean).array().square().rowwise().sum();
  merge(n, mean, m2);
}

void RunningNormalizer::merge(double count, const Eigen::VectorXd& mean, const Eigen::VectorXd& m2) {
  if (mean.size() != dim() || m2.size() != dim()) throw InvalidArgument("normalizer merge: dimension mismatch");
  if (count <= 0.0) return;
  const double total = count_ + count;
  const Eigen::VectorXd delta = mean - mean_;
  mean_ += delta * (count / total);
  m2_ += m2 + delta.cwiseProduct(delta) * (count_ * count / total);
  count_ = total;
}

Eigen::MatrixXd RunningNormalizer::normalize(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (x.rows() != dim()) throw InvalidArgument("normalize: dimension mismatch");
  const Eigen::ArrayXd inv_std = (variance().array() + 1e-5).rsqrt();
  Eigen::MatrixXd out = (x.colwise() - mean_).array().colwise() * inv_std;
  return out.cwiseMax(-clip_).cwiseMin(clip_);
}

Eigen::VectorXd RunningNormalizer::pack() const {
  Eigen::VectorXd p(1 + 2 * dim());
  p << count_, mean_, m2_;
  return p;
}

RunningNormalizer RunningNormalizer::unpack(const Eigen::VectorXd& packed, double clip) {
  if (packed.size() < 1 || (packed.size() - 1) % 2 != 0) throw InvalidArgument("bad packed normalizer");
  const int d = static_cast<int>((packed.size() - 1) / 2);
  RunningNormalizer n(d, clip);
  n.count_ = packed[0];
  n.mean_ = packed.segment(1, d);
  n.m2_ = packed.segment(1 + d, d);
  return n;
}

nlohmann::json RunningNormalizer::to_json() const {
  return {{"count", count_},
          {"mean", std::vector<double>(mean_.data(), mean_.data() + mean_.size())},
          {"m2", std::vector<double>(m2_.data(), m2_.data() + m2_.size())},
          {"clip", clip_}};
}

RunningNormalizer RunningNormalizer::from_json(const nlohmann::json& j) {
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto m2 = j.at("m2").get<std::vector<double>>();
  if (mean.size() != m2.size()) throw FormatError("normalizer: mean/m2 size mismatch");
  RunningNormalizer n(static_cast<int>(mean.size()), j.at("clip").get<double>());
  n.count_ = j.at("count").get<double>();
  n.mean_ = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  n.m2_ = Eigen::Map<const Eigen::VectorXd>(m2.data(), static_cast<Eigen::Index>(m2.size()));
  return n;
}

}  // namespace imitate::learning
