#include "imitate/learning/adam.hpp"

#include <cmath>
#include <vector>

#include "imitate/util/error.hpp"

namespace imitate::learning {
namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Adam::Adam(int offset, Eigen::VectorXd learning_rates, double beta1, double beta2, double eps)
    : offset_(offset),
      lr_(std::move(learning_rates)),
      m_(Eigen::VectorXd::Zero(lr_.size())),
      v_(Eigen::VectorXd::Zero(lr_.size())),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() < offset_ + size() || grad.size() != params.size()) {
    throw ContractError("Adam: parameter/gradient size mismatch");
  }
  ++t_;
  const auto g = grad.segment(offset_, size());
  m_ = beta1_ * m_ + (1.0 - beta1_) * g;
  v_ = beta2_ * v_ + (1.0 - beta2_) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.segment(offset_, size()).array() -=
      lr_.array() * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

nlohmann::json Adam::to_json() const {
  return {{"offset", offset_}, {"size", size()}, {"t", t_}, {"m", to_vec(m_)}, {"v", to_vec(v_)}};
}

void Adam::load_json(const nlohmann::json& j) {
  if (j.at("offset").get<int>() != offset_ || j.at("size").get<int>() != size()) {
    throw FormatError("optimizer state does not match the parameter layout");
  }
  const auto m = j.at("m").get<std::vector<double>>();
  const auto v = j.at("v").get<std::vector<double>>();
  if (static_cast<int>(m.size()) != size() || static_cast<int>(v.size()) != size()) {
    throw FormatError("optimizer moment size mismatch");
  }
  m_ = Eigen::Map<const Eigen::VectorXd>(m.data(), size());
  v_ = Eigen::Map<const Eigen::VectorXd>(v.data(), size());
  t_ = j.at("t").get<long>();
}

}  // namespace imitate::learning
