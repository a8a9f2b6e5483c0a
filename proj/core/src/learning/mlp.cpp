#include "imitate/learning/mlp.hpp"

#include <cmath>

#include "imitate/util/error.hpp"

namespace imitate::learning {
namespace {

using MatMap = Eigen::Map<const Eigen::MatrixXd>;
using MutMatMap = Eigen::Map<Eigen::MatrixXd>;
using VecMap = Eigen::Map<const Eigen::VectorXd>;
using MutVecMap = Eigen::Map<Eigen::VectorXd>;

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& z) {
  if (act == Activation::relu) return z.cwiseMax(0.0);
  return z.array().tanh().matrix();
}

// sigma'(z) expressed through z and a = sigma(z).
Eigen::MatrixXd activation_grad(Activation act, const Eigen::MatrixXd& z, const Eigen::MatrixXd& a) {
  if (act == Activation::relu) return (z.array() > 0.0).cast<double>().matrix();
  return (1.0 - a.array().square()).matrix();
}

Eigen::MatrixXd activation_second(Activation act, const Eigen::MatrixXd& a) {
  if (act == Activation::relu) return Eigen::MatrixXd::Zero(a.rows(), a.cols());
  return (-2.0 * a.array() * (1.0 - a.array().square())).matrix();
}

}  // namespace

const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + s + "' (relu|tanh)");
}

Mlp::Mlp(int in_dim, std::vector<int> hidden, int out_dim, Activation act) : act_(act) {
  sizes_.push_back(in_dim);
  for (int h : hidden) sizes_.push_back(h);
  sizes_.push_back(out_dim);
  for (int s : sizes_) {
    if (s < 1) throw InvalidArgument("MLP layer sizes must be positive");
  }
  for (int l = 0; l < num_layers(); ++l) {
    offsets_.push_back(num_params_);
    num_params_ += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
}

void Mlp::init(double* params, Rng& rng, double out_scale) const {
  for (int l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const double scale = l + 1 == num_layers() ? out_scale : 1.0;
    MutMatMap W(params + weight_offset(l), sizes_[l + 1], sizes_[l]);
    for (Eigen::Index k = 0; k < W.size(); ++k) W.data()[k] = scale * rng.uniform(-bound, bound);
    MutVecMap(params + bias_offset(l), sizes_[l + 1]).setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const double* params, const Eigen::Ref<const Eigen::MatrixXd>& x, Cache* cache) const {
  if (x.rows() != in_dim()) throw InvalidArgument("MLP input dimension mismatch");
  Eigen::MatrixXd a = x;
  if (cache) {
    cache->a.assign(1, a);
    cache->z.clear();
  }
  for (int l = 0; l < num_layers(); ++l) {
    const MatMap W(params + weight_offset(l), sizes_[l + 1], sizes_[l]);
    const VecMap b(params + bias_offset(l), sizes_[l + 1]);
    Eigen::MatrixXd z = W * a;
    z.colwise() += b;
    const bool last = l + 1 == num_layers();
    a = last ? z : activate(act_, z);
    if (cache) {
      cache->z.push_back(std::move(z));
      cache->a.push_back(a);
    }
  }
  return a;
}

void Mlp::backward(const double* params, const Cache& cache, const Eigen::Ref<const Eigen::MatrixXd>& dy, double* grad,
                   Eigen::MatrixXd* dx) const {
  Eigen::MatrixXd dz = dy;
  for (int l = num_layers() - 1; l >= 0; --l) {
    MutMatMap(grad + weight_offset(l), sizes_[l + 1], sizes_[l]).noalias() += dz * cache.a[l].transpose();
    MutVecMap(grad + bias_offset(l), sizes_[l + 1]) += dz.rowwise().sum();
    if (l == 0 && !dx) break;
    const MatMap W(params + weight_offset(l), sizes_[l + 1], sizes_[l]);
    Eigen::MatrixXd da = W.transpose() * dz;
    if (l == 0) {
      *dx = std::move(da);
      break;
    }
    dz = activation_grad(act_, cache.z[l - 1], cache.a[l]).cwiseProduct(da);
  }
}

Eigen::MatrixXd Mlp::input_gradient(const double* params, const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (out_dim() != 1) throw ContractError("input_gradient needs a scalar-output network");
  Cache cache;
  forward(params, x, &cache);
  Eigen::MatrixXd dx;
  std::vector<double> scratch(num_params_, 0.0);
  backward(params, cache, Eigen::MatrixXd::Ones(1, x.cols()), scratch.data(), &dx);
  return dx;
}

double Mlp::gradient_penalty(const double* params, const Eigen::Ref<const Eigen::MatrixXd>& x, double scale,
                             double* grad) const {
  if (out_dim() != 1) throw ContractError("gradient_penalty needs a scalar-output network");
  const int L = num_layers();
  const Eigen::Index B = x.cols();
  Cache cache;
  forward(params, x, &cache);

  // Backward chain for g = dy/dx: v[L] = W_L^T 1, u[l] = sigma'(z_l) * v[l+1], v[l] = W_l^T u[l].
  // Indices here are 0-based layers: layer l maps a[l] -> z[l].
  std::vector<Eigen::MatrixXd> v(L + 1), u(L), sp(L);
  {
    const MatMap W(params + weight_offset(L - 1), sizes_[L], sizes_[L - 1]);
    v[L - 1] = W.transpose() * Eigen::MatrixXd::Ones(1, B);
  }
  for (int l = L - 2; l >= 0; --l) {
    sp[l] = activation_grad(act_, cache.z[l], cache.a[l + 1]);
    u[l] = sp[l].cwiseProduct(v[l + 1]);
    const MatMap W(params + weight_offset(l), sizes_[l + 1], sizes_[l]);
    v[l] = W.transpose() * u[l];
  }
  const Eigen::MatrixXd& g = v[0];
  const double penalty = g.squaredNorm() / static_cast<double>(B);
  if (scale == 0.0) return penalty;

  // Reverse pass through the backward chain; zbar collects adjoints injected at each pre-activation.
  std::vector<Eigen::MatrixXd> zbar(L);
  Eigen::MatrixXd vbar = (2.0 * scale / static_cast<double>(B)) * g;
  for (int l = 0; l <= L - 2; ++l) {
    const MatMap W(params + weight_offset(l), sizes_[l + 1], sizes_[l]);
    MutMatMap(grad + weight_offset(l), sizes_[l + 1], sizes_[l]).noalias() += u[l] * vbar.transpose();
    const Eigen::MatrixXd ubar = W * vbar;
    zbar[l] = activation_second(act_, cache.a[l + 1]).cwiseProduct(v[l + 1]).cwiseProduct(ubar);
    vbar = sp[l].cwiseProduct(ubar);
  }
  MutMatMap(grad + weight_offset(L - 1), sizes_[L], sizes_[L - 1]).noalias() +=
      Eigen::MatrixXd::Ones(1, B) * vbar.transpose();

  // Standard backprop of the injected adjoints through the forward pass.
  Eigen::MatrixXd dz;
  for (int l = L - 2; l >= 0; --l) {
    if (l == L - 2) {
      dz = zbar[l];
    } else {
      const MatMap Wn(params + weight_offset(l + 1), sizes_[l + 2], sizes_[l + 1]);
      dz = zbar[l] + sp[l].cwiseProduct(Wn.transpose() * dz);
    }
    MutMatMap(grad + weight_offset(l), sizes_[l + 1], sizes_[l]).noalias() += dz * cache.a[l].transpose();
    MutVecMap(grad + bias_offset(l), sizes_[l + 1]) += dz.rowwise().sum();
  }
  return penalty;
}

}  // namespace imitate::learning
