#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "imitate/util/rng.hpp"

namespace imitate::learning {

enum class Activation { relu, tanh };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Fully connected network with a linear output layer, evaluated on
/// parameters held elsewhere (a slice of a flat vector).
///
/// Layer l stores W_l (out x in, column-major) followed by b_l.
/// Inputs and outputs are column-per-sample matrices.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int in_dim, std::vector<int> hidden, int out_dim, Activation act);

  int in_dim() const { return sizes_.front(); }
  int out_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return act_; }
  int num_params() const { return num_params_; }

  /// Uniform(+-1/sqrt(fan_in)) weights, zero biases; the output layer is scaled by out_scale.
  void init(double* params, Rng& rng, double out_scale) const;

  struct Cache {
    std::vector<Eigen::MatrixXd> a;  // a[0] = input, a[l] = activation of layer l (last = output)
    std::vector<Eigen::MatrixXd> z;  // pre-activations, z[l-1] for layer l
  };

  Eigen::MatrixXd forward(const double* params, const Eigen::Ref<const Eigen::MatrixXd>& x, Cache* cache = nullptr) const;

  /// Accumulates dL/dparams given dL/dy (out x B). Optionally writes dL/dx.
  void backward(const double* params, const Cache& cache, const Eigen::Ref<const Eigen::MatrixXd>& dy, double* grad,
                Eigen::MatrixXd* dx = nullptr) const;

  /// For a scalar-output network: returns mean_b |dy_b/dx_b|^2 over the batch
  /// and accumulates `scale` times its parameter gradient into `grad`.
  double gradient_penalty(const double* params, const Eigen::Ref<const Eigen::MatrixXd>& x, double scale,
                          double* grad) const;

  /// dy/dx for a scalar-output network, one column per sample.
  Eigen::MatrixXd input_gradient(const double* params, const Eigen::Ref<const Eigen::MatrixXd>& x) const;

 private:
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int weight_offset(int l) const { return offsets_[l]; }
  int bias_offset(int l) const { return offsets_[l] + sizes_[l + 1] * sizes_[l]; }

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int num_params_ = 0;
  Activation act_ = Activation::relu;
};

}  // namespace imitate::learning
