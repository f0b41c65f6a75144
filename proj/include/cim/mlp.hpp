#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "cim/rng.hpp"

namespace cim {

struct DenseLayer {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;
};

/// Fully connected net with tanh hidden layers and a linear output layer.
/// Inputs are column-major batches: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  /// sizes = {in, hidden..., out}; weights uniform in +-sqrt(6/(in+out)),
  /// the output layer scaled by `out_scale`, biases zero.
  Mlp(const std::vector<std::size_t>& sizes, Rng& rng, double out_scale = 1.0);

  static Mlp zeros_like(const Mlp& other);

  std::size_t input_size() const;
  std::size_t output_size() const;
  std::vector<std::size_t> sizes() const;
  std::size_t num_params() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Flat view used by tests and serialization: layer by layer, weights
  /// row-major then bias.
  double& param(std::size_t idx);
  double param(std::size_t idx) const { return const_cast<Mlp*>(this)->param(idx); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  /// Activations kept for backprop; acts[0] is the input.
  struct Cache {
    std::vector<Eigen::MatrixXd> acts;
  };
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache) const;

  /// Accumulates parameter gradients of sum(dout .* output) into `grad`.
  void backward(const Cache& cache, const Eigen::MatrixXd& dout, Mlp& grad) const;

  /// this += alpha * other
  void axpy(double alpha, const Mlp& other);
  bool all_finite() const;

 private:
  std::vector<DenseLayer> layers_;
};

}  // namespace cim
