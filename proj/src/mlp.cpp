#include "cim/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace cim {

Mlp::Mlp(const std::vector<std::size_t>& sizes, Rng& rng, double out_scale) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp needs an input and an output size");
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    if (in == 0 || out == 0) throw std::invalid_argument("layer sizes must be positive");
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    const double scale = l + 2 == sizes.size() ? out_scale : 1.0;
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.w(r, c) = scale * limit * (2.0 * uniform01(rng) - 1.0);
    }
    layers_.push_back(std::move(layer));
  }
}

Mlp Mlp::zeros_like(const Mlp& other) {
  Mlp m;
  for (const auto& l : other.layers_) {
    m.layers_.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()), Eigen::VectorXd::Zero(l.b.size())});
  }
  return m;
}

std::size_t Mlp::input_size() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().w.cols());
}

std::size_t Mlp::output_size() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().w.rows());
}

std::vector<std::size_t> Mlp::sizes() const {
  std::vector<std::size_t> s;
  if (layers_.empty()) return s;
  s.push_back(input_size());
  for (const auto& l : layers_) s.push_back(static_cast<std::size_t>(l.w.rows()));
  return s;
}

std::size_t Mlp::num_params() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
  return n;
}

double& Mlp::param(std::size_t idx) {
  for (auto& l : layers_) {
    const auto nw = static_cast<std::size_t>(l.w.size());
    if (idx < nw) {
      const auto cols = static_cast<std::size_t>(l.w.cols());
      return l.w(static_cast<Eigen::Index>(idx / cols), static_cast<Eigen::Index>(idx % cols));
    }
    idx -= nw;
    const auto nb = static_cast<std::size_t>(l.b.size());
    if (idx < nb) return l.b[static_cast<Eigen::Index>(idx)];
    idx -= nb;
  }
  throw std::out_of_range("parameter index out of range");
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].w * h;
    z.colwise() += layers_[l].b;
    h = l + 1 < layers_.size() ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache& cache) const {
  cache.acts.clear();
  cache.acts.push_back(x);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].w * cache.acts.back();
    z.colwise() += layers_[l].b;
    if (l + 1 < layers_.size()) z = z.array().tanh();
    cache.acts.push_back(std::move(z));
  }
  return cache.acts.back();
}

void Mlp::backward(const Cache& cache, const Eigen::MatrixXd& dout, Mlp& grad) const {
  Eigen::MatrixXd delta = dout;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Eigen::MatrixXd& input = cache.acts[l];
    grad.layers_[l].w.noalias() += delta * input.transpose();
    grad.layers_[l].b += delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = layers_[l].w.transpose() * delta;
    delta = back.array() * (1.0 - input.array().square());
  }
}

void Mlp::axpy(double alpha, const Mlp& other) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].w += alpha * other.layers_[l].w;
    layers_[l].b += alpha * other.layers_[l].b;
  }
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.w.allFinite() || !l.b.allFinite()) return false;
  }
  return true;
}

}  // namespace cim
