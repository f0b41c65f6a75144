#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cim/mlp.hpp"

namespace cim {

constexpr std::size_t kStateSize = 2;

/// Actor (softmax over actions) and critic (scalar value), both
/// 2 -> H -> H -> out with tanh hidden units.
struct PolicyParams {
  Mlp actor;
  Mlp critic;

  std::size_t num_actions() const { return actor.output_size(); }
};

/// Actor output layer starts near zero so the initial policy is close to uniform.
PolicyParams make_policy(std::size_t num_actions, std::size_t hidden, std::uint64_t seed);

struct PPOConfig {
  double gamma = 0.95;
  double clip_eps = 0.2;
  std::size_t epochs = 80;
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  std::size_t episodes_per_update = 8;
  std::size_t updates = 200;
  double entropy_coef = 0.01;
  std::size_t hidden = 64;
  /// Critic regresses return * value_scale; keeps the squared loss well
  /// conditioned when returns count users.
  double value_scale = 1.0;

  void validate() const;
};

/// One decision of the learner.
struct Sample {
  std::array<double, kStateSize> state{};
  std::size_t action = 0;
  double log_prob = 0.0;
  double ret = 0.0;
  double value = 0.0;  // critic estimate at collection time, in return units
};

using Batch = std::vector<Sample>;

Eigen::VectorXd policy_forward(const PolicyParams& p, const std::array<double, kStateSize>& state);
double value_estimate(const PolicyParams& p, const std::array<double, kStateSize>& state,
                      double value_scale = 1.0);

/// Return minus value, shifted to zero mean and scaled to unit variance.
/// A batch with no spread yields all zeros.
std::vector<double> normalized_advantages(std::span<const Sample> batch);

struct LossTerms {
  double actor = 0.0;    // -mean(clipped surrogate) - entropy_coef * mean entropy
  double critic = 0.0;   // mean squared error on scaled returns
  double entropy = 0.0;  // mean policy entropy
  double clip_fraction = 0.0;
  /// Samples whose ratio lies outside the clip range, was not the minimum
  /// term, and still produced a gradient. Zero when clipping is correct.
  std::size_t clip_leaks = 0;
};

/// Losses and their analytic gradients for fixed advantages. Gradients are
/// accumulated into `grad`, which must be shaped like `p`.
LossTerms loss_and_gradient(const PolicyParams& p, std::span<const Sample> batch,
                            std::span<const double> advantages, const PPOConfig& cfg,
                            PolicyParams* grad);

struct UpdateStats {
  LossTerms first;
  LossTerms last;
};

/// cfg.epochs plain gradient steps on the whole batch. Throws
/// std::runtime_error on a non-finite loss.
UpdateStats ppo_update(PolicyParams& p, std::span<const Sample> batch, const PPOConfig& cfg);

/// Little-endian binary: "CIMPOLCY", u32 version, u32 action count, then
/// per net u32 layer count and per layer u32 rows, u32 cols, followed by
/// rows*cols weights (row-major) and rows biases as f64.
void save_params(const std::filesystem::path& path, const PolicyParams& p);
/// Throws std::runtime_error on a corrupt file and std::invalid_argument
/// when `expected_actions` is nonzero and differs from the file.
PolicyParams load_params(const std::filesystem::path& path, std::size_t expected_actions = 0);

}  // namespace cim
