#include "cim/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cim {

PolicyParams make_policy(std::size_t num_actions, std::size_t hidden, std::uint64_t seed) {
  if (num_actions < 1) throw std::invalid_argument("policy needs at least one action");
  Rng rng(seed);
  PolicyParams p;
  p.actor = Mlp({kStateSize, hidden, hidden, num_actions}, rng, 0.01);
  p.critic = Mlp({kStateSize, hidden, hidden, 1}, rng, 1.0);
  return p;
}

void PPOConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw std::invalid_argument("clip epsilon must lie in (0, 1)");
  if (epochs < 1 || episodes_per_update < 1 || updates < 1 || hidden < 1) {
    throw std::invalid_argument("epochs, episodes, updates and hidden width must be positive");
  }
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0) || !(value_scale > 0.0)) {
    throw std::invalid_argument("step sizes and value scale must be positive");
  }
  if (!(entropy_coef >= 0.0)) throw std::invalid_argument("entropy coefficient must be non-negative");
}

namespace {

Eigen::MatrixXd states_matrix(std::span<const Sample> batch) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kStateSize), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t k = 0; k < kStateSize; ++k) {
      x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = batch[i].state[k];
    }
  }
  return x;
}

// Column-wise log-softmax.
Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out = logits;
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    const double lse = m + std::log((logits.col(c).array() - m).exp().sum());
    out.col(c).array() -= lse;
  }
  return out;
}

void check_state(const std::array<double, kStateSize>& s) {
  for (double x : s) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite policy input");
  }
}

}  // namespace

Eigen::VectorXd policy_forward(const PolicyParams& p, const std::array<double, kStateSize>& state) {
  check_state(state);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kStateSize), 1);
  for (std::size_t k = 0; k < kStateSize; ++k) x(static_cast<Eigen::Index>(k), 0) = state[k];
  const Eigen::MatrixXd logp = log_softmax(p.actor.forward(x));
  Eigen::VectorXd probs = logp.col(0).array().exp();
  return probs / probs.sum();
}

double value_estimate(const PolicyParams& p, const std::array<double, kStateSize>& state, double value_scale) {
  check_state(state);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kStateSize), 1);
  for (std::size_t k = 0; k < kStateSize; ++k) x(static_cast<Eigen::Index>(k), 0) = state[k];
  return p.critic.forward(x)(0, 0) / value_scale;
}

std::vector<double> normalized_advantages(std::span<const Sample> batch) {
  std::vector<double> adv(batch.size());
  if (batch.empty()) return adv;
  double mean = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    adv[i] = batch[i].ret - batch[i].value;
    mean += adv[i];
  }
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / static_cast<double>(adv.size()));
  for (double& a : adv) a = sd > 1e-8 ? (a - mean) / sd : 0.0;
  return adv;
}

LossTerms loss_and_gradient(const PolicyParams& p, std::span<const Sample> batch,
                            std::span<const double> advantages, const PPOConfig& cfg, PolicyParams* grad) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (advantages.size() != batch.size()) throw std::invalid_argument("advantage count differs from batch");
  const std::size_t n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::MatrixXd x = states_matrix(batch);

  LossTerms out;

  Mlp::Cache actor_cache;
  const Eigen::MatrixXd logits = p.actor.forward(x, actor_cache);
  const Eigen::MatrixXd logp = log_softmax(logits);
  const Eigen::MatrixXd probs = logp.array().exp();
  Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());

  std::size_t clipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const auto a = static_cast<Eigen::Index>(batch[i].action);
    if (a >= logits.rows()) throw std::invalid_argument("action index exceeds the policy's action count");
    const double ratio = std::exp(logp(a, c) - batch[i].log_prob);
    const double adv = advantages[i];
    const double clipped_ratio = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    const double surr1 = ratio * adv;
    const double surr2 = clipped_ratio * adv;
    const bool outside = clipped_ratio != ratio;
    if (outside) ++clipped;

    double entropy = 0.0;
    for (Eigen::Index k = 0; k < logits.rows(); ++k) entropy -= probs(k, c) * logp(k, c);
    out.actor -= std::min(surr1, surr2) * inv_n;
    out.entropy += entropy * inv_n;

    // d(-min)/dlogp_a is -ratio*adv when the unclipped term is the minimum.
    double g = 0.0;
    if (surr1 <= surr2) g = -ratio * adv;
    if (outside && surr1 > surr2 && g != 0.0) ++out.clip_leaks;
    for (Eigen::Index k = 0; k < logits.rows(); ++k) {
      const double onehot = k == a ? 1.0 : 0.0;
      double d = g * (onehot - probs(k, c));
      d += cfg.entropy_coef * probs(k, c) * (logp(k, c) + entropy);
      dlogits(k, c) = d * inv_n;
    }
  }
  out.actor -= cfg.entropy_coef * out.entropy;
  out.clip_fraction = static_cast<double>(clipped) * inv_n;

  Mlp::Cache critic_cache;
  const Eigen::MatrixXd values = p.critic.forward(x, critic_cache);
  Eigen::MatrixXd dvalues(1, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const double err = values(0, c) - batch[i].ret * cfg.value_scale;
    out.critic += err * err * inv_n;
    dvalues(0, c) = 2.0 * err * inv_n;
  }

  if (grad != nullptr) {
    p.actor.backward(actor_cache, dlogits, grad->actor);
    p.critic.backward(critic_cache, dvalues, grad->critic);
  }
  return out;
}

UpdateStats ppo_update(PolicyParams& p, std::span<const Sample> batch, const PPOConfig& cfg) {
  cfg.validate();
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const std::vector<double> adv = normalized_advantages(batch);
  UpdateStats stats;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    PolicyParams grad{Mlp::zeros_like(p.actor), Mlp::zeros_like(p.critic)};
    const LossTerms terms = loss_and_gradient(p, batch, adv, cfg, &grad);
    if (!std::isfinite(terms.actor) || !std::isfinite(terms.critic)) {
      std::ostringstream msg;
      msg << "non-finite loss at epoch " << epoch << " (actor " << terms.actor << ", critic " << terms.critic
          << ", batch " << batch.size() << ")";
      throw std::runtime_error(msg.str());
    }
    if (epoch == 0) stats.first = terms;
    stats.last = terms;
    p.actor.axpy(-cfg.actor_lr, grad.actor);
    p.critic.axpy(-cfg.critic_lr, grad.critic);
  }
  if (!p.actor.all_finite() || !p.critic.all_finite()) throw std::runtime_error("parameters became non-finite");
  return stats;
}

}  // namespace cim
