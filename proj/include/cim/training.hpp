#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "cim/ppo.hpp"
#include "cim/propagation.hpp"

namespace cim {

enum class PolicyMode { Sample, Greedy };

/// Seed agent that fires the strategy chosen by a policy network.
class PolicyAgent : public SeedAgent {
 public:
  PolicyAgent(Scheme scheme, std::shared_ptr<const PolicyParams> params, PolicyMode mode,
              double value_scale = 1.0);

  Selection choose(const Episode& ep, Party party, Rng& rng) override;
  std::string name() const override { return std::string(to_string(scheme_)); }

  /// Appends one sample per decision to `sink` (returns left at zero).
  void record_into(Batch* sink) { sink_ = sink; }

  Scheme scheme() const { return scheme_; }
  std::span<const Strategy> actions() const { return actions_; }
  const PolicyParams& params() const { return *params_; }

 protected:
  /// Candidate restriction for the upcoming selection; empty for none.
  virtual std::span<const std::uint8_t> candidate_mask(const Episode&, Party) { return {}; }

 private:
  Scheme scheme_;
  std::vector<Strategy> actions_;
  std::shared_ptr<const PolicyParams> params_;
  PolicyMode mode_;
  double value_scale_;
  Batch* sink_ = nullptr;
};

using AgentFactory = std::function<std::unique_ptr<SeedAgent>()>;
using LearnerFactory =
    std::function<std::unique_ptr<PolicyAgent>(std::shared_ptr<const PolicyParams>, PolicyMode)>;

struct RolloutResult {
  Batch batch;
  /// Per episode: sum of the learner's instant rewards.
  std::vector<double> episode_rewards;
  /// Per episode: final raw true-aligned count.
  std::vector<std::size_t> final_n_true;
};

/// Plays one episode per seed with the learner sampling from `params`.
/// Episodes run in parallel; the batch is concatenated in seed order.
RolloutResult collect_rollouts(const LearnerFactory& learner, std::shared_ptr<const PolicyParams> params,
                               Party learner_party, const AgentFactory& opponent,
                               std::shared_ptr<const Graph> graph, const EpisodeConfig& env,
                               std::span<const std::uint64_t> episode_seeds, const PPOConfig& ppo);

struct LearningPoint {
  std::size_t update = 0;
  double mean_return = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<LearningPoint> curve;
};

/// Produces the batch for one update and its mean episode return.
using RolloutFn = std::function<std::pair<Batch, double>(const PolicyParams&, std::size_t update)>;

/// Generic loop: rollout, ppo_update, repeated `updates` times.
TrainResult train_policy(PolicyParams init, const PPOConfig& cfg, const RolloutFn& rollout,
                         std::size_t updates);

struct TrainSetup {
  Scheme scheme = Scheme::DrimA;
  Party party = Party::True;
  std::shared_ptr<const Graph> graph;
  EpisodeConfig env;
  PPOConfig ppo;
  std::uint64_t seed = 1;
  LearnerFactory learner;
  AgentFactory opponent;
};

/// Trains the learner against a fixed opponent for ppo.updates updates.
TrainResult train_agent(const TrainSetup& setup);
/// Same, continuing from existing parameters.
TrainResult train_agent(const TrainSetup& setup, PolicyParams init, std::size_t updates);

struct SelfPlayResult {
  TrainResult tp;
  TrainResult fp;
};

/// Alternating-freeze self-play: the true party trains `per_phase` updates
/// against the frozen false party, then the roles swap; repeated
/// `alternations` times. Frozen opponents sample from their policy.
SelfPlayResult train_self_play(const TrainSetup& tp_setup, const TrainSetup& fp_setup, std::size_t per_phase,
                               std::size_t alternations);

/// CSV: update,mean_return,entropy
void write_learning_curve(std::ostream& out, std::span<const LearningPoint> curve);

}  // namespace cim
