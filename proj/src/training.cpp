#include "cim/training.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cim/parallel.hpp"

namespace cim {

PolicyAgent::PolicyAgent(Scheme scheme, std::shared_ptr<const PolicyParams> params, PolicyMode mode,
                         double value_scale)
    : scheme_(scheme), actions_(action_space(scheme)), params_(std::move(params)), mode_(mode),
      value_scale_(value_scale) {
  if (!params_) throw std::invalid_argument("policy agent needs parameters");
  if (params_->num_actions() != actions_.size()) {
    throw std::invalid_argument("policy has " + std::to_string(params_->num_actions()) + " actions but " +
                                std::string(to_string(scheme_)) + " uses " + std::to_string(actions_.size()));
  }
}

Selection PolicyAgent::choose(const Episode& ep, Party party, Rng& rng) {
  const std::array<double, kStateSize> state = ep.policy_state();
  const Eigen::VectorXd probs = policy_forward(*params_, state);

  std::size_t action = 0;
  if (mode_ == PolicyMode::Greedy) {
    for (std::size_t k = 1; k < actions_.size(); ++k) {
      if (probs[static_cast<Eigen::Index>(k)] > probs[static_cast<Eigen::Index>(action)]) action = k;
    }
  } else {
    const double u = uniform01(rng);
    double acc = 0.0;
    action = actions_.size() - 1;
    for (std::size_t k = 0; k < actions_.size(); ++k) {
      acc += probs[static_cast<Eigen::Index>(k)];
      if (u < acc) {
        action = k;
        break;
      }
    }
  }

  if (sink_ != nullptr) {
    Sample s;
    s.state = state;
    s.action = action;
    s.log_prob = std::log(probs[static_cast<Eigen::Index>(action)]);
    s.value = value_estimate(*params_, state, value_scale_);
    sink_->push_back(s);
  }

  const std::span<const std::uint8_t> mask = candidate_mask(ep, party);
  return select_with_fallback(actions_[action], ep.selection_context(party, mask), actions_, rng);
}

RolloutResult collect_rollouts(const LearnerFactory& learner, std::shared_ptr<const PolicyParams> params,
                               Party learner_party, const AgentFactory& opponent,
                               std::shared_ptr<const Graph> graph, const EpisodeConfig& env,
                               std::span<const std::uint64_t> episode_seeds, const PPOConfig& ppo) {
  const std::size_t count = episode_seeds.size();
  std::vector<Batch> batches(count);
  RolloutResult out;
  out.episode_rewards.resize(count);
  out.final_n_true.resize(count);

  parallel_for(count, [&](std::size_t e) {
    EpisodeConfig cfg = env;
    cfg.seed = episode_seeds[e];
    Episode ep(graph, cfg);
    auto me = learner(params, PolicyMode::Sample);
    auto them = opponent();
    me->record_into(&batches[e]);
    if (learner_party == Party::True) {
      run_episode(ep, *me, *them);
    } else {
      run_episode(ep, *them, *me);
    }

    std::vector<double> rewards;
    for (const RoundLog& l : ep.logs()) {
      if (l.party == learner_party) rewards.push_back(l.reward);
    }
    if (rewards.size() != batches[e].size()) throw std::logic_error("reward and decision counts differ");
    const std::vector<double> returns = discounted_returns(rewards, ppo.gamma);
    for (std::size_t k = 0; k < rewards.size(); ++k) batches[e][k].ret = returns[k];

    double total = 0.0;
    for (double r : rewards) total += r;
    out.episode_rewards[e] = total;
    out.final_n_true[e] = ep.logs().back().n_true;
  });

  for (auto& b : batches) out.batch.insert(out.batch.end(), b.begin(), b.end());
  return out;
}

TrainResult train_policy(PolicyParams init, const PPOConfig& cfg, const RolloutFn& rollout, std::size_t updates) {
  cfg.validate();
  TrainResult result{std::move(init), {}};
  for (std::size_t u = 0; u < updates; ++u) {
    auto [batch, mean_return] = rollout(result.params, u);
    const UpdateStats stats = ppo_update(result.params, batch, cfg);
    result.curve.push_back({u + 1, mean_return, stats.first.entropy});
  }
  return result;
}

TrainResult train_agent(const TrainSetup& setup) {
  return train_agent(setup, make_policy(action_space(setup.scheme).size(), setup.ppo.hidden,
                                        derive_seed(setup.seed, {0xC0FFEE})),
                     setup.ppo.updates);
}

TrainResult train_agent(const TrainSetup& setup, PolicyParams init, std::size_t updates) {
  if (!setup.graph) throw std::invalid_argument("training needs a graph");
  if (!setup.learner || !setup.opponent) throw std::invalid_argument("training needs learner and opponent");
  setup.env.validate();

  RolloutFn rollout = [&](const PolicyParams& params, std::size_t u) {
    std::vector<std::uint64_t> seeds(setup.ppo.episodes_per_update);
    for (std::size_t e = 0; e < seeds.size(); ++e) seeds[e] = derive_seed(setup.seed, {u, e});
    auto frozen = std::make_shared<const PolicyParams>(params);
    RolloutResult r = collect_rollouts(setup.learner, frozen, setup.party, setup.opponent, setup.graph,
                                       setup.env, seeds, setup.ppo);
    double mean = 0.0;
    for (double x : r.episode_rewards) mean += x;
    mean /= static_cast<double>(r.episode_rewards.size());
    return std::make_pair(std::move(r.batch), mean);
  };
  return train_policy(std::move(init), setup.ppo, rollout, updates);
}

SelfPlayResult train_self_play(const TrainSetup& tp_setup, const TrainSetup& fp_setup, std::size_t per_phase,
                               std::size_t alternations) {
  if (tp_setup.party != Party::True || fp_setup.party != Party::False) {
    throw std::invalid_argument("self-play needs a true-party and a false-party setup");
  }
  SelfPlayResult out;
  out.tp.params = make_policy(action_space(tp_setup.scheme).size(), tp_setup.ppo.hidden,
                              derive_seed(tp_setup.seed, {0xC0FFEE}));
  out.fp.params = make_policy(action_space(fp_setup.scheme).size(), fp_setup.ppo.hidden,
                              derive_seed(fp_setup.seed, {0xC0FFEE}));

  auto frozen_opponent = [](const LearnerFactory& make, const PolicyParams& p) -> AgentFactory {
    auto shared = std::make_shared<const PolicyParams>(p);
    return [make, shared] { return std::unique_ptr<SeedAgent>(make(shared, PolicyMode::Sample)); };
  };

  for (std::size_t r = 0; r < alternations; ++r) {
    for (const bool tp_turn : {true, false}) {
      TrainSetup s = tp_turn ? tp_setup : fp_setup;
      s.seed = derive_seed(s.seed, {r, tp_turn ? 1u : 2u});
      s.opponent = tp_turn ? frozen_opponent(fp_setup.learner, out.fp.params)
                           : frozen_opponent(tp_setup.learner, out.tp.params);
      TrainResult& mine = tp_turn ? out.tp : out.fp;
      TrainResult step = train_agent(s, std::move(mine.params), per_phase);
      mine.params = std::move(step.params);
      const std::size_t offset = mine.curve.size();
      for (LearningPoint p : step.curve) {
        p.update += offset;
        mine.curve.push_back(p);
      }
    }
  }
  return out;
}

void write_learning_curve(std::ostream& out, std::span<const LearningPoint> curve) {
  out << "update,mean_return,entropy\n";
  out.precision(10);
  for (const LearningPoint& p : curve) out << p.update << ',' << p.mean_return << ',' << p.entropy << '\n';
}

}  // namespace cim
