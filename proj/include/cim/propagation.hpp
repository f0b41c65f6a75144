#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cim/network.hpp"
#include "cim/opinion.hpp"
#include "cim/population.hpp"
#include "cim/rng.hpp"
#include "cim/strategies.hpp"

namespace cim {

struct EpisodeConfig {
  std::size_t rounds = 50;
  /// Propagation waves per round for the true / false party.
  std::size_t tp_waves = 2;
  std::size_t fp_waves = 1;
  TrustModel model{};
  double p_nv = 1.0;
  std::uint64_t seed = 1;
  /// Spread over the masked graph instead of the full one.
  bool propagate_on_masked = false;
  /// Waves start only from the newest seed instead of the whole seed set.
  bool newest_seed_only = false;
  /// State uses degree into the free set instead of full visible degree.
  bool state_uses_free_degree = false;
  PopulationConfig population{};

  void validate() const;
};

/// One party-step of an episode.
struct RoundLog {
  std::size_t round = 0;  // 1-based
  std::size_t step = 0;   // 1-based; false party odd, true party even
  Party party = Party::False;
  Strategy strategy = Strategy::CF;
  Strategy fired = Strategy::CF;
  bool fallback = false;
  std::size_t seed = 0;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
  std::size_t decided_true = 0;
  std::size_t decided_false = 0;
  double reward = 0.0;
};

/// Raw state counts: edges among free nodes and the largest free-node degree.
struct StateCounts {
  std::size_t free_edges = 0;
  std::size_t max_free_degree = 0;
};

/// One information wave from `sources` over `g`. Visited users read with
/// p_read; readers fuse every sharing neighbour's opinion (ascending sender
/// id) and then share with p_share. Sources share with their own p_share.
/// Seeds never receive and frozen users never update. Each user is processed
/// at most once.
void propagate_wave(Population& pop, const Graph& g, std::span<const std::size_t> sources,
                    const TrustModel& model, Rng& rng);

StateCounts extract_state(const Population& pop, const ObservableGraph& g,
                          bool use_free_degree = false);

/// Instant reward of `party` at 1-based step t from a per-step count series
/// (`counts[t]` is the party's aligned count after step t, counts[0] the
/// baseline). The false party acts on odd steps and the true party on even.
double instant_reward(std::span<const std::size_t> counts, Party party, std::size_t t);

/// sum_{t >= start} gamma^(t - start + 1) * rewards[t]; 0 for an empty tail.
double discounted_return(std::span<const double> rewards, std::size_t start, double gamma);

/// All per-step discounted returns of a reward sequence.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

class Episode;

/// Something that picks a seed for a party.
class SeedAgent {
 public:
  virtual ~SeedAgent() = default;
  virtual void begin_episode(const Episode&) {}
  virtual Selection choose(const Episode& ep, Party party, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

/// Fixed heuristic, or Random over an action set.
class HeuristicAgent : public SeedAgent {
 public:
  explicit HeuristicAgent(Strategy kind, std::vector<Strategy> random_set = action_space(Scheme::DrimA));
  Selection choose(const Episode& ep, Party party, Rng& rng) override;
  std::string name() const override { return std::string(to_string(kind_)); }

 private:
  Strategy kind_;
  std::vector<Strategy> random_set_;
};

/// Mutable state of one k-round game.
class Episode {
 public:
  Episode(std::shared_ptr<const Graph> graph, const EpisodeConfig& cfg);

  const EpisodeConfig& config() const { return cfg_; }
  const Graph& graph() const { return *graph_; }
  const ObservableGraph& observable() const { return observable_; }
  const Population& population() const { return population_; }
  std::span<const std::size_t> seeds(Party p) const {
    return p == Party::True ? tp_seeds_ : fp_seeds_;
  }
  std::span<const RoundLog> logs() const { return logs_; }

  /// Steps taken so far; the next step is step() + 1.
  std::size_t step() const { return logs_.size(); }
  bool done() const { return step() >= 2 * cfg_.rounds; }
  /// Party due to act next.
  Party next_party() const { return step() % 2 == 0 ? Party::False : Party::True; }

  StateCounts state() const;
  /// State divided by its episode-start value, in [0, 1].
  std::array<double, 2> policy_state() const;

  SelectionContext selection_context(Party party, std::span<const std::uint8_t> allowed = {}) const {
    return {population_, observable_, party, allowed};
  }

  /// Promotes the selected user, runs the party's waves, logs the step and
  /// returns its instant reward. Throws std::logic_error out of turn.
  double commit(Party party, const Selection& sel);

  /// Asks the agent for a selection and commits it.
  const RoundLog& play(Party party, SeedAgent& agent);

  /// Decided aligned counts per step (index 0 = before any seed).
  std::span<const std::size_t> decided_series(Party p) const {
    return p == Party::True ? decided_true_ : decided_false_;
  }

  Rng& agent_rng() { return agent_rng_; }
  Population& mutable_population() { return population_; }

 private:
  EpisodeConfig cfg_;
  std::shared_ptr<const Graph> graph_;
  ObservableGraph observable_;
  Population population_;
  Rng wave_rng_;
  Rng agent_rng_;
  std::vector<std::size_t> tp_seeds_;
  std::vector<std::size_t> fp_seeds_;
  std::vector<RoundLog> logs_;
  std::vector<std::size_t> decided_true_;
  std::vector<std::size_t> decided_false_;
  StateCounts initial_state_;
};

/// One round: the false party selects and spreads first, then the true party.
std::array<RoundLog, 2> run_round(Episode& ep, SeedAgent& tp_agent, SeedAgent& fp_agent);

/// Plays the episode to the end.
void run_episode(Episode& ep, SeedAgent& tp_agent, SeedAgent& fp_agent);

/// CSV: episode,t,party,strategy,seed_id,n_true,n_false,reward
void write_round_log_header(std::ostream& out);
void write_round_logs(std::ostream& out, std::size_t episode, std::span<const RoundLog> logs);

}  // namespace cim
