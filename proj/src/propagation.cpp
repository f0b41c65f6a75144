#include "cim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cim {

void EpisodeConfig::validate() const {
  if (rounds < 1) throw std::invalid_argument("episode needs at least one round");
  if (tp_waves < 1 || fp_waves < 1) throw std::invalid_argument("each party propagates at least once");
  if (!(p_nv >= 0.0 && p_nv <= 1.0)) throw std::invalid_argument("p_nv must lie in [0, 1]");
  for (double x : {model.xi, model.t_d, model.t_u}) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("opinion thresholds must lie in [0, 1]");
  }
}

namespace {

// Receiver-side update for one incoming opinion.
void receive(Population& pop, std::size_t i, const Opinion& sender, const TrustModel& model) {
  if (pop.is_frozen(i)) return;
  Opinion own = apply_uom_refresh(pop.opinion(i), model);
  if (own.u <= model.t_u) {
    pop.freeze(i);
    return;
  }
  const double c = trust_coefficient(model, own, sender);
  pop.set_opinion(i, fuse(own, sender, c));
}

}  // namespace

void propagate_wave(Population& pop, const Graph& g, std::span<const std::size_t> sources,
                    const TrustModel& model, Rng& rng) {
  const std::size_t n = pop.size();
  if (g.num_nodes() != n) throw std::invalid_argument("graph and population sizes differ");

  std::vector<std::uint8_t> visited(n, 0);
  for (std::size_t v = 0; v < n; ++v) visited[v] = pop.is_seed(v) ? 1 : 0;

  std::vector<std::uint32_t> frontier;
  for (std::size_t s : sources) {
    if (bernoulli(rng, pop.profile(s).p_share)) frontier.push_back(static_cast<std::uint32_t>(s));
  }
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());

  // (receiver, sender) pairs of the next level.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> inbox;
  std::vector<std::uint32_t> next;
  while (!frontier.empty()) {
    inbox.clear();
    for (std::uint32_t s : frontier) {
      for (std::uint32_t w : g.neighbors(s)) {
        if (!visited[w]) inbox.emplace_back(w, s);
      }
    }
    // Stable: senders stay ascending within each receiver.
    std::stable_sort(inbox.begin(), inbox.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [w, s] : inbox) visited[w] = 1;

    next.clear();
    for (std::size_t k = 0; k < inbox.size();) {
      const std::uint32_t w = inbox[k].first;
      std::size_t end = k;
      while (end < inbox.size() && inbox[end].first == w) ++end;

      const UserProfile& prof = pop.profile(w);
      if (bernoulli(rng, prof.p_read)) {
        for (std::size_t m = k; m < end; ++m) receive(pop, w, pop.opinion(inbox[m].second), model);
        if (bernoulli(rng, prof.p_share)) next.push_back(w);
      }
      k = end;
    }
    frontier.swap(next);
  }
}

StateCounts extract_state(const Population& pop, const ObservableGraph& g, bool use_free_degree) {
  const Graph& vis = g.visible();
  StateCounts s;
  for (auto [u, v] : vis.edges()) {
    if (pop.is_free(u) && pop.is_free(v)) ++s.free_edges;
  }
  for (std::size_t v = 0; v < pop.size(); ++v) {
    if (!pop.is_free(v)) continue;
    std::size_t d = 0;
    if (use_free_degree) {
      for (std::uint32_t w : vis.neighbors(v)) d += pop.is_free(w) ? 1 : 0;
    } else {
      d = vis.degree(v);
    }
    s.max_free_degree = std::max(s.max_free_degree, d);
  }
  return s;
}

double instant_reward(std::span<const std::size_t> counts, Party party, std::size_t t) {
  const std::size_t first = party == Party::False ? 1 : 2;
  if (t < first) throw std::out_of_range("no reward before the party's first step");
  if ((t % 2 == 1) != (party == Party::False)) {
    throw std::invalid_argument("step " + std::to_string(t) + " does not belong to the " +
                                std::string(to_string(party)) + " party");
  }
  if (t >= counts.size()) throw std::out_of_range("step beyond recorded counts");
  const std::size_t back = t >= 2 ? t - 2 : t - 1;
  return static_cast<double>(counts[t]) - static_cast<double>(counts[back]);
}

double discounted_return(std::span<const double> rewards, std::size_t start, double gamma) {
  double total = 0.0;
  double factor = gamma;
  for (std::size_t t = start; t < rewards.size(); ++t) {
    total += factor * rewards[t];
    factor *= gamma;
  }
  return total;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  // R_T = gamma * (r_T + R_{T+1} / gamma) = gamma * r_T + gamma * R_{T+1}
  std::vector<double> out(rewards.size(), 0.0);
  double acc = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = gamma * (rewards[t] + acc);
    out[t] = acc;
  }
  return out;
}

HeuristicAgent::HeuristicAgent(Strategy kind, std::vector<Strategy> random_set)
    : kind_(kind), random_set_(std::move(random_set)) {}

Selection HeuristicAgent::choose(const Episode& ep, Party party, Rng& rng) {
  return select_with_fallback(kind_, ep.selection_context(party), random_set_, rng);
}

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) { return derive_seed(seed, {tag}); }

ObservableGraph make_view(const std::shared_ptr<const Graph>& g, const EpisodeConfig& cfg) {
  cfg.validate();
  return mask_network(g, cfg.p_nv, sub_seed(cfg.seed, 1));
}

}  // namespace

Episode::Episode(std::shared_ptr<const Graph> graph, const EpisodeConfig& cfg)
    : cfg_(cfg),
      graph_(std::move(graph)),
      observable_(make_view(graph_, cfg)),
      population_(graph_->num_nodes(), sub_seed(cfg.seed, 2), cfg.population),
      wave_rng_(sub_seed(cfg.seed, 3)),
      agent_rng_(sub_seed(cfg.seed, 4)) {
  const InfluenceCounts d = population_.decided_counts();
  decided_true_.push_back(d.n_true);
  decided_false_.push_back(d.n_false);
  initial_state_ = state();
}

StateCounts Episode::state() const {
  return extract_state(population_, observable_, cfg_.state_uses_free_degree);
}

std::array<double, 2> Episode::policy_state() const {
  const StateCounts s = state();
  const double e0 = initial_state_.free_edges > 0 ? static_cast<double>(initial_state_.free_edges) : 1.0;
  const double d0 = initial_state_.max_free_degree > 0 ? static_cast<double>(initial_state_.max_free_degree) : 1.0;
  return {std::min(1.0, static_cast<double>(s.free_edges) / e0),
          std::min(1.0, static_cast<double>(s.max_free_degree) / d0)};
}

double Episode::commit(Party party, const Selection& sel) {
  if (done()) throw std::logic_error("episode already finished");
  if (party != next_party()) throw std::logic_error("party acted out of turn");

  population_.promote_seed(sel.user, party);
  auto& own = party == Party::True ? tp_seeds_ : fp_seeds_;
  own.push_back(sel.user);

  const Graph& spread = cfg_.propagate_on_masked ? observable_.visible() : *graph_;
  const std::size_t waves = party == Party::True ? cfg_.tp_waves : cfg_.fp_waves;
  std::span<const std::size_t> sources = own;
  if (cfg_.newest_seed_only) sources = sources.last(1);
  for (std::size_t w = 0; w < waves; ++w) {
    propagate_wave(population_, spread, sources, cfg_.model, wave_rng_);
  }

  const InfluenceCounts raw = population_.influence_counts();
  const InfluenceCounts dec = population_.decided_counts();
  decided_true_.push_back(dec.n_true);
  decided_false_.push_back(dec.n_false);

  RoundLog log;
  log.step = logs_.size() + 1;
  log.round = (log.step + 1) / 2;
  log.party = party;
  log.strategy = sel.requested;
  log.fired = sel.fired;
  log.fallback = sel.fallback;
  log.seed = sel.user;
  log.n_true = raw.n_true;
  log.n_false = raw.n_false;
  log.decided_true = dec.n_true;
  log.decided_false = dec.n_false;
  log.reward = instant_reward(decided_series(party), party, log.step);
  logs_.push_back(log);
  return log.reward;
}

const RoundLog& Episode::play(Party party, SeedAgent& agent) {
  const Selection sel = agent.choose(*this, party, agent_rng_);
  commit(party, sel);
  return logs_.back();
}

std::array<RoundLog, 2> run_round(Episode& ep, SeedAgent& tp_agent, SeedAgent& fp_agent) {
  if (ep.done()) throw std::logic_error("episode already finished");
  if (ep.next_party() != Party::False) throw std::logic_error("round must start with the false party");
  std::array<RoundLog, 2> out;
  out[0] = ep.play(Party::False, fp_agent);
  out[1] = ep.play(Party::True, tp_agent);
  return out;
}

void run_episode(Episode& ep, SeedAgent& tp_agent, SeedAgent& fp_agent) {
  tp_agent.begin_episode(ep);
  if (&fp_agent != &tp_agent) fp_agent.begin_episode(ep);
  while (!ep.done()) run_round(ep, tp_agent, fp_agent);
}

void write_round_log_header(std::ostream& out) {
  out << "episode,t,party,strategy,seed_id,n_true,n_false,reward,fired,fallback,decided_true,"
         "decided_false\n";
}

void write_round_logs(std::ostream& out, std::size_t episode, std::span<const RoundLog> logs) {
  for (const RoundLog& l : logs) {
    out << episode << ',' << l.step << ',' << to_string(l.party) << ',' << to_string(l.strategy)
        << ',' << l.seed << ',' << l.n_true << ',' << l.n_false << ',' << l.reward << ','
        << to_string(l.fired) << ',' << (l.fallback ? 1 : 0) << ',' << l.decided_true << ','
        << l.decided_false << '\n';
  }
}

}  // namespace cim
