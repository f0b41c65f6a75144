#include "cim/population.hpp"

#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cim/rng.hpp"

namespace cim {

namespace {

double sample_level(Rng& rng, const std::array<double, 4>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double x = uniform01(rng) * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    x -= weights[k];
    if (x < 0.0) return kActivityLevels[k];
  }
  return kActivityLevels.back();
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Legitimate: return "legitimate";
    case Role::TipSeed: return "tip";
    case Role::FipSeed: return "fip";
  }
  return "?";
}

std::string_view to_string(Party party) { return party == Party::True ? "true" : "false"; }

Alignment classify(const Opinion& op) {
  return project(op).belief >= 0.5 ? Alignment::TrueAligned : Alignment::FalseAligned;
}

Population::Population(std::size_t n, std::uint64_t seed, const PopulationConfig& cfg)
    : cfg_(cfg) {
  if (n == 0) throw std::invalid_argument("population needs at least one user");
  if (!(cfg.prior_a >= 0.0 && cfg.prior_a <= 1.0)) {
    throw std::invalid_argument("prior base rate must lie in [0, 1]");
  }
  for (double w : cfg.level_weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("activity level weights must be nonnegative");
  }
  if (std::accumulate(cfg.level_weights.begin(), cfg.level_weights.end(), 0.0) <= 0.0) {
    throw std::invalid_argument("activity level weights must not all be zero");
  }

  Rng rng(seed);
  const Opinion initial = opinion_from_evidence(cfg.legitimate, cfg.prior_a);
  profiles_.resize(n);
  opinions_.assign(n, initial);
  frozen_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    profiles_[i].id = i;
    profiles_[i].p_read = sample_level(rng, cfg.level_weights);
    profiles_[i].p_share = sample_level(rng, cfg.level_weights);
  }
}

void Population::promote_seed(std::size_t user, Party party) {
  UserProfile& p = profiles_.at(user);
  if (p.role != Role::Legitimate) {
    throw std::logic_error("user " + std::to_string(user) + " is already a " +
                           std::string(to_string(p.role)) + " seed");
  }
  if (party == Party::True) {
    p.role = Role::TipSeed;
    opinions_[user] = opinion_from_evidence(cfg_.true_seed, 1.0);
  } else {
    p.role = Role::FipSeed;
    opinions_[user] = opinion_from_evidence(cfg_.false_seed, 0.0);
  }
  frozen_[user] = 1;
}

void Population::set_opinion(std::size_t user, const Opinion& op) {
  if (is_seed(user) || is_frozen(user)) {
    throw std::logic_error("opinion of user " + std::to_string(user) + " is immutable");
  }
  opinions_.at(user) = op;
}

void Population::freeze(std::size_t user) { frozen_.at(user) = 1; }

void Population::set_activity(std::size_t user, double p_read, double p_share) {
  profiles_.at(user).p_read = p_read;
  profiles_.at(user).p_share = p_share;
}

InfluenceCounts Population::influence_counts() const {
  InfluenceCounts c;
  for (const Opinion& op : opinions_) {
    if (classify(op) == Alignment::TrueAligned) {
      ++c.n_true;
    } else {
      ++c.n_false;
    }
  }
  return c;
}

InfluenceCounts Population::decided_counts() const {
  InfluenceCounts c;
  for (const Opinion& op : opinions_) {
    if (op.u >= cfg_.free_threshold) continue;
    if (classify(op) == Alignment::TrueAligned) {
      ++c.n_true;
    } else {
      ++c.n_false;
    }
  }
  return c;
}

std::vector<std::size_t> Population::free_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < opinions_.size(); ++i) {
    if (is_free(i)) out.push_back(i);
  }
  return out;
}

std::size_t Population::most_active_user(std::span<const std::size_t> candidates) const {
  if (candidates.empty()) throw std::invalid_argument("most_active_user: empty candidate set");
  std::size_t best = candidates.front();
  double best_score = -1.0;
  for (std::size_t c : candidates) {
    const UserProfile& p = profiles_.at(c);
    const double score = p.p_read * p.p_share;
    if (score > best_score || (score == best_score && c < best)) {
      best = c;
      best_score = score;
    }
  }
  return best;
}

void Population::write_snapshot(std::ostream& out) const {
  out << "user_id,role,p_read,p_share,b,d,u,a\n" << std::setprecision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    const UserProfile& p = profiles_[i];
    const Opinion& op = opinions_[i];
    out << i << ',' << to_string(p.role) << ',' << p.p_read << ',' << p.p_share << ','
        << op.b << ',' << op.d << ',' << op.u << ',' << op.a << '\n';
  }
}

}  // namespace cim
