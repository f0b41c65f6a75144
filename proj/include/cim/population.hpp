#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cim/opinion.hpp"

namespace cim {

enum class Role : std::uint8_t { Legitimate, TipSeed, FipSeed };
enum class Party : std::uint8_t { True, False };
enum class Alignment : std::uint8_t { TrueAligned, FalseAligned, Undecided };

std::string_view to_string(Role role);
std::string_view to_string(Party party);
inline Party opponent(Party p) { return p == Party::True ? Party::False : Party::True; }

/// Reading / sharing frequencies a user can have.
inline constexpr std::array<double, 4> kActivityLevels{1.0, 0.5, 0.25, 0.1};

struct UserProfile {
  std::size_t id = 0;
  Role role = Role::Legitimate;
  double p_read = 1.0;
  double p_share = 1.0;
};

struct PopulationConfig {
  /// Base rate of every legitimate user.
  double prior_a = 0.5;
  /// Sampling weights over kActivityLevels for p_read and p_share.
  std::array<double, 4> level_weights{1.0, 1.0, 1.0, 1.0};
  Evidence legitimate{1.0, 1.0, 101.0};
  Evidence true_seed{100.0, 1.0, 2.0};
  Evidence false_seed{1.0, 100.0, 2.0};
  /// Free nodes have vacuity at or above this.
  double free_threshold = 0.5;
};

struct InfluenceCounts {
  std::size_t n_true = 0;
  std::size_t n_false = 0;
};

/// TRUE_ALIGNED iff P(b) >= 0.5, otherwise FALSE_ALIGNED. UNDECIDED is never
/// produced here; it is reserved for reports that split out undecided users.
Alignment classify(const Opinion& op);

/// Per-user roles, behaviour probabilities and opinions of one replica.
class Population {
 public:
  Population(std::size_t n, std::uint64_t seed, const PopulationConfig& cfg = {});

  std::size_t size() const { return profiles_.size(); }
  const PopulationConfig& config() const { return cfg_; }

  const UserProfile& profile(std::size_t i) const { return profiles_.at(i); }
  const Opinion& opinion(std::size_t i) const { return opinions_.at(i); }
  std::span<const Opinion> opinions() const { return opinions_; }
  std::span<const UserProfile> profiles() const { return profiles_; }

  bool is_seed(std::size_t i) const { return profiles_[i].role != Role::Legitimate; }
  bool is_frozen(std::size_t i) const { return frozen_[i] != 0; }
  bool is_free(std::size_t i) const { return opinions_[i].u >= cfg_.free_threshold; }

  /// Seed promotion. Throws std::logic_error when the user is already a seed.
  void promote_seed(std::size_t user, Party party);

  /// Replaces a legitimate, unfrozen user's opinion. Throws for seeds and
  /// frozen users, whose opinions are immutable.
  void set_opinion(std::size_t user, const Opinion& op);
  void freeze(std::size_t user);

  /// Test hooks.
  void set_activity(std::size_t user, double p_read, double p_share);

  /// Raw influence: P(b) >= 0.5 counts for the true party, P(d) > 0.5 for the
  /// false party. Always sums to size().
  InfluenceCounts influence_counts() const;
  /// Same classification restricted to users with u < free_threshold.
  InfluenceCounts decided_counts() const;

  std::vector<std::size_t> free_nodes() const;

  /// Argmax of p_read * p_share over `candidates`, lowest id on ties.
  std::size_t most_active_user(std::span<const std::size_t> candidates) const;

  /// Tabular snapshot: user_id,role,p_read,p_share,b,d,u,a
  void write_snapshot(std::ostream& out) const;

 private:
  PopulationConfig cfg_;
  std::vector<UserProfile> profiles_;
  std::vector<Opinion> opinions_;
  std::vector<std::uint8_t> frozen_;
};

}  // namespace cim
