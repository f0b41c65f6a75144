#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "cim/training.hpp"

namespace cim {

constexpr std::size_t kDefaultCommunities = 8;

/// STORM adapted to this environment: the PPO shell over {CF, BF}.
std::unique_ptr<PolicyAgent> storm_agent(std::shared_ptr<const PolicyParams> params, PolicyMode mode,
                                         double value_scale = 1.0);

/// STORM restricted to the community holding the most free nodes.
class CommunityPolicyAgent : public PolicyAgent {
 public:
  CommunityPolicyAgent(std::shared_ptr<const PolicyParams> params, PolicyMode mode, std::size_t communities,
                       std::uint64_t community_seed = 1, double value_scale = 1.0);

  /// Labels the episode's observable graph (memoized per graph).
  void begin_episode(const Episode& ep) override;

  std::size_t communities() const { return k_; }
  /// Community chosen for the most recent selection.
  std::uint32_t last_community() const { return last_; }

 protected:
  std::span<const std::uint8_t> candidate_mask(const Episode& ep, Party party) override;

 private:
  std::size_t k_;
  std::uint64_t community_seed_;
  std::shared_ptr<const std::vector<std::uint32_t>> labels_;
  std::vector<std::uint8_t> mask_;
  std::uint32_t last_ = 0;
};

std::unique_ptr<PolicyAgent> cstorm_agent(std::shared_ptr<const PolicyParams> params, PolicyMode mode,
                                          std::size_t communities = kDefaultCommunities,
                                          double value_scale = 1.0);

/// Community labels of an observable graph, cached by its visible edge set.
std::shared_ptr<const std::vector<std::uint32_t>> community_labels(const ObservableGraph& g, std::size_t k,
                                                                   std::uint64_t seed);

/// Learner factory for any scheme; C-STORM uses `communities`.
LearnerFactory make_learner(Scheme scheme, std::size_t communities = kDefaultCommunities,
                            double value_scale = 1.0);

}  // namespace cim
