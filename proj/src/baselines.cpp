#include "cim/baselines.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace cim {

std::unique_ptr<PolicyAgent> storm_agent(std::shared_ptr<const PolicyParams> params, PolicyMode mode,
                                         double value_scale) {
  return std::make_unique<PolicyAgent>(Scheme::Storm, std::move(params), mode, value_scale);
}

namespace {

std::uint64_t edge_fingerprint(const Graph& g) {
  std::uint64_t h = splitmix64(g.num_nodes());
  for (auto [u, v] : g.edges()) h = splitmix64(h ^ ((static_cast<std::uint64_t>(u) << 32) | v));
  return h;
}

struct CacheKey {
  std::uint64_t fingerprint;
  std::size_t edges;
  std::size_t k;
  std::uint64_t seed;
  auto operator<=>(const CacheKey&) const = default;
};

std::mutex cache_mutex;
std::map<CacheKey, std::shared_ptr<const std::vector<std::uint32_t>>> cache;
constexpr std::size_t kCacheLimit = 64;

}  // namespace

std::shared_ptr<const std::vector<std::uint32_t>> community_labels(const ObservableGraph& g, std::size_t k,
                                                                   std::uint64_t seed) {
  const CacheKey key{edge_fingerprint(g.visible()), g.visible().num_edges(), k, seed};
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto labels = std::make_shared<const std::vector<std::uint32_t>>(spectral_communities(g, k, seed));
  std::lock_guard lock(cache_mutex);
  if (cache.size() >= kCacheLimit) cache.clear();
  cache.emplace(key, labels);
  return labels;
}

CommunityPolicyAgent::CommunityPolicyAgent(std::shared_ptr<const PolicyParams> params, PolicyMode mode,
                                           std::size_t communities, std::uint64_t community_seed,
                                           double value_scale)
    : PolicyAgent(Scheme::CStorm, std::move(params), mode, value_scale), k_(communities),
      community_seed_(community_seed) {
  if (k_ < 1) throw std::invalid_argument("community count must be at least 1");
}

void CommunityPolicyAgent::begin_episode(const Episode& ep) {
  const std::size_t k = std::min(k_, ep.observable().num_nodes());
  labels_ = community_labels(ep.observable(), k, community_seed_);
}

std::span<const std::uint8_t> CommunityPolicyAgent::candidate_mask(const Episode& ep, Party) {
  if (!labels_) begin_episode(ep);
  const Population& pop = ep.population();
  const auto& labels = *labels_;

  std::vector<std::size_t> free_count(k_, 0);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (pop.is_free(v) && !pop.is_seed(v)) ++free_count[labels[v]];
  }
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < free_count.size(); ++c) {
    if (free_count[c] > free_count[best]) best = c;
  }
  last_ = best;

  mask_.assign(labels.size(), 0);
  for (std::size_t v = 0; v < labels.size(); ++v) mask_[v] = labels[v] == best ? 1 : 0;
  return mask_;
}

std::unique_ptr<PolicyAgent> cstorm_agent(std::shared_ptr<const PolicyParams> params, PolicyMode mode,
                                          std::size_t communities, double value_scale) {
  return std::make_unique<CommunityPolicyAgent>(std::move(params), mode, communities, 1, value_scale);
}

LearnerFactory make_learner(Scheme scheme, std::size_t communities, double value_scale) {
  return [=](std::shared_ptr<const PolicyParams> params, PolicyMode mode) -> std::unique_ptr<PolicyAgent> {
    switch (scheme) {
      case Scheme::Storm:
        return storm_agent(std::move(params), mode, value_scale);
      case Scheme::CStorm:
        return cstorm_agent(std::move(params), mode, communities, value_scale);
      case Scheme::DrimA:
      case Scheme::DrimNA:
        break;
    }
    return std::make_unique<PolicyAgent>(scheme, std::move(params), mode, value_scale);
  };
}

}  // namespace cim
