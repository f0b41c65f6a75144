#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cim/network.hpp"
#include "cim/population.hpp"
#include "cim/rng.hpp"

namespace cim {

enum class Strategy : std::uint8_t { AF, BF, SGF, CF, Random };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Seed-selection schemes compared by the harness.
enum class Scheme : std::uint8_t { DrimA, DrimNA, Storm, CStorm };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Ordered action set of a scheme. The order is the policy's output order.
std::vector<Strategy> action_space(Scheme scheme);

/// Everything a selection rule may look at.
struct SelectionContext {
  const Population& population;
  const ObservableGraph& graph;
  Party party;
  /// Optional candidate restriction indexed by node; empty means no restriction.
  std::span<const std::uint8_t> allowed = {};
};

/// Applies one deterministic rule (not Random). Returns nullopt when the rule
/// has no candidate. Ties go to the lowest id.
std::optional<std::size_t> select_seed(Strategy kind, const SelectionContext& ctx);

/// Uniform draw of a strategy from the action set.
Strategy draw_strategy(std::span<const Strategy> action_set, Rng& rng);

struct Selection {
  std::size_t user = 0;
  Strategy requested = Strategy::CF;
  /// Rule that produced `user`; differs from `requested` after a fallback or
  /// when Random resolved to a concrete rule.
  Strategy fired = Strategy::CF;
  bool fallback = false;
};

/// Resolves Random, applies the rule and falls back SGF -> CF -> lowest-id
/// free node, first inside `ctx.allowed` and then without the restriction.
/// Throws std::runtime_error when no user is selectable at all.
Selection select_with_fallback(Strategy kind, const SelectionContext& ctx,
                               std::span<const Strategy> action_set, Rng& rng);

}  // namespace cim
