#include "cim/strategies.hpp"

#include <stdexcept>
#include <string>

namespace cim {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::AF: return "af";
    case Strategy::BF: return "bf";
    case Strategy::SGF: return "sgf";
    case Strategy::CF: return "cf";
    case Strategy::Random: return "random";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "af") return Strategy::AF;
  if (name == "bf") return Strategy::BF;
  if (name == "sgf") return Strategy::SGF;
  if (name == "cf") return Strategy::CF;
  if (name == "random") return Strategy::Random;
  throw std::invalid_argument("unknown strategy: " + std::string(name));
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::DrimA: return "drim-a";
    case Scheme::DrimNA: return "drim-na";
    case Scheme::Storm: return "storm";
    case Scheme::CStorm: return "cstorm";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "drim-a") return Scheme::DrimA;
  if (name == "drim-na") return Scheme::DrimNA;
  if (name == "storm") return Scheme::Storm;
  if (name == "cstorm" || name == "c-storm") return Scheme::CStorm;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

std::vector<Strategy> action_space(Scheme scheme) {
  switch (scheme) {
    case Scheme::DrimA: return {Strategy::AF, Strategy::BF, Strategy::SGF, Strategy::CF};
    case Scheme::DrimNA: return {Strategy::BF, Strategy::SGF, Strategy::CF};
    case Scheme::Storm:
    case Scheme::CStorm: return {Strategy::CF, Strategy::BF};
  }
  return {};
}

namespace {

bool eligible(const SelectionContext& ctx, std::size_t v) {
  if (ctx.population.is_seed(v)) return false;
  return ctx.allowed.empty() || ctx.allowed[v] != 0;
}

// Argmax of score over eligible nodes; strict '>' keeps the lowest id on ties.
template <typename Score>
std::optional<std::size_t> argmax_eligible(const SelectionContext& ctx, Score score) {
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t v = 0; v < ctx.population.size(); ++v) {
    if (!eligible(ctx, v)) continue;
    const double s = score(v);
    if (!best || s > best_score) {
      best = v;
      best_score = s;
    }
  }
  return best;
}

bool opponent_aligned(const Opinion& op, Party self) {
  const Projection p = project(op);
  return self == Party::True ? p.disbelief > 0.5 : p.belief > 0.5;
}

std::optional<std::size_t> blocking_first(const SelectionContext& ctx) {
  const Population& pop = ctx.population;
  const Graph& g = ctx.graph.visible();
  const std::size_t n = pop.size();

  std::vector<std::uint8_t> is_free(n, 0);
  for (std::size_t v = 0; v < n; ++v) is_free[v] = pop.is_free(v) ? 1 : 0;

  std::vector<std::uint8_t> candidate(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!opponent_aligned(pop.opinion(v), ctx.party)) continue;
    for (std::uint32_t w : g.neighbors(v)) candidate[w] = 1;
  }

  std::optional<std::size_t> best;
  std::size_t best_score = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!candidate[v] || !eligible(ctx, v)) continue;
    const std::size_t s = free_degree(ctx.graph, v, is_free);
    if (!best || s > best_score) {
      best = v;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

std::optional<std::size_t> select_seed(Strategy kind, const SelectionContext& ctx) {
  const Population& pop = ctx.population;
  const ObservableGraph& g = ctx.graph;
  switch (kind) {
    case Strategy::AF:
      return argmax_eligible(ctx, [&](std::size_t v) {
        const UserProfile& p = pop.profile(v);
        return p.p_read * p.p_share;
      });
    case Strategy::BF:
      return blocking_first(ctx);
    case Strategy::SGF:
      return argmax_eligible(ctx, [&](std::size_t v) { return static_cast<double>(g.two_hop_count(v)); });
    case Strategy::CF:
      return argmax_eligible(ctx, [&](std::size_t v) { return static_cast<double>(g.visible().degree(v)); });
    case Strategy::Random:
      throw std::invalid_argument("select_seed: resolve Random with draw_strategy first");
  }
  return std::nullopt;
}

Strategy draw_strategy(std::span<const Strategy> action_set, Rng& rng) {
  if (action_set.empty()) throw std::invalid_argument("empty action set");
  return action_set[uniform_index(rng, action_set.size())];
}

Selection select_with_fallback(Strategy kind, const SelectionContext& ctx,
                               std::span<const Strategy> action_set, Rng& rng) {
  Selection sel;
  sel.requested = kind;
  const Strategy concrete = kind == Strategy::Random ? draw_strategy(action_set, rng) : kind;

  auto attempt = [&](const SelectionContext& c) -> bool {
    if (auto v = select_seed(concrete, c)) {
      sel.user = *v;
      sel.fired = concrete;
      return true;
    }
    for (Strategy fb : {Strategy::SGF, Strategy::CF}) {
      if (auto v = select_seed(fb, c)) {
        sel.user = *v;
        sel.fired = fb;
        sel.fallback = true;
        return true;
      }
    }
    for (std::size_t v = 0; v < c.population.size(); ++v) {
      if (c.population.is_free(v) && eligible(c, v)) {
        sel.user = v;
        sel.fired = concrete;
        sel.fallback = true;
        return true;
      }
    }
    return false;
  };

  if (attempt(ctx)) return sel;
  if (!ctx.allowed.empty()) {
    SelectionContext open{ctx.population, ctx.graph, ctx.party, {}};
    if (attempt(open)) return sel;
  }
  throw std::runtime_error("no selectable user remains");
}

}  // namespace cim
