#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>

#include "cim/strategies.hpp"

using namespace cim;

namespace {

std::shared_ptr<const Graph> star(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::uint32_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return std::make_shared<const Graph>(leaves + 1, e);
}

std::shared_ptr<const Graph> path(std::size_t n) {
  std::vector<Edge> e;
  for (std::uint32_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return std::make_shared<const Graph>(n, e);
}

}  // namespace

TEST_CASE("action spaces") {
  const auto a = action_space(Scheme::DrimA);
  CHECK(a.size() == 4);
  CHECK(a[0] == Strategy::AF);
  CHECK(action_space(Scheme::DrimNA).size() == 3);
  CHECK(action_space(Scheme::Storm).size() == 2);
  CHECK(parse_strategy("sgf") == Strategy::SGF);
  CHECK(to_string(Strategy::Random) == "random");
  CHECK_THROWS_AS(parse_strategy("drl"), std::invalid_argument);
}

TEST_CASE("centrality first picks the hub") {
  const auto view = full_view(star(4));
  Population pop(5, 1);
  CHECK(select_seed(Strategy::CF, {pop, view, Party::True}) == 0u);
  pop.promote_seed(0, Party::False);
  // Hub taken: all leaves tie on degree 1, lowest id wins.
  CHECK(select_seed(Strategy::CF, {pop, view, Party::True}) == 1u);
}

TEST_CASE("subgreedy first on a path") {
  // Brute-force 2-hop counts on a-b-c-d-e: 2, 3, 4, 3, 2.
  const auto view = full_view(path(5));
  Population pop(5, 1);
  CHECK(select_seed(Strategy::SGF, {pop, view, Party::True}) == 2u);
}

TEST_CASE("active first") {
  const auto view = full_view(path(4));
  Population pop(4, 1);
  for (std::size_t i = 0; i < 4; ++i) pop.set_activity(i, 0.25, 0.25);
  pop.set_activity(2, 1.0, 1.0);
  pop.set_activity(3, 1.0, 1.0);
  CHECK(select_seed(Strategy::AF, {pop, view, Party::False}) == 2u);
  pop.promote_seed(2, Party::True);
  CHECK(select_seed(Strategy::AF, {pop, view, Party::False}) == 3u);
}

TEST_CASE("blocking first") {
  SUBCASE("opponent seed at a star centre") {
    const auto view = full_view(star(4));
    Population pop(5, 1);
    pop.promote_seed(0, Party::False);
    // Leaves are the only candidates; each has free degree 0.
    CHECK(select_seed(Strategy::BF, {pop, view, Party::True}) == 1u);
  }

  SUBCASE("prefers the candidate with most free neighbours") {
    // 0 - 1 - 2 - 3, and 1 - 4, 1 - 5; opponent seed at 0.
    auto g = std::make_shared<const Graph>(6, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {1, 4}, {1, 5}});
    const auto view = full_view(g);
    Population pop(6, 1);
    pop.promote_seed(0, Party::True);
    CHECK(select_seed(Strategy::BF, {pop, view, Party::False}) == 1u);
  }

  SUBCASE("no opponent-aligned node means no candidate") {
    const auto view = full_view(star(3));
    Population pop(4, 1);
    CHECK_FALSE(select_seed(Strategy::BF, {pop, view, Party::True}).has_value());
    Rng rng(1);
    const auto all = action_space(Scheme::DrimA);
    const Selection sel = select_with_fallback(Strategy::BF, {pop, view, Party::True}, all, rng);
    CHECK(sel.fallback);
    CHECK(sel.fired == Strategy::SGF);
    CHECK(sel.user == 0);
  }

  SUBCASE("undecided a = 0.5 users are not treated as aligned") {
    const auto view = full_view(star(3));
    Population pop(4, 1);
    pop.set_opinion(0, {0.0, 0.0, 1.0, 0.5});
    CHECK_FALSE(select_seed(Strategy::BF, {pop, view, Party::False}).has_value());
  }
}

TEST_CASE("selection never returns a seed") {
  const auto view = full_view(path(6));
  Population pop(6, 1);
  Rng rng(3);
  const auto all = action_space(Scheme::DrimA);
  for (int k = 0; k < 6; ++k) {
    const Party party = k % 2 == 0 ? Party::False : Party::True;
    const Selection sel = select_with_fallback(Strategy::Random, {pop, view, party}, all, rng);
    CHECK_FALSE(pop.is_seed(sel.user));
    pop.promote_seed(sel.user, party);
  }
  CHECK_THROWS_AS(select_with_fallback(Strategy::CF, {pop, view, Party::True}, all, rng), std::runtime_error);
}

TEST_CASE("restricted candidate pools") {
  const auto view = full_view(star(4));
  Population pop(5, 1);
  std::vector<std::uint8_t> allowed{0, 0, 0, 1, 1};
  CHECK(select_seed(Strategy::CF, {pop, view, Party::True, allowed}) == 3u);
  std::vector<std::uint8_t> none(5, 0);
  Rng rng(1);
  const auto all = action_space(Scheme::DrimA);
  // An empty restriction falls back to the unrestricted pool.
  CHECK(select_with_fallback(Strategy::CF, {pop, view, Party::True, none}, all, rng).user == 0u);
}

TEST_CASE("random picks strategies uniformly") {
  Rng rng(42);
  const auto all = action_space(Scheme::DrimA);
  std::map<Strategy, int> hits;
  const int draws = 40000;
  for (int k = 0; k < draws; ++k) ++hits[draw_strategy(all, rng)];
  const double sigma = std::sqrt(draws * 0.25 * 0.75);
  for (Strategy s : all) CHECK(std::abs(hits[s] - draws / 4) <= 3 * sigma);
}

TEST_CASE("selection is deterministic") {
  auto g = std::make_shared<const Graph>(load_edge_list_file(std::string(CIM_DATA_DIR) + "/email_surrogate.edges"));
  const auto view = full_view(g);
  Population pop(g->num_nodes(), 9);
  const auto all = action_space(Scheme::DrimA);
  Rng r1(5), r2(5);
  for (int k = 0; k < 20; ++k) {
    const auto a = select_with_fallback(Strategy::Random, {pop, view, Party::True}, all, r1);
    const auto b = select_with_fallback(Strategy::Random, {pop, view, Party::True}, all, r2);
    CHECK(a.user == b.user);
    CHECK(a.fired == b.fired);
  }
}
