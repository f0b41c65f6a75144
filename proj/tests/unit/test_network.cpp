#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "cim/network.hpp"

using namespace cim;

namespace {

std::shared_ptr<const Graph> make(std::size_t n, std::vector<Edge> edges) {
  return std::make_shared<const Graph>(n, edges);
}

std::shared_ptr<const Graph> star(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::uint32_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return make(leaves + 1, e);
}

std::shared_ptr<const Graph> path(std::size_t n) {
  std::vector<Edge> e;
  for (std::uint32_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make(n, e);
}

Graph parse(const std::string& text, EdgeListOptions opts = {}) {
  std::istringstream in(text);
  return load_edge_list(in, opts);
}

}  // namespace

TEST_CASE("edge list parsing") {
  Graph g = parse("1 2\n2 3\n");
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);

  g = parse("1 1\n");
  CHECK(g.num_edges() == 0);

  g = parse("% comment\n# another\n\n3 1\n1 3\n2 3 0.5\n");
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);

  g = parse("0 1\n1 2\n", {EdgeFormat::Plain, false});
  CHECK(g.num_nodes() == 3);

  g = parse("%%MatrixMarket matrix coordinate pattern symmetric\n% c\n5 5 2\n2 1\n5 3\n",
            {EdgeFormat::MatrixMarket});
  CHECK(g.num_nodes() == 5);
  CHECK(g.num_edges() == 2);

  CHECK_THROWS_AS(parse(""), std::runtime_error);
  CHECK_THROWS_AS(parse("% only\n"), std::runtime_error);
  CHECK_THROWS_AS(parse("1 x\n"), std::runtime_error);
  CHECK_THROWS_AS(parse("1 2.5\n"), std::runtime_error);
  CHECK_THROWS_AS(parse("0 1\n"), std::runtime_error);
  CHECK_THROWS_AS(parse("%%MatrixMarket\n3 3 1\n1 4\n", {EdgeFormat::MatrixMarket}), std::runtime_error);
}

TEST_CASE("bundled email network fixture") {
  const Graph g = load_edge_list_file(std::string(CIM_DATA_DIR) + "/email_surrogate.edges");
  CHECK(g.num_nodes() == 1133);
  CHECK(g.num_edges() == 5452);
  CHECK(g.max_degree() == 71);
}

TEST_CASE("masking") {
  auto g = std::make_shared<const Graph>(load_edge_list_file(std::string(CIM_DATA_DIR) + "/email_surrogate.edges"));
  CHECK(mask_network(g, 1.0, 3).visible().num_edges() == 5452);
  CHECK(mask_network(g, 0.0, 3).visible().num_edges() == 0);
  CHECK_THROWS_AS(mask_network(g, 1.5, 3), std::invalid_argument);

  const auto a = mask_network(g, 0.5, 99);
  const auto b = mask_network(g, 0.5, 99);
  CHECK(std::equal(a.visible().edges().begin(), a.visible().edges().end(), b.visible().edges().begin(),
                   b.visible().edges().end()));

  SUBCASE("visible edges are a subset of the base edges") {
    const std::set<Edge> base(g->edges().begin(), g->edges().end());
    for (const Edge& e : a.visible().edges()) CHECK(base.count(e) == 1);
  }

  SUBCASE("binomial expectation") {
    // 1000 masks at p = 0.5: the mean of 1000 Binomial(5452, 0.5) draws has
    // standard deviation sqrt(5452 * 0.25 / 1000).
    double total = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) total += static_cast<double>(mask_network(g, 0.5, s).visible().num_edges());
    const double mean = total / 1000.0;
    const double sigma = std::sqrt(5452 * 0.25 / 1000.0);
    CHECK(std::abs(mean - 2726.0) <= 3 * sigma);
  }
}

TEST_CASE("degree queries") {
  const auto s = full_view(star(4));
  CHECK(degree(s, 0) == 4);
  CHECK(degree(s, 3) == 1);
  CHECK_THROWS_AS(degree(s, 5), std::out_of_range);

  const auto iso = full_view(make(3, {{0, 1}}));
  CHECK(degree(iso, 2) == 0);
  const auto p = full_view(path(3));
  CHECK(degree(p, 1) == 2);

  std::vector<std::uint8_t> is_free{0, 1, 1, 0, 0};
  CHECK(free_degree(s, 0, is_free) == 2);
  std::vector<std::uint8_t> none(5, 0);
  CHECK(free_degree(s, 0, none) == 0);
  std::vector<std::uint8_t> all(5, 1);
  CHECK(free_degree(s, 0, all) == degree(s, 0));
}

TEST_CASE("hop neighbourhoods") {
  const auto p4 = full_view(path(4));
  CHECK(within_d_hops(p4, 0, 2) == 2);
  CHECK(within_d_hops(full_view(star(4)), 0, 2) == 4);

  // 5-cycle oracle: brute-force all-pairs hop distances.
  std::vector<Edge> cyc;
  for (std::uint32_t i = 0; i < 5; ++i) cyc.emplace_back(i, (i + 1) % 5);
  const auto c5 = full_view(make(5, cyc));
  for (std::size_t v = 0; v < 5; ++v) {
    std::size_t brute = 0;
    for (std::size_t w = 0; w < 5; ++w) {
      const std::size_t k = (w + 5 - v) % 5;
      const std::size_t dist = std::min(k, 5 - k);
      brute += (dist >= 1 && dist <= 2) ? 1 : 0;
    }
    CHECK(within_d_hops(c5, v, 2) == brute);
    CHECK(within_d_hops(c5, v, 2) == 4);
  }

  SUBCASE("d = 1 equals degree and the 2-hop cache matches BFS") {
    auto g = std::make_shared<const Graph>(load_edge_list_file(std::string(CIM_DATA_DIR) + "/email_surrogate.edges"));
    const auto view = mask_network(g, 0.7, 5);
    for (std::size_t v = 0; v < view.num_nodes(); v += 7) {
      CHECK(within_d_hops(view, v, 1) == degree(view, v));
      CHECK(within_d_hops(view.visible(), v, 2) == view.two_hop_count(v));
    }
  }
}

TEST_CASE("queries ignore hidden edges") {
  // Hiding the only edge at 0 changes every answer about node 0.
  auto g = star(4);
  ObservableGraph view(g, Graph(5, std::vector<Edge>{{0, 1}}), 0.25);
  CHECK(degree(view, 0) == 1);
  CHECK(within_d_hops(view, 0, 2) == 1);
  std::vector<std::uint8_t> all(5, 1);
  CHECK(free_degree(view, 0, all) == 1);
  CHECK(within_d_hops(view, 2, 2) == 0);
}

TEST_CASE("spectral communities") {
  SUBCASE("two disjoint triangles") {
    auto g = full_view(make(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}));
    const auto labels = spectral_communities(g, 2, 1);
    CHECK(labels[0] == labels[1]);
    CHECK(labels[1] == labels[2]);
    CHECK(labels[3] == labels[4]);
    CHECK(labels[4] == labels[5]);
    CHECK(labels[0] != labels[3]);
  }

  SUBCASE("k = 1") {
    const auto labels = spectral_communities(full_view(path(5)), 1, 1);
    CHECK(std::all_of(labels.begin(), labels.end(), [](auto l) { return l == 0; }));
  }

  SUBCASE("two bridged 10-cliques") {
    std::vector<Edge> e;
    for (std::uint32_t base : {0u, 10u}) {
      for (std::uint32_t i = 0; i < 10; ++i) {
        for (std::uint32_t j = i + 1; j < 10; ++j) e.emplace_back(base + i, base + j);
      }
    }
    e.emplace_back(9, 10);
    const Graph g(20, e);

    // Oracle: the clique split maximizes modularity over all balanced
    // two-way cuts of this graph (brute force over single-node swaps).
    auto modularity = [&](const std::vector<int>& side) {
      const double m = static_cast<double>(g.num_edges());
      double q = 0.0;
      for (std::size_t u = 0; u < 20; ++u) {
        for (std::size_t v = 0; v < 20; ++v) {
          if (side[u] != side[v]) continue;
          const auto nb = g.neighbors(u);
          const double a = std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(v)) ? 1.0 : 0.0;
          q += a - static_cast<double>(g.degree(u) * g.degree(v)) / (2 * m);
        }
      }
      return q / (2 * m);
    };
    std::vector<int> split(20, 0);
    for (int i = 10; i < 20; ++i) split[i] = 1;
    const double best = modularity(split);
    for (int i = 0; i < 10; ++i) {
      for (int j = 10; j < 20; ++j) {
        auto alt = split;
        std::swap(alt[i], alt[j]);
        CHECK(modularity(alt) < best);
      }
    }

    const auto labels = spectral_communities(g, 2, 4);
    for (int i = 1; i < 10; ++i) CHECK(labels[i] == labels[0]);
    for (int i = 11; i < 20; ++i) CHECK(labels[i] == labels[10]);
    CHECK(labels[0] != labels[10]);
  }

  SUBCASE("labels cover all nodes and are reproducible") {
    auto g = std::make_shared<const Graph>(load_edge_list_file(std::string(CIM_DATA_DIR) + "/email_surrogate.edges"));
    const auto view = full_view(g);
    const auto a = spectral_communities(view, 8, 3);
    const auto b = spectral_communities(view, 8, 3);
    CHECK(a == b);
    CHECK(a.size() == 1133);
    CHECK(*std::max_element(a.begin(), a.end()) < 8);
  }

  CHECK_THROWS_AS(spectral_communities(full_view(path(3)), 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(spectral_communities(full_view(path(3)), 4, 1), std::invalid_argument);
}
