#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cim {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Undirected, unweighted simple graph in CSR form. Edges are stored once with
/// first < second, sorted; each node's neighbours are sorted ascending.
class Graph {
 public:
  Graph() = default;
  /// Builds from arbitrary pairs: self-loops and duplicates are dropped.
  Graph(std::size_t n, std::span<const Edge> edges);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const std::uint32_t> neighbors(std::size_t v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const;

  void check_node(std::size_t v) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
};

enum class EdgeFormat { Plain, MatrixMarket };

struct EdgeListOptions {
  EdgeFormat format = EdgeFormat::Plain;
  /// Plain lists only; Matrix Market is always 1-indexed.
  bool one_indexed = true;
};

/// Parses an edge list. Lines starting with '%' or '#' are comments; extra
/// columns after the two endpoints are ignored. Throws std::runtime_error on
/// malformed lines, out-of-range indices or an empty stream.
Graph load_edge_list(std::istream& in, const EdgeListOptions& opts = {});
Graph load_edge_list_file(const std::string& path, const EdgeListOptions& opts = {});

/// The part of a graph a party can see when planning.
class ObservableGraph {
 public:
  ObservableGraph(std::shared_ptr<const Graph> base, Graph visible, double p_nv);

  const Graph& base() const { return *base_; }
  const std::shared_ptr<const Graph>& base_ptr() const { return base_; }
  const Graph& visible() const { return visible_; }
  double p_nv() const { return p_nv_; }
  std::size_t num_nodes() const { return visible_.num_nodes(); }

  /// Visible-graph size of the 2-hop neighbourhood, cached at construction.
  std::size_t two_hop_count(std::size_t v) const { return two_hop_.at(v); }

 private:
  std::shared_ptr<const Graph> base_;
  Graph visible_;
  double p_nv_;
  std::vector<std::uint32_t> two_hop_;
};

/// Keeps each edge independently with probability p_nv.
ObservableGraph mask_network(std::shared_ptr<const Graph> g, double p_nv, std::uint64_t seed);
ObservableGraph full_view(std::shared_ptr<const Graph> g);

std::size_t degree(const ObservableGraph& g, std::size_t v);
/// Visible neighbours of v flagged in `is_free` (indexed by node).
std::size_t free_degree(const ObservableGraph& g, std::size_t v, std::span<const std::uint8_t> is_free);
/// Number of distinct nodes at hop distance 1..d from v.
std::size_t within_d_hops(const Graph& g, std::size_t v, std::size_t d);
std::size_t within_d_hops(const ObservableGraph& g, std::size_t v, std::size_t d);

/// Normalized-Laplacian spectral embedding (k smallest eigenvectors, rows
/// normalized) clustered with seeded k-means++. Labels lie in [0, k).
std::vector<std::uint32_t> spectral_communities(const Graph& g, std::size_t k, std::uint64_t seed);
std::vector<std::uint32_t> spectral_communities(const ObservableGraph& g, std::size_t k,
                                                std::uint64_t seed);

/// CSV: node_id,label
void write_communities_csv(std::ostream& out, std::span<const std::uint32_t> labels);

}  // namespace cim
