#include "cim/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cim/rng.hpp"

namespace cim {

Graph::Graph(std::size_t n, std::span<const Edge> edges) {
  edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::out_of_range("edge endpoint outside node range");
    if (u == v) continue;
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  offsets_.assign(n + 1, 0);
  for (auto [u, v] : edges_) {
    ++offsets_[u + 1];
    ++offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  targets_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (auto [u, v] : edges_) {
    targets_[cursor[u]++] = v;
    targets_[cursor[v]++] = u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(targets_.begin() + offsets_[i], targets_.begin() + offsets_[i + 1]);
  }
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v < num_nodes(); ++v) best = std::max(best, degree(v));
  return best;
}

void Graph::check_node(std::size_t v) const {
  if (v >= num_nodes()) {
    throw std::out_of_range("node " + std::to_string(v) + " outside graph of " +
                            std::to_string(num_nodes()) + " nodes");
  }
}

namespace {

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

bool is_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t");
  return pos != std::string::npos && (line[pos] == '%' || line[pos] == '#');
}

// Reads the leading integers of a line; returns how many were parsed.
std::size_t read_ints(const std::string& line, long long* out, std::size_t want) {
  std::size_t got = 0;
  const char* p = line.data();
  const char* end = p + line.size();
  while (got < want) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
    if (p == end) break;
    auto [next, ec] = std::from_chars(p, end, out[got]);
    if (ec != std::errc{}) break;
    if (next < end && *next != ' ' && *next != '\t' && *next != ',' && *next != '\r') {
      // e.g. "3.5": the token is not an integer.
      break;
    }
    p = next;
    ++got;
  }
  return got;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("edge list line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Graph load_edge_list(std::istream& in, const EdgeListOptions& opts) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  long long declared_n = -1;
  const bool mm = opts.format == EdgeFormat::MatrixMarket;
  const long long base = (mm || opts.one_indexed) ? 1 : 0;
  bool saw_size_line = false;
  long long max_index = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line) || is_comment(line)) continue;

    if (mm && !saw_size_line) {
      long long dims[3];
      if (read_ints(line, dims, 3) != 3) parse_error(line_no, "expected 'rows cols entries'");
      declared_n = std::max(dims[0], dims[1]);
      saw_size_line = true;
      continue;
    }

    long long uv[2];
    if (read_ints(line, uv, 2) != 2) parse_error(line_no, "expected two integer node ids");
    const long long u = uv[0] - base;
    const long long v = uv[1] - base;
    if (u < 0 || v < 0) parse_error(line_no, "node id below index base " + std::to_string(base));
    if (declared_n >= 0 && (u >= declared_n || v >= declared_n)) {
      parse_error(line_no, "node id exceeds declared size " + std::to_string(declared_n));
    }
    if (std::max(u, v) >= std::numeric_limits<std::uint32_t>::max()) {
      parse_error(line_no, "node id too large");
    }
    max_index = std::max({max_index, u, v});
    edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
  }

  if (mm && !saw_size_line) throw std::runtime_error("edge list is empty");
  const long long n = declared_n >= 0 ? declared_n : max_index + 1;
  if (n <= 0) throw std::runtime_error("edge list is empty");
  return Graph(static_cast<std::size_t>(n), edges);
}

Graph load_edge_list_file(const std::string& path, const EdgeListOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return load_edge_list(in, opts);
}

namespace {

std::vector<std::uint32_t> all_two_hop_counts(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> counts(n, 0);
  std::vector<std::size_t> stamp(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t v = 0; v < n; ++v) {
    std::uint32_t c = 0;
    stamp[v] = v;
    for (std::uint32_t w : g.neighbors(v)) {
      if (stamp[w] != v) {
        stamp[w] = v;
        ++c;
      }
      for (std::uint32_t x : g.neighbors(w)) {
        if (stamp[x] != v) {
          stamp[x] = v;
          ++c;
        }
      }
    }
    counts[v] = c;
  }
  return counts;
}

}  // namespace

ObservableGraph::ObservableGraph(std::shared_ptr<const Graph> base, Graph visible, double p_nv)
    : base_(std::move(base)), visible_(std::move(visible)), p_nv_(p_nv) {
  if (visible_.num_nodes() != base_->num_nodes()) {
    throw std::invalid_argument("visible graph must share the base node set");
  }
  two_hop_ = all_two_hop_counts(visible_);
}

ObservableGraph mask_network(std::shared_ptr<const Graph> g, double p_nv, std::uint64_t seed) {
  if (!(p_nv >= 0.0 && p_nv <= 1.0)) throw std::invalid_argument("p_nv must lie in [0, 1]");
  if (p_nv >= 1.0) return full_view(std::move(g));
  Rng rng(seed);
  std::vector<Edge> kept;
  kept.reserve(static_cast<std::size_t>(static_cast<double>(g->num_edges()) * p_nv) + 1);
  for (const Edge& e : g->edges()) {
    if (bernoulli(rng, p_nv)) kept.push_back(e);
  }
  Graph visible(g->num_nodes(), kept);
  return ObservableGraph(std::move(g), std::move(visible), p_nv);
}

ObservableGraph full_view(std::shared_ptr<const Graph> g) {
  Graph copy = *g;
  return ObservableGraph(std::move(g), std::move(copy), 1.0);
}

std::size_t degree(const ObservableGraph& g, std::size_t v) {
  g.visible().check_node(v);
  return g.visible().degree(v);
}

std::size_t free_degree(const ObservableGraph& g, std::size_t v,
                        std::span<const std::uint8_t> is_free) {
  g.visible().check_node(v);
  std::size_t c = 0;
  for (std::uint32_t w : g.visible().neighbors(v)) c += is_free[w] ? 1 : 0;
  return c;
}

std::size_t within_d_hops(const Graph& g, std::size_t v, std::size_t d) {
  g.check_node(v);
  if (d == 0) throw std::invalid_argument("hop count must be at least 1");
  std::vector<std::uint8_t> seen(g.num_nodes(), 0);
  std::vector<std::uint32_t> frontier{static_cast<std::uint32_t>(v)};
  std::vector<std::uint32_t> next;
  seen[v] = 1;
  std::size_t count = 0;
  for (std::size_t hop = 0; hop < d && !frontier.empty(); ++hop) {
    next.clear();
    for (std::uint32_t x : frontier) {
      for (std::uint32_t w : g.neighbors(x)) {
        if (!seen[w]) {
          seen[w] = 1;
          next.push_back(w);
        }
      }
    }
    count += next.size();
    frontier.swap(next);
  }
  return count;
}

std::size_t within_d_hops(const ObservableGraph& g, std::size_t v, std::size_t d) {
  if (d == 2) {
    g.visible().check_node(v);
    return g.two_hop_count(v);
  }
  return within_d_hops(g.visible(), v, d);
}

namespace {

struct KMeansResult {
  std::vector<std::uint32_t> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KMeansResult kmeans(const Eigen::MatrixXd& x, std::size_t k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(k), x.cols());

  // k-means++ seeding.
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  centers.row(0) = x.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d2 = (x.row(i) - centers.row(static_cast<Eigen::Index>(c - 1))).squaredNorm();
      dist[static_cast<std::size_t>(i)] = std::min(dist[static_cast<std::size_t>(i)], d2);
      total += dist[static_cast<std::size_t>(i)];
    }
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double r = uniform01(rng) * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        r -= dist[static_cast<std::size_t>(i)];
        if (r < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    }
    centers.row(static_cast<Eigen::Index>(c)) = x.row(pick);
  }

  KMeansResult res;
  res.labels.assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = iter == 0;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uint32_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d2 = (x.row(i) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
        if (d2 < best_d) {
          best_d = d2;
          best = static_cast<std::uint32_t>(c);
        }
      }
      if (res.labels[static_cast<std::size_t>(i)] != best) changed = true;
      res.labels[static_cast<std::size_t>(i)] = best;
      inertia += best_d;
    }
    res.inertia = inertia;
    if (!changed) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), x.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(res.labels[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[res.labels[static_cast<std::size_t>(i)]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
      } else {
        centers.row(static_cast<Eigen::Index>(c)) =
            x.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
      }
    }
  }
  return res;
}

}  // namespace

std::vector<std::uint32_t> spectral_communities(const Graph& g, std::size_t k, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (k < 1 || k > n) throw std::invalid_argument("community count must lie in [1, n]");
  if (k == 1) return std::vector<std::uint32_t>(n, 0);

  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::VectorXd inv_sqrt_deg(nn);
  for (std::size_t v = 0; v < n; ++v) {
    const auto dv = static_cast<double>(g.degree(v));
    inv_sqrt_deg[static_cast<Eigen::Index>(v)] = dv > 0.0 ? 1.0 / std::sqrt(dv) : 0.0;
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(nn, nn);
  for (auto [u, v] : g.edges()) {
    const double w = inv_sqrt_deg[u] * inv_sqrt_deg[v];
    lap(u, v) -= w;
    lap(v, u) -= w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  Eigen::MatrixXd embed = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 1e-12) embed.row(i) /= norm;
  }

  Rng rng(seed);
  KMeansResult best;
  for (int restart = 0; restart < 8; ++restart) {
    KMeansResult r = kmeans(embed, k, rng);
    if (r.inertia < best.inertia - 1e-12) best = std::move(r);
  }

  // Canonical labels: numbered by first appearance in node order.
  std::vector<std::uint32_t> remap(k, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (auto& label : best.labels) {
    if (remap[label] == std::numeric_limits<std::uint32_t>::max()) remap[label] = next++;
    label = remap[label];
  }
  return best.labels;
}

std::vector<std::uint32_t> spectral_communities(const ObservableGraph& g, std::size_t k,
                                                std::uint64_t seed) {
  return spectral_communities(g.visible(), k, seed);
}

void write_communities_csv(std::ostream& out, std::span<const std::uint32_t> labels) {
  out << "node_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

}  // namespace cim
