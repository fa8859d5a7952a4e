#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace twochoices {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Immutable simple undirected connected graph in compressed adjacency form.
///
/// Construction validates every invariant (symmetry, no self-loops or
/// duplicate edges, connectivity, n >= 2) and throws Error otherwise, so any
/// Graph value in hand is a valid model substrate. Neighbor lists are sorted.
class Graph {
 public:
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(Vertex v) const noexcept {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }
  std::uint32_t min_degree() const noexcept { return min_degree_; }
  std::uint32_t max_degree() const noexcept { return max_degree_; }
  std::uint64_t volume() const noexcept { return adjacency_.size(); }

  bool has_edge(Vertex u, Vertex v) const noexcept;

  /// Edges with u < v, sorted lexicographically.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Graph() = default;

  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::uint32_t min_degree_ = 0;
  std::uint32_t max_degree_ = 0;
};

// Connectivity of an arbitrary adjacency structure, used before a Graph can
// be built (generators, loaders).
bool is_connected(std::size_t n, std::span<const Edge> edges);

Graph complete_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph star_graph(std::size_t leaves);
Graph petersen_graph();

/// G(n, p) with p = min(1, mean_degree / (n - 1)), redrawn from derived seeds
/// until connected (at most 1000 draws).
Graph erdos_renyi(std::size_t n, double mean_degree, std::uint64_t seed);

/// Uniform-ish random d-regular graph by incremental stub pairing
/// (Steger-Wormald), restarted until simple and connected (at most 1000
/// restarts). Requires n*d even, 3 <= d < n.
Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed);

// Edge-list text format: header "n m", then m lines "u v" (0-indexed).
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

}  // namespace twochoices
