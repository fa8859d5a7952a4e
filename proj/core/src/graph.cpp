#include "twochoices/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "twochoices/error.hpp"
#include "twochoices/rng.hpp"

namespace twochoices {
namespace {

constexpr int kMaxAttempts = 1000;

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

}  // namespace

bool is_connected(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) return false;
  // Union-find keeps this independent of the CSR layout.
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = n;
  for (const auto& [u, v] : edges) {
    auto ru = find(u);
    auto rv = find(v);
    if (ru != rv) {
      parent[ru] = rv;
      --components;
    }
  }
  return components == 1;
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n < 2) invalid("graph needs at least 2 vertices, got " + std::to_string(n));
  if (n > std::numeric_limits<Vertex>::max()) invalid("graph too large");

  std::vector<std::size_t> degree(n, 0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      invalid("edge (" + std::to_string(u) + ", " + std::to_string(v) +
              ") out of range for n=" + std::to_string(n));
    }
    if (u == v) invalid("self-loop at vertex " + std::to_string(u));
    ++degree[u];
    ++degree[v];
  }

  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
  g.adjacency_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.adjacency_[fill[u]++] = v;
    g.adjacency_[fill[v]++] = u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
    auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) {
      invalid("duplicate edge at vertex " + std::to_string(v));
    }
    if (first == last) invalid("isolated vertex " + std::to_string(v));
  }
  if (!is_connected(n, edges)) invalid("graph is not connected");

  auto [lo, hi] = std::minmax_element(degree.begin(), degree.end());
  g.min_degree_ = static_cast<std::uint32_t>(*lo);
  g.max_degree_ = static_cast<std::uint32_t>(*hi);
  return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const noexcept {
  if (u >= size() || v >= size()) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < size(); ++u) {
    for (Vertex v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph complete_graph(std::size_t n) {
  if (n < 2) invalid("complete graph needs n >= 2");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) invalid("cycle needs n >= 3");
  std::vector<Edge> edges;
  for (Vertex v = 0; v < n; ++v) {
    edges.emplace_back(v, static_cast<Vertex>((v + 1) % n));
  }
  return Graph::from_edges(n, edges);
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph::from_edges(n, edges);
}

Graph star_graph(std::size_t leaves) {
  std::vector<Edge> edges;
  for (Vertex v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
  return Graph::from_edges(leaves + 1, edges);
}

Graph petersen_graph() {
  std::vector<Edge> edges;
  for (Vertex i = 0; i < 5; ++i) {
    edges.emplace_back(i, (i + 1) % 5);          // outer cycle
    edges.emplace_back(i, i + 5);                // spokes
    edges.emplace_back(i + 5, (i + 2) % 5 + 5);  // inner pentagram
  }
  return Graph::from_edges(10, edges);
}

Graph erdos_renyi(std::size_t n, double mean_degree, std::uint64_t seed) {
  if (n < 2) invalid("erdos_renyi needs n >= 2");
  if (!(mean_degree > 0.0)) invalid("erdos_renyi needs a positive mean degree");
  const double p = std::min(1.0, mean_degree / static_cast<double>(n - 1));

  std::vector<Edge> edges;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::bernoulli_distribution coin(p);
    edges.clear();
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        if (coin(rng)) edges.emplace_back(u, v);
      }
    }
    if (is_connected(n, edges)) return Graph::from_edges(n, edges);
  }
  throw Error(ErrorCode::kGenerationFailure,
              "erdos_renyi: " + std::to_string(kMaxAttempts) +
                  " consecutive disconnected draws (mean degree too small?)");
}

namespace {

std::uint64_t edge_key(Vertex u, Vertex v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// One Steger-Wormald pass. Returns false when the leftover stubs cannot be
// paired without a loop or multi-edge.
bool try_pairing(std::size_t n, std::size_t d, Rng& rng, std::vector<Edge>& edges) {
  std::vector<Vertex> stubs;
  stubs.reserve(n * d);
  for (Vertex v = 0; v < n; ++v) stubs.insert(stubs.end(), d, v);

  std::unordered_set<std::uint64_t> present;
  present.reserve(n * d);
  edges.clear();
  std::vector<Vertex> leftover;
  while (!stubs.empty()) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    leftover.clear();
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      Vertex u = stubs[i];
      Vertex v = stubs[i + 1];
      if (u != v && present.insert(edge_key(u, v)).second) {
        edges.emplace_back(std::min(u, v), std::max(u, v));
      } else {
        leftover.push_back(u);
        leftover.push_back(v);
      }
    }
    if (leftover.empty()) return true;

    // Stuck unless some pair of distinct leftover vertices is not yet joined.
    std::vector<Vertex> distinct(leftover);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    bool suitable = false;
    for (std::size_t i = 0; i < distinct.size() && !suitable; ++i) {
      for (std::size_t j = i + 1; j < distinct.size(); ++j) {
        if (!present.contains(edge_key(distinct[i], distinct[j]))) {
          suitable = true;
          break;
        }
      }
    }
    if (!suitable) return false;
    stubs.swap(leftover);
  }
  return true;
}

}  // namespace

Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if ((n * d) % 2 != 0) {
    invalid("random_regular: n*d must be even (n=" + std::to_string(n) +
            ", d=" + std::to_string(d) + ")");
  }
  if (d >= n) invalid("random_regular: need d < n");
  if (d < 3) invalid("random_regular: need d >= 3");

  std::vector<Edge> edges;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    if (try_pairing(n, d, rng, edges) && is_connected(n, edges)) {
      std::sort(edges.begin(), edges.end());
      return Graph::from_edges(n, edges);
    }
  }
  throw Error(ErrorCode::kGenerationFailure,
              "random_regular: " + std::to_string(kMaxAttempts) + " rejections");
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.size() << ' ' << g.edge_count() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& in) {
  auto fail = [](const std::string& msg) -> Graph {
    throw Error(ErrorCode::kParse, "edge list: " + msg);
  };
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      auto pos = line.find_first_not_of(" \t\r");
      if (pos != std::string::npos && line[pos] != '#') return true;
    }
    return false;
  };

  if (!next_line()) return fail("missing header line");
  long long n = -1;
  long long m = -1;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> n >> m) || (header >> extra) || n < 0 || m < 0) {
      return fail("bad header '" + line + "'");
    }
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_line()) return fail("expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    std::istringstream row(line);
    long long u = -1;
    long long v = -1;
    std::string extra;
    if (!(row >> u >> v) || (row >> extra) || u < 0 || v < 0 || u >= n || v >= n) {
      return fail("bad edge on line " + std::to_string(line_no) + ": '" + line + "'");
    }
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (next_line()) return fail("trailing content on line " + std::to_string(line_no));
  return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

}  // namespace twochoices
