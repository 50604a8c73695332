#include "wopt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <set>

namespace wopt {
namespace {

// 53-bit uniform in [0,1) from raw mt19937_64 output; avoids the
// implementation-defined std::uniform_real_distribution so that seeds are
// reproducible across standard libraries.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Union-find over edge indices.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  // Returns true if a merge happened.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

constexpr int kOrbitNodeLimit = 16;
constexpr long long kSearchBudget = 200'000'000;

// Enumerates graph automorphisms by assigning images vertex by vertex,
// pruning on degree, sorted neighbor-degree profile, and adjacency
// consistency with already-assigned vertices. Each automorphism found merges
// edge orbits; the search stops early once a single orbit remains (the
// partition can only coarsen toward the true one, never past it).
class OrbitSearch {
 public:
  explicit OrbitSearch(const Graph& g) : g_(g), n_(g.n), uf_(g.edge_count()) {
    adj_.assign(n_, 0u);
    for (const auto& [i, j] : g_.edges) {
      adj_[i] |= 1u << j;
      adj_[j] |= 1u << i;
    }
    deg_.resize(n_);
    for (int v = 0; v < n_; ++v) deg_[v] = __builtin_popcount(adj_[v]);
    profile_.resize(n_);
    for (int v = 0; v < n_; ++v) {
      for (int u = 0; u < n_; ++u)
        if (adj_[v] & (1u << u)) profile_[v].push_back(deg_[u]);
      std::sort(profile_[v].begin(), profile_[v].end());
    }
    edge_index_.assign(n_ * n_, -1);
    for (int e = 0; e < g_.edge_count(); ++e) {
      auto [i, j] = g_.edges[e];
      edge_index_[i * n_ + j] = e;
      edge_index_[j * n_ + i] = e;
    }
    image_.assign(n_, -1);
    used_ = 0;
    orbit_count_ = g_.edge_count();
  }

  OrbitPartition run() {
    if (g_.edge_count() > 0) recurse(0);
    if (budget_ <= 0)
      throw DomainError("edge_orbits: automorphism search budget exceeded; supply an explicit orbit partition");
    return finalize();
  }

 private:
  void recurse(int v) {
    if (orbit_count_ == 1 || budget_ <= 0) return;
    if (v == n_) {
      record();
      return;
    }
    for (int c = 0; c < n_; ++c) {
      if (used_ & (1u << c)) continue;
      if (deg_[c] != deg_[v] || profile_[c] != profile_[v]) continue;
      bool ok = true;
      for (int u = 0; u < v; ++u) {
        const bool av = (adj_[v] >> u) & 1u;
        const bool ac = (adj_[c] >> image_[u]) & 1u;
        if (av != ac) {
          ok = false;
          break;
        }
      }
      if (--budget_ <= 0) return;
      if (!ok) continue;
      image_[v] = c;
      used_ |= 1u << c;
      recurse(v + 1);
      used_ &= ~(1u << c);
      image_[v] = -1;
      if (orbit_count_ == 1) return;
    }
  }

  void record() {
    for (int e = 0; e < g_.edge_count(); ++e) {
      auto [i, j] = g_.edges[e];
      const int f = edge_index_[image_[i] * n_ + image_[j]];
      if (uf_.unite(e, f)) --orbit_count_;
    }
  }

  OrbitPartition finalize() {
    OrbitPartition p;
    p.orbit_of_edge.assign(g_.edge_count(), -1);
    std::vector<int> label(g_.edge_count(), -1);
    int next = 0;
    for (int e = 0; e < g_.edge_count(); ++e) {
      const int r = uf_.find(e);
      if (label[r] < 0) label[r] = next++;
      p.orbit_of_edge[e] = label[r];
    }
    p.orbit_count = next;
    return p;
  }

  const Graph& g_;
  int n_;
  UnionFind uf_;
  std::vector<std::uint32_t> adj_;
  std::vector<int> deg_;
  std::vector<std::vector<int>> profile_;
  std::vector<int> edge_index_;
  std::vector<int> image_;
  std::uint32_t used_;
  int orbit_count_;
  long long budget_ = kSearchBudget;
};

}  // namespace

Topology topology_from_string(const std::string& s) {
  if (s == "complete") return Topology::Complete;
  if (s == "star") return Topology::Star;
  if (s == "cycle") return Topology::Cycle;
  if (s == "grid") return Topology::Grid;
  throw std::invalid_argument("unknown topology '" + s + "' (expected complete|star|cycle|grid)");
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Complete: return "complete";
    case Topology::Star: return "star";
    case Topology::Cycle: return "cycle";
    case Topology::Grid: return "grid";
  }
  return "?";
}

Graph make_graph(int n, std::vector<Edge> edges, std::string name) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  for (auto& [i, j] : edges) {
    if (i == j) throw std::invalid_argument("self-loop on node " + std::to_string(i));
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n) throw std::invalid_argument("edge endpoint out of range");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge");
  Graph g;
  g.n = n;
  g.edges = std::move(edges);
  g.name = std::move(name);
  return g;
}

Graph make_topology(Topology kind, int n) {
  std::vector<Edge> edges;
  switch (kind) {
    case Topology::Complete:
      if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
      break;
    case Topology::Star:
      if (n < 2) throw std::invalid_argument("star graph needs n >= 2");
      for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
      break;
    case Topology::Cycle:
      if (n < 3) throw std::invalid_argument("cycle graph needs n >= 3");
      for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
      break;
    case Topology::Grid: {
      const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
      if (n < 4 || side * side != n)
        throw std::invalid_argument("grid graph needs a perfect square n >= 4");
      auto id = [side](int r, int c) { return r * side + c; };
      for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
          if (c + 1 < side) edges.emplace_back(id(r, c), id(r, c + 1));
          if (r + 1 < side) edges.emplace_back(id(r, c), id(r + 1, c));
        }
      break;
    }
  }
  return make_graph(n, std::move(edges), to_string(kind) + std::to_string(n));
}

Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("erdos_renyi needs n >= 1");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("erdos_renyi needs p in [0,1]");
  std::mt19937_64 rng(seed);
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (next_uniform(rng) < p) edges.emplace_back(i, j);
    Graph g = make_graph(n, std::move(edges),
                         "er" + std::to_string(n) + "_p" + std::to_string(p) + "_s" + std::to_string(seed));
    if (is_connected(g)) return g;
  }
  throw DomainError("erdos_renyi: no connected sample in 100 attempts (p too small?)");
}

Eigen::MatrixXd incidence(const Graph& g) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.n, g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    B(g.edges[e].first, e) = 1.0;
    B(g.edges[e].second, e) = -1.0;
  }
  return B;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(g.n, g.n);
  for (const auto& [i, j] : g.edges) {
    L(i, i) += 1.0;
    L(j, j) += 1.0;
    L(i, j) -= 1.0;
    L(j, i) -= 1.0;
  }
  return L;
}

std::vector<int> degrees(const Graph& g) {
  std::vector<int> d(g.n, 0);
  for (const auto& [i, j] : g.edges) {
    ++d[i];
    ++d[j];
  }
  return d;
}

int maximum_degree(const Graph& g) {
  const auto d = degrees(g);
  return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

bool is_connected(const Graph& g) {
  if (g.n <= 1) return true;
  std::vector<std::vector<int>> adj(g.n);
  for (const auto& [i, j] : g.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(g.n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        q.push(u);
      }
  }
  return count == g.n;
}

OrbitPartition edge_orbits(const Graph& g) {
  if (g.supplied_orbits) {
    const auto& p = *g.supplied_orbits;
    if (static_cast<int>(p.orbit_of_edge.size()) != g.edge_count())
      throw std::invalid_argument("supplied orbit partition has wrong length");
    std::set<int> ids(p.orbit_of_edge.begin(), p.orbit_of_edge.end());
    for (int k = 0; k < p.orbit_count; ++k)
      if (!ids.count(k)) throw std::invalid_argument("supplied orbit indices are not contiguous");
    if (static_cast<int>(ids.size()) != p.orbit_count)
      throw std::invalid_argument("supplied orbit_count does not match labels");
    return p;
  }
  if (g.n > kOrbitNodeLimit)
    throw DomainError("edge_orbits: built-in search limited to n <= 16; supply an orbit partition");
  return OrbitSearch(g).run();
}

Eigen::VectorXd expand_orbit_values(const OrbitPartition& p, const Eigen::VectorXd& per_orbit) {
  if (per_orbit.size() != p.orbit_count)
    throw std::invalid_argument("per-orbit vector length does not match orbit count");
  Eigen::VectorXd w(p.orbit_of_edge.size());
  for (int e = 0; e < w.size(); ++e) w[e] = per_orbit[p.orbit_of_edge[e]];
  return w;
}

}  // namespace wopt
