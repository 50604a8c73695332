#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wopt {

/// Raised for domain-level failures (disconnected graph, infeasible start,
/// exhausted retry budgets). Contract violations throw std::invalid_argument.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Edge = std::pair<int, int>;

/// Partition of the edge set into automorphism orbits. Orbit indices are
/// contiguous, 0..orbit_count-1, numbered by first appearance in the
/// canonical edge order.
struct OrbitPartition {
  std::vector<int> orbit_of_edge;
  int orbit_count = 0;
};

/// Undirected simple graph. Edges are stored with i < j and sorted
/// lexicographically, so any per-edge vector (weights, orbit labels) has an
/// unambiguous layout.
struct Graph {
  int n = 0;
  std::vector<Edge> edges;
  std::string name;
  // Orbits loaded from a file; required when n exceeds the built-in
  // automorphism search limit.
  std::optional<OrbitPartition> supplied_orbits;

  int edge_count() const { return static_cast<int>(edges.size()); }
};

enum class Topology { Complete, Star, Cycle, Grid };

/// Parses "complete", "star", "cycle", "grid".
Topology topology_from_string(const std::string& s);
std::string to_string(Topology t);

/// Canonicalizes the edge list (i < j per edge, lexicographic order) and
/// validates simplicity. Throws std::invalid_argument on self-loops,
/// duplicates, or out-of-range endpoints.
Graph make_graph(int n, std::vector<Edge> edges, std::string name = {});

/// Standard topologies. Grid requires n to be a perfect square >= 4 and is
/// the sqrt(n) x sqrt(n) lattice; cycle requires n >= 3; others n >= 2.
Graph make_topology(Topology kind, int n);

/// G(n,p) sample, deterministic for a fixed seed. Retries (up to 100 draws)
/// until the sample is connected; throws DomainError if none is.
Graph erdos_renyi(int n, double p, std::uint64_t seed);

/// Oriented incidence matrix: column e for edge (i,j) has +1 at row i and
/// -1 at row j (i < j fixes the orientation).
Eigen::MatrixXd incidence(const Graph& g);

/// Laplacian assembled from degrees and adjacency (not via incidence).
Eigen::MatrixXd laplacian(const Graph& g);

std::vector<int> degrees(const Graph& g);
int maximum_degree(const Graph& g);

bool is_connected(const Graph& g);

/// Edge orbits under the full automorphism group. Uses the supplied
/// partition when present; otherwise runs an exhaustive backtracking search
/// over vertex bijections (degree and neighbor-degree pruned), exact for
/// n <= 16. Throws DomainError beyond that limit or if the search budget
/// is exhausted.
OrbitPartition edge_orbits(const Graph& g);

/// Expands a per-orbit value vector to a per-edge vector.
Eigen::VectorXd expand_orbit_values(const OrbitPartition& p, const Eigen::VectorXd& per_orbit);

}  // namespace wopt
