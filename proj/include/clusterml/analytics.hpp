#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clusterml/exchange_graph.hpp"

namespace clusterml {

// E / C(V, 2). Throws DomainError for V < 2.
double density(const UndirectedGraph& g);

struct Clustering {
  double triangle = 0.0;
  double square = 0.0;
};

// Mean local triangle and square clustering over all vertices, with the
// conventions of networkx (vertices of degree < 2 contribute zero).
Clustering clustering_coefficients(const UndirectedGraph& g);
std::vector<double> triangle_clustering(const UndirectedGraph& g);
std::vector<double> square_clustering(const UndirectedGraph& g);

struct Wiener {
  std::uint64_t full = 0;
  double normalized = 0.0;  // full / C(V, 2)
};

// Sum of shortest-path lengths over unordered pairs. Disconnected graphs throw.
Wiener wiener_index(const UndirectedGraph& g);

// Unweighted single-source distances; -1 for unreachable vertices.
std::vector<int> bfs_distances(const UndirectedGraph& g, std::size_t source);

struct CentralityOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 1'000'000;
  // Spread below which the vector counts as flat.
  double tie_tolerance = 1e-8;
};

struct Centrality {
  std::vector<double> values;        // L2-normalised, positive
  // Lowest-index maximiser; empty when the vector is flat.
  std::optional<std::size_t> centre;
  // c[root] - max c over neighbours of root; set when the root is the centre.
  std::optional<double> diff;
  std::size_t iterations = 0;
};

// Power iteration on A + I from the uniform vector. `root` is the initial
// vertex used for `diff`.
Centrality eigenvector_centrality(const UndirectedGraph& g, const CentralityOptions& options = {},
                                  std::size_t root = 0);

struct Cycle {
  // Closed walk v0 v1 ... v_{s-1} (v_{s-1} adjacent to v0), all distinct.
  std::vector<std::size_t> vertices;
  std::size_t length() const noexcept { return vertices.size(); }
};

// Minimum cycle basis over GF(2) using Horton candidates. The basis has
// E - V + components cycles, sorted by length.
std::vector<Cycle> minimum_cycle_basis(const UndirectedGraph& g);

// Minimum cycle basis by de Pina's orthogonal-vector method. Same lengths as
// minimum_cycle_basis, but the cycles picked follow networkx's traversal
// order: adjacency in edge insertion order, a Kruskal spanning tree over that
// order, and first-discovered parents in the lifted-graph searches. Intended
// for small graphs (O(chords * V * E)).
std::vector<Cycle> de_pina_cycle_basis(const UndirectedGraph& g);

// length -> count
std::map<std::size_t, std::size_t> cycle_length_histogram(const std::vector<Cycle>& basis);

std::size_t connected_components(const UndirectedGraph& g);

struct GraphStats {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  double density = 0.0;
  Clustering clustering;
  Wiener wiener;
  std::optional<std::size_t> centre;
  std::optional<double> centrality_diff;
  std::map<std::size_t, std::size_t> mcb_histogram;
};

GraphStats full_stats(const UndirectedGraph& g);

// "[4,17], [6,3]"
std::string format_histogram(const std::map<std::size_t, std::size_t>& histogram);

}  // namespace clusterml
