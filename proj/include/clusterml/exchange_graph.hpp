#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterml/seed.hpp"

namespace clusterml {

enum class Payload { seeds, quivers };

std::string to_string(Payload payload);
Payload parse_payload(const std::string& text);

struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t index = 0;  // mutation index joining the endpoints

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Plain undirected simple graph used by the analytics routines.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  UndirectedGraph(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t vertex_count() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }
  // Sorted neighbour lists.
  const std::vector<std::size_t>& neighbours(std::size_t v) const { return adj_[v]; }
  std::size_t degree(std::size_t v) const { return adj_[v].size(); }
  bool adjacent(std::size_t u, std::size_t v) const;

 private:
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> adj_;
};

// Seed or quiver exchange graph. Vertex 0 is the initial payload; vertices are
// numbered in discovery order.
class ExchangeGraph {
 public:
  struct Metadata {
    std::string name;
    Payload payload = Payload::seeds;
    Equivalence mode = Equivalence::exact;
    std::optional<int> depth_limit;  // nullopt: generated to closure
    bool closed = false;             // no further vertices exist
    bool partial = false;            // generation stopped by a resource cap
    int completed_depth = 0;         // deepest fully expanded level
  };

  ExchangeGraph() = default;

  const Metadata& metadata() const noexcept { return meta_; }
  Payload payload() const noexcept { return meta_.payload; }
  std::size_t rank() const noexcept { return rank_; }
  std::size_t vertex_count() const noexcept { return depth_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  int depth(std::size_t v) const { return depth_.at(v); }
  int max_depth() const;
  const std::vector<int>& depths() const noexcept { return depth_; }
  const ExchangeMatrix& matrix(std::size_t v) const;
  // Seed payload only.
  const Seed& seed(std::size_t v) const;
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const UndirectedGraph& topology() const noexcept { return topology_; }

  // Rebuilds a graph from stored parts (e.g. a JSON file). Seeds may be empty
  // for quiver payloads.
  static ExchangeGraph assemble(Metadata meta, std::size_t rank, std::vector<Seed> seeds,
                                std::vector<ExchangeMatrix> matrices, std::vector<int> depths,
                                std::vector<Edge> edges);

 private:
  friend class GraphBuilder;

  void finalize();

  Metadata meta_;
  std::size_t rank_ = 0;
  std::vector<Seed> seeds_;              // seeds payload
  std::vector<ExchangeMatrix> matrices_; // quivers payload
  std::vector<int> depth_;
  std::vector<Edge> edges_;
  UndirectedGraph topology_;
};

struct GenerationLimits {
  std::size_t max_vertices = 2'000'000;
  // Total numerator terms summed over all stored seeds.
  std::size_t max_terms = 500'000'000;
  std::optional<std::chrono::seconds> max_wall_time;
  // Iteration guard for closure runs.
  int max_closure_depth = 200;
};

// Raised when a cap stops generation. Carries the graph as far as it got and
// the deepest level that was fully expanded.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& what, ExchangeGraph partial, int completed_depth)
      : std::runtime_error(what), partial_(std::move(partial)), completed_depth_(completed_depth) {}

  const ExchangeGraph& partial() const noexcept { return partial_; }
  int completed_depth() const noexcept { return completed_depth_; }

 private:
  ExchangeGraph partial_;
  int completed_depth_;
};

// Breadth-first generation from `initial`. Every vertex shallower than
// `depth` is mutated at each index in ascending order; frontier order is
// FIFO. Results already present (under `mode`) add an edge, new ones a vertex
// one level deeper. Vertices at `depth` are not expanded.
ExchangeGraph generate_seed_graph(const Seed& initial, int depth, Equivalence mode = Equivalence::exact,
                                  const GenerationLimits& limits = {}, const std::string& name = "");

// As generate_seed_graph, but vertices are exchange matrices only.
ExchangeGraph generate_quiver_graph(const Seed& initial, int depth,
                                    Equivalence mode = Equivalence::exact,
                                    const GenerationLimits& limits = {}, const std::string& name = "");

// Generates until a level adds no vertices (the generalised associahedron for
// finite type). Throws ResourceLimitError if `limits.max_closure_depth` or a
// size cap is reached first.
ExchangeGraph generate_full(const Seed& initial, Equivalence mode = Equivalence::exact,
                            Payload payload = Payload::seeds, const GenerationLimits& limits = {},
                            const std::string& name = "");

// Cumulative vertex count at depths 0..max_depth.
std::vector<std::size_t> seeds_per_depth(const ExchangeGraph& g);

}  // namespace clusterml
