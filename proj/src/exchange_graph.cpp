#include "clusterml/exchange_graph.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "clusterml/errors.hpp"

namespace clusterml {

std::string to_string(Payload payload) { return payload == Payload::seeds ? "seeds" : "quivers"; }

Payload parse_payload(const std::string& text) {
  if (text == "seeds" || text == "seed") return Payload::seeds;
  if (text == "quivers" || text == "quiver") return Payload::quivers;
  throw ConfigError("unknown payload kind '" + text + "'");
}

// ---------------------------------------------------------------------------
// UndirectedGraph

UndirectedGraph::UndirectedGraph(std::size_t n,
                                 std::vector<std::pair<std::size_t, std::size_t>> edges)
    : edges_(std::move(edges)), adj_(n) {
  for (const auto& [a, b] : edges_) {
    if (a >= n || b >= n) throw DomainError("edge endpoint out of range");
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool UndirectedGraph::adjacent(std::size_t u, std::size_t v) const {
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

// ---------------------------------------------------------------------------
// ExchangeGraph

int ExchangeGraph::max_depth() const {
  return depth_.empty() ? 0 : *std::max_element(depth_.begin(), depth_.end());
}

const ExchangeMatrix& ExchangeGraph::matrix(std::size_t v) const {
  return meta_.payload == Payload::seeds ? seeds_.at(v).matrix() : matrices_.at(v);
}

const Seed& ExchangeGraph::seed(std::size_t v) const {
  if (meta_.payload != Payload::seeds) throw DomainError("quiver exchange graph has no seeds");
  return seeds_.at(v);
}

void ExchangeGraph::finalize() {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(edges_.size());
  for (const auto& e : edges_) pairs.emplace_back(e.a, e.b);
  topology_ = UndirectedGraph(depth_.size(), std::move(pairs));
}

ExchangeGraph ExchangeGraph::assemble(Metadata meta, std::size_t rank, std::vector<Seed> seeds,
                                      std::vector<ExchangeMatrix> matrices, std::vector<int> depths,
                                      std::vector<Edge> edges) {
  ExchangeGraph g;
  g.meta_ = std::move(meta);
  g.rank_ = rank;
  if (g.meta_.payload == Payload::seeds) {
    if (seeds.size() != depths.size()) throw DimensionError("seed count must match depth count");
    g.seeds_ = std::move(seeds);
  } else {
    if (matrices.size() != depths.size()) {
      throw DimensionError("matrix count must match depth count");
    }
    g.matrices_ = std::move(matrices);
  }
  g.depth_ = std::move(depths);
  g.edges_ = std::move(edges);
  g.finalize();
  return g;
}

// ---------------------------------------------------------------------------
// Generation

class GraphBuilder {
 public:
  GraphBuilder(ExchangeGraph::Metadata meta, std::size_t rank, const GenerationLimits& limits)
      : limits_(limits), start_(std::chrono::steady_clock::now()) {
    graph_.meta_ = std::move(meta);
    graph_.rank_ = rank;
  }

  // Returns the vertex for `seed`, creating it at `depth` when unseen.
  std::pair<std::size_t, bool> intern(Seed seed, int depth) {
    if (graph_.meta_.payload == Payload::quivers) {
      return intern_matrix(seed.matrix(), depth);
    }
    if (graph_.meta_.mode == Equivalence::permutation) {
      auto key = canonical_form(seed, Equivalence::permutation);
      auto it = by_key_.find(key);
      if (it != by_key_.end()) return {it->second, false};
      const auto v = add_seed(std::move(seed), depth);
      by_key_.emplace(std::move(key), v);
      return {v, true};
    }
    auto& bucket = by_hash_[seed.hash()];
    for (auto v : bucket) {
      if (graph_.seeds_[v] == seed) return {v, false};
    }
    const auto v = add_seed(std::move(seed), depth);
    bucket.push_back(v);
    return {v, true};
  }

  void add_edge(std::size_t a, std::size_t b, std::size_t k) {
    if (a == b) return;
    const auto key = std::minmax(a, b);
    if (!edge_keys_.insert(key.first * kStride + key.second).second) return;
    graph_.edges_.push_back({a, b, k});
  }

  const Seed& seed(std::size_t v) const { return graph_.seeds_[v]; }
  const ExchangeMatrix& matrix(std::size_t v) const { return graph_.matrix(v); }
  Payload payload() const { return graph_.meta_.payload; }

  void check_limits(int completed_depth) {
    std::string reason;
    if (graph_.depth_.size() > limits_.max_vertices) {
      reason = "vertex cap of " + std::to_string(limits_.max_vertices) + " exceeded";
    } else if (terms_ > limits_.max_terms) {
      reason = "numerator term cap of " + std::to_string(limits_.max_terms) + " exceeded";
    } else if (limits_.max_wall_time &&
               std::chrono::steady_clock::now() - start_ > *limits_.max_wall_time) {
      reason = "wall-clock cap exceeded";
    }
    if (reason.empty()) return;
    graph_.meta_.partial = true;
    graph_.meta_.completed_depth = completed_depth;
    ExchangeGraph partial = take();
    throw ResourceLimitError(reason + " after completing depth " + std::to_string(completed_depth),
                             std::move(partial), completed_depth);
  }

  ExchangeGraph take() {
    ExchangeGraph out = std::move(graph_);
    out.finalize();
    return out;
  }

  ExchangeGraph::Metadata& metadata() { return graph_.meta_; }

 private:
  static constexpr std::size_t kStride = std::size_t{1} << 32;

  struct MatrixHash {
    std::size_t operator()(const ExchangeMatrix& b) const noexcept { return b.hash(); }
  };

  std::size_t add_seed(Seed seed, int depth) {
    terms_ += seed.term_count();
    graph_.seeds_.push_back(std::move(seed));
    graph_.depth_.push_back(depth);
    return graph_.depth_.size() - 1;
  }

  std::pair<std::size_t, bool> intern_matrix(const ExchangeMatrix& b, int depth) {
    if (graph_.meta_.mode == Equivalence::permutation) {
      auto key = canonical_form(b, Equivalence::permutation);
      auto it = by_key_.find(key);
      if (it != by_key_.end()) return {it->second, false};
      graph_.matrices_.push_back(b);
      graph_.depth_.push_back(depth);
      by_key_.emplace(std::move(key), graph_.depth_.size() - 1);
      return {graph_.depth_.size() - 1, true};
    }
    auto it = by_matrix_.find(b);
    if (it != by_matrix_.end()) return {it->second, false};
    graph_.matrices_.push_back(b);
    graph_.depth_.push_back(depth);
    by_matrix_.emplace(b, graph_.depth_.size() - 1);
    return {graph_.depth_.size() - 1, true};
  }

  GenerationLimits limits_;
  std::chrono::steady_clock::time_point start_;
  ExchangeGraph graph_;
  std::size_t terms_ = 0;
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_hash_;
  std::unordered_map<std::string, std::size_t> by_key_;
  std::unordered_map<ExchangeMatrix, std::size_t, MatrixHash> by_matrix_;
  std::unordered_set<std::size_t> edge_keys_;
};

namespace {

ExchangeGraph breadth_first(const Seed& initial, std::optional<int> depth, Equivalence mode,
                            Payload payload, const GenerationLimits& limits,
                            const std::string& name) {
  if (depth && *depth < 0) throw DomainError("depth must be non-negative");
  ExchangeGraph::Metadata meta;
  meta.name = name;
  meta.payload = payload;
  meta.mode = mode;
  meta.depth_limit = depth;
  GraphBuilder builder(meta, initial.rank(), limits);

  const std::size_t r = initial.rank();
  std::vector<std::size_t> frontier{builder.intern(initial, 0).first};
  int level = 0;
  while (!frontier.empty() && (!depth || level < *depth)) {
    if (!depth && level >= limits.max_closure_depth) {
      builder.metadata().partial = true;
      builder.metadata().completed_depth = level;
      throw ResourceLimitError("no closure within depth " + std::to_string(limits.max_closure_depth) +
                                   "; algebra does not appear to be of finite type",
                               builder.take(), level);
    }
    std::vector<std::size_t> next;
    for (const auto v : frontier) {
      for (std::size_t k = 0; k < r; ++k) {
        std::pair<std::size_t, bool> hit;
        if (builder.payload() == Payload::seeds) {
          hit = builder.intern(mutate(builder.seed(v), k), level + 1);
        } else {
          const ExchangeMatrix m = mutate(builder.matrix(v), k);
          hit = builder.intern(Seed::initial(m), level + 1);
        }
        builder.add_edge(v, hit.first, k);
        if (hit.second) next.push_back(hit.first);
      }
      builder.check_limits(level);
    }
    frontier = std::move(next);
    ++level;
  }
  builder.metadata().closed = frontier.empty();
  builder.metadata().completed_depth = level;
  return builder.take();
}

}  // namespace

ExchangeGraph generate_seed_graph(const Seed& initial, int depth, Equivalence mode,
                                  const GenerationLimits& limits, const std::string& name) {
  return breadth_first(initial, depth, mode, Payload::seeds, limits, name);
}

ExchangeGraph generate_quiver_graph(const Seed& initial, int depth, Equivalence mode,
                                    const GenerationLimits& limits, const std::string& name) {
  return breadth_first(initial, depth, mode, Payload::quivers, limits, name);
}

ExchangeGraph generate_full(const Seed& initial, Equivalence mode, Payload payload,
                            const GenerationLimits& limits, const std::string& name) {
  return breadth_first(initial, std::nullopt, mode, payload, limits, name);
}

std::vector<std::size_t> seeds_per_depth(const ExchangeGraph& g) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(g.max_depth()) + 1, 0);
  for (auto d : g.depths()) ++counts[static_cast<std::size_t>(d)];
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  return counts;
}

}  // namespace clusterml
