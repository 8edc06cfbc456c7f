#include "clusterml/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "clusterml/errors.hpp"

namespace clusterml {

double density(const UndirectedGraph& g) {
  const auto n = static_cast<double>(g.vertex_count());
  if (g.vertex_count() < 2) throw DomainError("density needs at least two vertices");
  return static_cast<double>(g.edge_count()) / (n * (n - 1.0) / 2.0);
}

std::vector<double> triangle_clustering(const UndirectedGraph& g) {
  std::vector<double> out(g.vertex_count(), 0.0);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& nb = g.neighbours(v);
    const std::size_t k = nb.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (g.adjacent(nb[i], nb[j])) ++links;
      }
    }
    out[v] = 2.0 * static_cast<double>(links) / static_cast<double>(k * (k - 1));
  }
  return out;
}

namespace {

std::size_t common_neighbours_excluding(const UndirectedGraph& g, std::size_t u, std::size_t w,
                                        std::size_t v) {
  const auto& a = g.neighbours(u);
  const auto& b = g.neighbours(w);
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      if (*i != v) ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

std::vector<double> square_clustering(const UndirectedGraph& g) {
  std::vector<double> out(g.vertex_count(), 0.0);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& nb = g.neighbours(v);
    double squares_total = 0.0;
    double potential = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        const std::size_t u = nb[i];
        const std::size_t w = nb[j];
        const auto squares = static_cast<double>(common_neighbours_excluding(g, u, w, v));
        squares_total += squares;
        double degm = squares + 1.0;
        if (g.adjacent(u, w)) degm += 1.0;
        potential += (static_cast<double>(g.degree(u)) - degm) +
                     (static_cast<double>(g.degree(w)) - degm) + squares;
      }
    }
    if (potential > 0.0) out[v] = squares_total / potential;
  }
  return out;
}

Clustering clustering_coefficients(const UndirectedGraph& g) {
  Clustering c;
  if (g.vertex_count() == 0) return c;
  const auto tri = triangle_clustering(g);
  const auto squ = square_clustering(g);
  const auto n = static_cast<double>(g.vertex_count());
  c.triangle = std::accumulate(tri.begin(), tri.end(), 0.0) / n;
  c.square = std::accumulate(squ.begin(), squ.end(), 0.0) / n;
  return c;
}

std::vector<int> bfs_distances(const UndirectedGraph& g, std::size_t source) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto u : g.neighbours(v)) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

Wiener wiener_index(const UndirectedGraph& g) {
  const std::size_t n = g.vertex_count();
  if (n < 2) throw DomainError("Wiener index needs at least two vertices");
  std::uint64_t total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto dist = bfs_distances(g, v);
    for (std::size_t u = v + 1; u < n; ++u) {
      if (dist[u] < 0) throw DomainError("Wiener index of a disconnected graph");
      total += static_cast<std::uint64_t>(dist[u]);
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return {total, static_cast<double>(total) / pairs};
}

Centrality eigenvector_centrality(const UndirectedGraph& g, const CentralityOptions& options,
                                  std::size_t root) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw DomainError("centrality of an empty graph");
  if (root >= n) throw DomainError("centrality root out of range");
  Centrality c;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> y(n);
  bool converged = false;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = x[v];
      for (auto u : g.neighbours(v)) s += x[u];
      y[v] = s;
    }
    double norm = 0.0;
    for (double t : y) norm += t * t;
    norm = std::sqrt(norm);
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      y[v] /= norm;
      change += std::abs(y[v] - x[v]);
    }
    std::swap(x, y);
    if (change < static_cast<double>(n) * options.tolerance) {
      c.iterations = it;
      converged = true;
      break;
    }
  }
  if (!converged) throw DomainError("eigenvector centrality did not converge");
  c.values = x;

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (n == 1 || *hi - *lo >= options.tie_tolerance) {
    // First vertex (in discovery order) attaining the maximum.
    for (std::size_t v = 0; v < n; ++v) {
      if (*hi - x[v] < options.tie_tolerance) {
        c.centre = v;
        break;
      }
    }
  }
  if (c.centre && *c.centre == root && !g.neighbours(root).empty()) {
    double best = 0.0;
    for (auto u : g.neighbours(root)) best = std::max(best, x[u]);
    c.diff = x[root] - best;
  }
  return c;
}

std::size_t connected_components(const UndirectedGraph& g) {
  std::vector<bool> seen(g.vertex_count(), false);
  std::size_t count = 0;
  for (std::size_t s = 0; s < g.vertex_count(); ++s) {
    if (seen[s]) continue;
    ++count;
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (auto u : g.neighbours(v)) {
        if (!seen[u]) {
          seen[u] = true;
          queue.push_back(u);
        }
      }
    }
  }
  return count;
}

namespace {

constexpr std::uint32_t kNone = 0xffffffffu;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Shortest-path tree rooted at one vertex.
struct Tree {
  std::vector<std::uint32_t> parent;       // parent vertex
  std::vector<std::uint32_t> parent_edge;  // edge to parent
  std::vector<std::uint32_t> dist;
  std::vector<std::uint32_t> branch;       // child of the root on the path
};

struct Candidate {
  std::uint32_t length;
  std::uint32_t root;
  std::uint32_t edge;
};

}  // namespace

std::vector<Cycle> minimum_cycle_basis(const UndirectedGraph& g) {
  const std::size_t n = g.vertex_count();
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  const std::size_t rank = m + connected_components(g) - n;
  std::vector<Cycle> basis;
  if (rank == 0) return basis;

  // Incident edge ids aligned with the sorted neighbour lists.
  std::vector<std::vector<std::uint32_t>> incident(n);
  for (std::size_t v = 0; v < n; ++v) incident[v].resize(g.degree(v));
  for (std::size_t e = 0; e < m; ++e) {
    const auto [a, b] = edges[e];
    const auto& na = g.neighbours(a);
    const auto& nb = g.neighbours(b);
    incident[a][std::lower_bound(na.begin(), na.end(), b) - na.begin()] = static_cast<std::uint32_t>(e);
    incident[b][std::lower_bound(nb.begin(), nb.end(), a) - nb.begin()] = static_cast<std::uint32_t>(e);
  }

  std::vector<Tree> trees(n);
  std::vector<Candidate> candidates;
  for (std::size_t r = 0; r < n; ++r) {
    Tree& t = trees[r];
    t.parent.assign(n, kNone);
    t.parent_edge.assign(n, kNone);
    t.dist.assign(n, kNone);
    t.branch.assign(n, kNone);
    t.dist[r] = 0;
    std::deque<std::size_t> queue{r};
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      const auto& nb = g.neighbours(v);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        const auto u = nb[i];
        if (t.dist[u] != kNone) continue;
        t.dist[u] = t.dist[v] + 1;
        t.parent[u] = static_cast<std::uint32_t>(v);
        t.parent_edge[u] = incident[v][i];
        t.branch[u] = v == r ? static_cast<std::uint32_t>(u) : t.branch[v];
        queue.push_back(u);
      }
    }
    for (std::size_t e = 0; e < m; ++e) {
      const auto [x, y] = edges[e];
      if (t.dist[x] == kNone || t.dist[y] == kNone) continue;
      if (t.parent_edge[x] == e || t.parent_edge[y] == e) continue;
      if (x == r || y == r || t.branch[x] == t.branch[y]) continue;
      candidates.push_back({t.dist[x] + t.dist[y] + 1, static_cast<std::uint32_t>(r),
                            static_cast<std::uint32_t>(e)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.length < b.length; });

  std::vector<std::uint64_t> zobrist(m);
  for (std::size_t e = 0; e < m; ++e) zobrist[e] = splitmix64(e);

  const std::size_t words = (m + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows;
  std::vector<std::int64_t> pivot_row(m, -1);
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint32_t> cycle_edges;
  std::vector<std::size_t> path_x;
  std::vector<std::size_t> path_y;

  for (const auto& cand : candidates) {
    if (basis.size() == rank) break;
    const Tree& t = trees[cand.root];
    const auto [x, y] = edges[cand.edge];
    cycle_edges.assign(1, cand.edge);
    path_x.clear();
    path_y.clear();
    for (std::size_t v = x; v != cand.root; v = t.parent[v]) {
      path_x.push_back(v);
      cycle_edges.push_back(t.parent_edge[v]);
    }
    for (std::size_t v = y; v != cand.root; v = t.parent[v]) {
      path_y.push_back(v);
      cycle_edges.push_back(t.parent_edge[v]);
    }
    std::uint64_t key = 0;
    for (auto e : cycle_edges) key ^= zobrist[e];
    if (!seen.insert(key).second) continue;

    std::vector<std::uint64_t> row(words, 0);
    for (auto e : cycle_edges) row[e / 64] ^= std::uint64_t{1} << (e % 64);
    std::size_t w = 0;
    while (true) {
      while (w < words && row[w] == 0) ++w;
      if (w == words) break;
      const std::size_t p = w * 64 + static_cast<std::size_t>(__builtin_ctzll(row[w]));
      if (pivot_row[p] < 0) {
        pivot_row[p] = static_cast<std::int64_t>(rows.size());
        break;
      }
      const auto& other = rows[static_cast<std::size_t>(pivot_row[p])];
      for (std::size_t k = w; k < words; ++k) row[k] ^= other[k];
    }
    if (w == words) continue;
    rows.push_back(std::move(row));

    Cycle c;
    c.vertices.reserve(cand.length);
    c.vertices.push_back(cand.root);
    c.vertices.insert(c.vertices.end(), path_x.rbegin(), path_x.rend());
    c.vertices.insert(c.vertices.end(), path_y.begin(), path_y.end());
    basis.push_back(std::move(c));
  }
  if (basis.size() != rank) throw InternalError("cycle basis is rank deficient");
  return basis;
}

namespace {

// Vertex ids are positions in an edge-insertion-ordered adjacency, mirroring a
// graph built edge by edge from g.edges().
struct InsertionOrder {
  std::vector<std::size_t> nodes;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj;  // (neighbour, edge)
  std::vector<std::pair<std::size_t, std::size_t>> edge_order;       // (u, edge) as reported
};

InsertionOrder insertion_order(const UndirectedGraph& g) {
  InsertionOrder out;
  const std::size_t n = g.vertex_count();
  out.adj.resize(n);
  std::vector<bool> present(n, false);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto [a, b] = g.edges()[e];
    for (auto x : {a, b}) {
      if (!present[x]) {
        present[x] = true;
        out.nodes.push_back(x);
      }
    }
    out.adj[a].emplace_back(b, e);
    out.adj[b].emplace_back(a, e);
  }
  std::vector<bool> done(n, false);
  for (auto u : out.nodes) {
    for (const auto& [v, e] : out.adj[u]) {
      if (!done[v]) out.edge_order.emplace_back(u, e);
    }
    done[u] = true;
  }
  return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

using Bits = std::vector<std::uint64_t>;

bool test_bit(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1U; }
void flip_bit(Bits& b, std::size_t i) { b[i / 64] ^= std::uint64_t{1} << (i % 64); }

// Orders an edge set that forms one simple cycle into a vertex walk.
Cycle walk_cycle(const UndirectedGraph& g, const std::vector<std::size_t>& edge_ids) {
  std::unordered_map<std::size_t, std::vector<std::size_t>> nb;
  for (auto e : edge_ids) {
    const auto [a, b] = g.edges()[e];
    nb[a].push_back(b);
    nb[b].push_back(a);
  }
  for (const auto& [v, list] : nb) {
    if (list.size() != 2) throw InternalError("basis element is not a simple cycle");
  }
  Cycle c;
  const std::size_t start = g.edges()[edge_ids.front()].first;
  std::size_t prev = start;
  std::size_t cur = g.edges()[edge_ids.front()].second;
  c.vertices.push_back(start);
  while (cur != start) {
    c.vertices.push_back(cur);
    const auto& two = nb[cur];
    const std::size_t next = two[0] == prev ? two[1] : two[0];
    prev = cur;
    cur = next;
  }
  if (c.vertices.size() != edge_ids.size()) throw InternalError("basis element is not a simple cycle");
  return c;
}

using LiftedGraph = std::vector<std::vector<std::pair<std::size_t, std::size_t>>>;

// Edge ids of a shortest source-target path, found by a bidirectional search
// that alternates directions, expands in (distance, push order) and keeps the
// first meeting point of least total length.
std::vector<std::size_t> bidirectional_path(const LiftedGraph& adj, std::size_t source,
                                            std::size_t target) {
  using Entry = std::tuple<int, std::uint64_t, std::size_t>;
  const std::size_t n = adj.size();
  std::array<std::priority_queue<Entry, std::vector<Entry>, std::greater<>>, 2> fringe;
  std::array<std::vector<int>, 2> final_dist{std::vector<int>(n, -1), std::vector<int>(n, -1)};
  std::array<std::vector<int>, 2> seen{std::vector<int>(n, -1), std::vector<int>(n, -1)};
  std::array<std::vector<std::size_t>, 2> parent{std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
  std::array<std::vector<std::size_t>, 2> parent_edge{std::vector<std::size_t>(n),
                                                      std::vector<std::size_t>(n)};
  const std::array<std::size_t, 2> ends{source, target};
  auto trace = [&](int dir, std::size_t x) {
    std::vector<std::size_t> edges;
    for (; x != ends[static_cast<std::size_t>(dir)]; x = parent[dir][x]) edges.push_back(parent_edge[dir][x]);
    return edges;
  };
  std::uint64_t counter = 0;
  seen[0][source] = 0;
  seen[1][target] = 0;
  fringe[0].emplace(0, counter++, source);
  fringe[1].emplace(0, counter++, target);
  int best = -1;
  std::vector<std::size_t> best_path;
  int dir = 1;
  while (!fringe[0].empty() && !fringe[1].empty()) {
    dir = 1 - dir;
    const auto [d, order, v] = fringe[dir].top();
    fringe[dir].pop();
    if (final_dist[dir][v] >= 0) continue;
    final_dist[dir][v] = d;
    if (final_dist[1 - dir][v] >= 0) return best_path;
    for (const auto& [w, e] : adj[v]) {
      const int len = d + 1;
      if (final_dist[dir][w] >= 0) continue;
      if (seen[dir][w] >= 0 && len >= seen[dir][w]) continue;
      seen[dir][w] = len;
      fringe[dir].emplace(len, counter++, w);
      parent[dir][w] = v;
      parent_edge[dir][w] = e;
      if (seen[0][w] >= 0 && seen[1][w] >= 0) {
        const int total = seen[0][w] + seen[1][w];
        if (best < 0 || best > total) {
          best = total;
          auto forward = trace(0, w);
          std::reverse(forward.begin(), forward.end());
          const auto backward = trace(1, w);
          forward.insert(forward.end(), backward.begin(), backward.end());
          best_path = std::move(forward);
        }
      }
    }
  }
  throw InternalError("no path in the lifted graph");
}

}  // namespace

std::vector<Cycle> de_pina_cycle_basis(const UndirectedGraph& g) {
  const std::size_t n = g.vertex_count();
  const std::size_t m = g.edge_count();
  const auto order = insertion_order(g);
  const std::size_t words = (m + 63) / 64;

  std::vector<std::size_t> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  std::vector<std::size_t> chords;
  for (const auto& [u, e] : order.edge_order) {
    const auto [a, b] = g.edges()[e];
    const auto ra = find_root(uf, a);
    const auto rb = find_root(uf, b);
    if (ra != rb) {
      uf[ra] = rb;
    } else {
      chords.push_back(e);
    }
  }

  std::vector<Bits> orth;
  orth.reserve(chords.size());
  for (auto e : chords) {
    Bits b(words, 0);
    flip_bit(b, e);
    orth.push_back(std::move(b));
  }

  // Lifted double cover: x is x on the base sheet, x + n on the other.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> lifted(2 * n);
  std::vector<int> dist(2 * n);
  std::deque<std::size_t> queue;
  auto search = [&](std::size_t source, std::size_t target) {
    std::fill(dist.begin(), dist.end(), -1);
    queue.assign(1, source);
    dist[source] = 0;
    while (!queue.empty()) {
      const auto x = queue.front();
      queue.pop_front();
      if (x == target) return dist[x];
      for (const auto& [y, e] : lifted[x]) {
        (void)e;
        if (dist[y] >= 0) continue;
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
    return -1;
  };

  std::vector<Cycle> basis;
  while (!orth.empty()) {
    Bits base = std::move(orth.back());
    orth.pop_back();

    for (auto& list : lifted) list.clear();
    auto link = [&](std::size_t x, std::size_t y, std::size_t e) {
      lifted[x].emplace_back(y, e);
      lifted[y].emplace_back(x, e);
    };
    for (const auto& [u, e] : order.edge_order) {
      const auto [a, b] = g.edges()[e];
      const std::size_t v = u == a ? b : a;
      if (test_bit(base, e)) {
        link(u, v + n, e);
        link(u + n, v, e);
      } else {
        link(u, v, e);
        link(u + n, v + n, e);
      }
    }

    std::size_t start = 0;
    int best = -1;
    for (auto x : order.nodes) {
      const int d = search(x, x + n);
      if (d >= 0 && (best < 0 || d < best)) {
        best = d;
        start = x;
      }
    }
    if (best < 0) throw InternalError("no cycle meets the orthogonal vector");
    const auto walk = bidirectional_path(lifted, start, start + n);
    std::unordered_map<std::size_t, std::size_t> multiplicity;
    for (auto e : walk) ++multiplicity[e];
    std::vector<std::size_t> kept;
    Bits cycle(words, 0);
    for (auto e : walk) {
      if (multiplicity[e] % 2 == 1 && !test_bit(cycle, e)) {
        flip_bit(cycle, e);
        kept.push_back(e);
      }
    }
    basis.push_back(walk_cycle(g, kept));

    for (auto& s : orth) {
      std::size_t parity = 0;
      for (std::size_t w = 0; w < words; ++w) parity += static_cast<std::size_t>(__builtin_popcountll(s[w] & cycle[w]));
      if (parity % 2 == 1) {
        for (std::size_t w = 0; w < words; ++w) s[w] ^= base[w];
      }
    }
  }
  return basis;
}

std::map<std::size_t, std::size_t> cycle_length_histogram(const std::vector<Cycle>& basis) {
  std::map<std::size_t, std::size_t> out;
  for (const auto& c : basis) ++out[c.length()];
  return out;
}

GraphStats full_stats(const UndirectedGraph& g) {
  GraphStats s;
  s.vertices = g.vertex_count();
  s.edges = g.edge_count();
  s.density = density(g);
  s.clustering = clustering_coefficients(g);
  s.wiener = wiener_index(g);
  const auto c = eigenvector_centrality(g);
  s.centre = c.centre;
  s.centrality_diff = c.diff;
  s.mcb_histogram = cycle_length_histogram(minimum_cycle_basis(g));
  return s;
}

std::string format_histogram(const std::map<std::size_t, std::size_t>& histogram) {
  std::string out;
  for (const auto& [length, count] : histogram) {
    if (!out.empty()) out += ", ";
    out += "[" + std::to_string(length) + "," + std::to_string(count) + "]";
  }
  return out;
}

}  // namespace clusterml
