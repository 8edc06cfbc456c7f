#include "clusterml/embedding.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_map>

#include "clusterml/errors.hpp"
#include "clusterml/laurent.hpp"

namespace clusterml {

std::vector<std::uint64_t> RootSystemData::degrees() const {
  std::vector<std::uint64_t> out;
  out.reserve(exponents.size());
  for (auto e : exponents) out.push_back(e + 1);
  return out;
}

RootSystemData root_system(const DynkinType& type) {
  RootSystemData out{type, {}, 0};
  const std::uint64_t n = type.rank;
  switch (type.family) {
    case 'A':
      for (std::uint64_t i = 1; i <= n; ++i) out.exponents.push_back(i);
      out.coxeter = n + 1;
      break;
    case 'B':
    case 'C':
      for (std::uint64_t i = 1; i <= n; ++i) out.exponents.push_back(2 * i - 1);
      out.coxeter = 2 * n;
      break;
    case 'D':
      for (std::uint64_t i = 1; i < n; ++i) out.exponents.push_back(2 * i - 1);
      out.exponents.push_back(n - 1);
      std::sort(out.exponents.begin(), out.exponents.end());
      out.coxeter = 2 * n - 2;
      break;
    case 'E':
      if (n == 6) {
        out.exponents = {1, 4, 5, 7, 8, 11};
        out.coxeter = 12;
      } else if (n == 7) {
        out.exponents = {1, 5, 7, 9, 11, 13, 17};
        out.coxeter = 18;
      } else if (n == 8) {
        out.exponents = {1, 7, 11, 13, 17, 19, 23, 29};
        out.coxeter = 30;
      }
      break;
    case 'F':
      if (n == 4) {
        out.exponents = {1, 5, 7, 11};
        out.coxeter = 12;
      }
      break;
    case 'G':
      if (n == 2) {
        out.exponents = {1, 5};
        out.coxeter = 6;
      }
      break;
    default:
      break;
  }
  if (out.exponents.size() != n || n == 0) {
    throw DomainError("no root system data for type " + type.name());
  }
  return out;
}

namespace {

std::uint64_t exact_quotient(const Integer& num, const Integer& den) {
  if (num % den != 0) throw InternalError("cluster count is not integral");
  return static_cast<std::uint64_t>(num / den);
}

}  // namespace

std::uint64_t cluster_count_formula(const DynkinType& type) {
  const auto data = root_system(type);
  Integer num = 1;
  Integer den = 1;
  for (auto e : data.exponents) {
    num *= e + data.coxeter + 1;
    den *= e + 1;
  }
  return exact_quotient(num, den);
}

std::uint64_t cluster_count_from_degrees(const DynkinType& type) {
  const auto data = root_system(type);
  Integer num = 1;
  Integer den = 1;
  for (auto d : data.degrees()) {
    num *= d + data.coxeter;
    den *= d;
  }
  return exact_quotient(num, den);
}

std::string Ratio::to_string() const {
  if (integral()) return std::to_string(numerator / denominator);
  const auto g = std::gcd(numerator, denominator);
  return std::to_string(numerator / g) + "/" + std::to_string(denominator / g);
}

PermutationCount permutation_factor(const Seed& initial, const GenerationLimits& limits) {
  PermutationCount out;
  out.exact = generate_full(initial, Equivalence::exact, Payload::seeds, limits).vertex_count();
  out.permutation =
      generate_full(initial, Equivalence::permutation, Payload::seeds, limits).vertex_count();
  return out;
}

namespace {

// Index i when `value` is exactly x_{i+1}.
std::optional<std::size_t> initial_variable_index(const LaurentValue& value) {
  if (!value.denominator().is_one()) return std::nullopt;
  const auto& terms = value.numerator().terms();
  if (terms.size() != 1 || terms.front().coeff != 1) return std::nullopt;
  const auto& m = terms.front().monomial;
  if (m.degree() != 1) return std::nullopt;
  for (std::size_t i = 0; i < m.nvars(); ++i) {
    if (m[i] == 1) return i;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::vector<std::size_t>> orbit_permutations(const ExchangeGraph& full) {
  std::set<std::vector<std::size_t>> found;
  for (std::size_t v = 0; v < full.vertex_count(); ++v) {
    const Seed& s = full.seed(v);
    std::vector<std::size_t> perm;
    perm.reserve(s.rank());
    for (std::size_t i = 0; i < s.rank(); ++i) {
      auto idx = initial_variable_index(s.variable(i));
      if (!idx) break;
      perm.push_back(*idx);
    }
    if (perm.size() == s.rank()) found.insert(std::move(perm));
  }
  return {found.begin(), found.end()};
}

Ratio vertex_ratio(const ExchangeGraph& seeds, const ExchangeGraph& quivers) {
  if (quivers.vertex_count() == 0) throw DomainError("empty quiver exchange graph");
  return {seeds.vertex_count(), quivers.vertex_count()};
}

namespace {

struct MatrixHash {
  std::size_t operator()(const ExchangeMatrix& b) const noexcept { return b.hash(); }
};

}  // namespace

EmbeddingProfile cycle_embedding(const std::vector<ExchangeMatrix>& cycle, const ExchangeGraph& seeds) {
  const std::size_t s = cycle.size();
  if (s < 3) throw DomainError("a quiver cycle needs at least three quivers");
  if (seeds.payload() != Payload::seeds) throw DomainError("cycle embedding needs a seed exchange graph");

  std::unordered_map<ExchangeMatrix, std::size_t, MatrixHash> position;
  for (std::size_t i = 0; i < s; ++i) {
    if (!position.emplace(cycle[i], i).second) throw DomainError("quiver cycle repeats a quiver");
  }
  // Mutation indices joining consecutive quivers.
  std::vector<std::vector<std::size_t>> step(s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t k = 0; k < cycle[i].rank(); ++k) {
      if (mutate(cycle[i], k) == cycle[(i + 1) % s]) step[i].push_back(k);
    }
    if (step[i].empty()) throw DomainError("consecutive quivers are not related by a mutation");
  }

  const std::size_t n = seeds.vertex_count();
  std::vector<std::int64_t> pos(n, -1);
  std::size_t members = 0;
  for (std::size_t v = 0; v < n; ++v) {
    auto it = position.find(seeds.matrix(v));
    if (it != position.end()) {
      pos[v] = static_cast<std::int64_t>(it->second);
      ++members;
    }
  }

  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : seeds.edges()) {
    if (pos[e.a] < 0 || pos[e.b] < 0) continue;
    const auto pa = static_cast<std::size_t>(pos[e.a]);
    const auto pb = static_cast<std::size_t>(pos[e.b]);
    std::size_t from;
    if ((pa + 1) % s == pb) {
      from = pa;
    } else if ((pb + 1) % s == pa) {
      from = pb;
    } else {
      continue;
    }
    if (std::find(step[from].begin(), step[from].end(), e.index) == step[from].end()) continue;
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }

  EmbeddingProfile out;
  out.s = s;
  out.seed_vertices = members;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> sizes;
  for (std::size_t v = 0; v < n; ++v) {
    if (pos[v] < 0 || seen[v]) continue;
    std::size_t size = 0;
    std::deque<std::size_t> queue{v};
    seen[v] = true;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      ++size;
      if (adj[u].size() != 2 && !out.anomaly) {
        out.anomaly = "seed vertex " + std::to_string(u) + " has degree " +
                      std::to_string(adj[u].size()) + " in the preimage";
      }
      for (auto w : adj[u]) {
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    sizes.push_back(size);
  }
  out.q = sizes.size();
  if (!sizes.empty()) {
    out.t = sizes.front();
    if (std::any_of(sizes.begin(), sizes.end(), [&](std::size_t x) { return x != out.t; })) {
      if (!out.anomaly) out.anomaly = "preimage cycles have unequal lengths";
    }
    if (out.t % s != 0 && !out.anomaly) out.anomaly = "preimage cycle length is not a multiple of s";
    out.p = out.t / s;
  } else if (!out.anomaly) {
    out.anomaly = "no seed carries a quiver of the cycle";
  }
  return out;
}

std::vector<ExchangeMatrix> cycle_matrices(const Cycle& cycle, const ExchangeGraph& quivers) {
  std::vector<ExchangeMatrix> out;
  out.reserve(cycle.length());
  for (auto v : cycle.vertices) out.push_back(quivers.matrix(v));
  return out;
}

bool is_commuting_square(const std::vector<ExchangeMatrix>& cycle) {
  if (cycle.size() != 4) return false;
  const std::size_t r = cycle.front().rank();
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t l = 0; l < r; ++l) {
      if (k == l || cycle[0](k, l) != 0) continue;
      // Either orientation of the square.
      const auto a = mutate(cycle[0], k);
      const auto b = mutate(a, l);
      const auto c = mutate(cycle[0], l);
      if (a == cycle[1] && b == cycle[2] && c == cycle[3]) return true;
      if (c == cycle[1] && b == cycle[2] && a == cycle[3]) return true;
    }
  }
  return false;
}

EmbeddingSummary mcb_embedding_profile(const ExchangeGraph& seeds, const ExchangeGraph& quivers) {
  if (!seeds.metadata().closed || !quivers.metadata().closed) {
    throw DomainError("embedding profiles need closed exchange graphs");
  }
  EmbeddingSummary out;
  out.ratio = vertex_ratio(seeds, quivers);
  const auto basis = de_pina_cycle_basis(quivers.topology());
  out.basis_lengths = cycle_length_histogram(basis);
  for (const auto& c : basis) {
    auto mats = cycle_matrices(c, quivers);
    auto profile = cycle_embedding(mats, seeds);
    if (profile.anomaly) throw InternalError("cycle embedding anomaly: " + *profile.anomaly);
    ++out.p_histogram[profile.p];
    ++out.q_histogram[profile.q];
    out.profiles.push_back(profile);
    out.cycles.push_back(std::move(mats));
  }
  return out;
}

EmbeddingSummary mcb_embedding_profile(const Seed& initial, const GenerationLimits& limits) {
  const auto seeds = generate_full(initial, Equivalence::exact, Payload::seeds, limits);
  const auto quivers = generate_full(initial, Equivalence::exact, Payload::quivers, limits);
  return mcb_embedding_profile(seeds, quivers);
}

}  // namespace clusterml
