#include "clusterml/catalogue.hpp"

#include <charconv>
#include <deque>

#include "clusterml/errors.hpp"

namespace clusterml {

std::optional<DynkinType> parse_dynkin(std::string_view name) {
  if (name.size() < 2) return std::nullopt;
  const char family = name[0];
  std::size_t rank = 0;
  const auto* first = name.data() + 1;
  const auto* last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, rank);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  switch (family) {
    case 'A':
      if (rank >= 1 && rank <= 8) return DynkinType{family, rank};
      break;
    case 'B':
    case 'C':
      if (rank >= 2 && rank <= 8) return DynkinType{family, rank};
      break;
    case 'D':
      if (rank >= 3 && rank <= 8) return DynkinType{family, rank};
      break;
    case 'E':
      if (rank >= 6 && rank <= 8) return DynkinType{family, rank};
      break;
    case 'F':
      if (rank == 4) return DynkinType{family, rank};
      break;
    case 'G':
      if (rank == 2) return DynkinType{family, rank};
      break;
    default:
      break;
  }
  return std::nullopt;
}

ExchangeMatrix cartan_matrix(const DynkinType& type) {
  const std::size_t n = type.rank;
  ExchangeMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 2;
  auto link = [&](std::size_t i, std::size_t j, std::int64_t aij, std::int64_t aji) {
    a(i, j) = aij;
    a(j, i) = aji;
  };
  switch (type.family) {
    case 'A':
      for (std::size_t i = 0; i + 1 < n; ++i) link(i, i + 1, -1, -1);
      break;
    case 'B':
      for (std::size_t i = 0; i + 2 < n; ++i) link(i, i + 1, -1, -1);
      link(n - 2, n - 1, -1, -2);
      break;
    case 'C':
      for (std::size_t i = 0; i + 2 < n; ++i) link(i, i + 1, -1, -1);
      link(n - 2, n - 1, -2, -1);
      break;
    case 'D':
      // Chain 0..n-3 with two leaves n-2 and n-1 attached to n-3.
      for (std::size_t i = 0; i + 3 < n; ++i) link(i, i + 1, -1, -1);
      link(n - 3, n - 2, -1, -1);
      link(n - 3, n - 1, -1, -1);
      break;
    case 'E':
      // Chain 0..n-2 with node n-1 attached to node 2.
      for (std::size_t i = 0; i + 2 < n; ++i) link(i, i + 1, -1, -1);
      link(2, n - 1, -1, -1);
      break;
    case 'F':
      link(0, 1, -1, -1);
      link(1, 2, -1, -2);
      link(2, 3, -1, -1);
      break;
    case 'G':
      link(0, 1, -1, -3);
      break;
    default:
      throw ConfigError("unsupported Dynkin family");
  }
  return a;
}

ExchangeMatrix bipartite_exchange_matrix(const DynkinType& type) {
  const ExchangeMatrix a = cartan_matrix(type);
  const std::size_t n = type.rank;
  // Two-colour the (tree) diagram starting from node 0.
  std::vector<int> colour(n, -1);
  colour[0] = 0;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && a(i, j) != 0 && colour[j] < 0) {
        colour[j] = 1 - colour[i];
        queue.push_back(j);
      }
    }
  }
  ExchangeMatrix b(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || a(i, j) == 0) continue;
      const std::int64_t magnitude = -a(i, j);
      b(i, j) = colour[i] == 0 ? magnitude : -magnitude;
    }
  }
  return b;
}

Seed builtin_seed(std::string_view name) {
  if (name == "A13") {
    // Oriented 3-path 0->1->2->3 closed by the single arrow 0->3.
    return Seed::initial(ExchangeMatrix{{0, 1, 0, 1}, {-1, 0, 1, 0}, {0, -1, 0, 1}, {-1, 0, -1, 0}});
  }
  if (name == "A22") {
    // Alternating 4-cycle: 0 and 2 are sources, 1 and 3 sinks.
    return Seed::initial(ExchangeMatrix{{0, 1, 0, 1}, {-1, 0, -1, 0}, {0, 1, 0, 1}, {-1, 0, -1, 0}});
  }
  if (name == "I1") {
    return Seed::initial(ExchangeMatrix{{0, 2, 0, 0}, {-2, 0, 1, 0}, {0, -1, 0, 1}, {0, 0, -1, 0}});
  }
  if (name == "I2") {
    return Seed::initial(ExchangeMatrix{{0, 2, 0, -2}, {-2, 0, 2, 0}, {0, -2, 0, 1}, {2, 0, -1, 0}});
  }
  if (auto type = parse_dynkin(name)) {
    return Seed::initial(bipartite_exchange_matrix(*type));
  }
  throw ConfigError("unknown seed name '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names() {
  return {"A2", "A3", "A4", "A5", "B2", "B3", "B4", "B5", "C2",  "C3",  "C4", "C5",
          "D3", "D4", "D5", "F4", "G2", "A13", "A22", "I1", "I2"};
}

}  // namespace clusterml
