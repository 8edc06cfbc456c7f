#include <doctest.h>

#include <algorithm>
#include <set>

#include "clusterml/analytics.hpp"
#include "clusterml/catalogue.hpp"
#include "clusterml/exchange_graph.hpp"
#include "properties.hpp"

using namespace clusterml;
using clusterml::testing::Rational;

namespace {

UndirectedGraph cycle_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return UndirectedGraph(n, e);
}

UndirectedGraph complete_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return UndirectedGraph(n, e);
}

UndirectedGraph path_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return UndirectedGraph(n, e);
}

UndirectedGraph petersen() {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);
    e.emplace_back(i, i + 5);
    e.emplace_back(5 + i, 5 + (i + 2) % 5);
  }
  return UndirectedGraph(10, e);
}

UndirectedGraph cube() {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t v = 0; v < 8; ++v) {
    for (std::size_t bit : {1u, 2u, 4u}) {
      if (!(v & bit)) e.emplace_back(v, v | bit);
    }
  }
  return UndirectedGraph(8, e);
}

std::uint64_t floyd_wiener(const UndirectedGraph& g) {
  const std::size_t n = g.vertex_count();
  const std::uint64_t inf = 1u << 30;
  std::vector<std::vector<std::uint64_t>> d(n, std::vector<std::uint64_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [a, b] : g.edges()) d[a][b] = d[b][a] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) s += d[i][j];
  }
  return s;
}

}  // namespace

TEST_CASE("A2 closes on ten seeds and two quivers") {
  const Seed a2 = builtin_seed("A2");
  const auto g = generate_full(a2);
  CHECK(g.vertex_count() == 10);
  CHECK(g.edge_count() == 10);
  CHECK(g.metadata().closed);
  CHECK(generate_full(a2, Equivalence::exact, Payload::quivers).vertex_count() == 2);

  // The five clusters as numbers, in both orders.
  const Rational x1(2, 3), x2(5, 7);
  const Rational y1 = (x2 + 1) / x1, y2 = (x1 + 1) / x2, z = (x1 + x2 + 1) / (x1 * x2);
  std::set<std::pair<Rational, Rational>> expected;
  for (auto [a, b] : std::vector<std::pair<Rational, Rational>>{{x1, x2}, {y1, x2}, {x1, y2}, {y1, z}, {z, y2}}) {
    expected.emplace(a, b);
    expected.emplace(b, a);
  }
  std::set<std::pair<Rational, Rational>> computed;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    computed.emplace(clusterml::testing::evaluate(g.seed(v).variable(0), {x1, x2}),
                     clusterml::testing::evaluate(g.seed(v).variable(1), {x1, x2}));
  }
  CHECK(computed == expected);
  CHECK(clusterml::testing::even_cycle_law(1, 1).ok());
}

TEST_CASE("finite type counts") {
  const std::vector<std::pair<std::string, std::size_t>> catalan{{"A1", 2}, {"A2", 5}, {"A3", 14}, {"A4", 42}};
  for (const auto& [name, n] : catalan) {
    CHECK(generate_full(builtin_seed(name), Equivalence::permutation).vertex_count() == n);
  }
  CHECK(generate_full(builtin_seed("B3"), Equivalence::permutation).vertex_count() == 20);
  CHECK(generate_full(builtin_seed("G2"), Equivalence::permutation).vertex_count() == 8);
}

TEST_CASE("breadth-first levels") {
  const auto g = generate_seed_graph(builtin_seed("A4"), 4);
  CHECK(seeds_per_depth(g) == std::vector<std::size_t>{1, 5, 14, 32, 72});
  CHECK(g.max_depth() == 4);
  CHECK_FALSE(g.metadata().closed);
  for (std::size_t v = 1; v < g.vertex_count(); ++v) CHECK(g.depth(v - 1) <= g.depth(v));
  for (const auto& e : g.edges()) CHECK(std::abs(g.depth(e.a) - g.depth(e.b)) <= 1);

  const auto single = generate_seed_graph(builtin_seed("A4"), 0);
  CHECK(single.vertex_count() == 1);
  CHECK(single.edge_count() == 0);
  CHECK(generate_quiver_graph(builtin_seed("I2"), 4).vertex_count() == 107);
}

TEST_CASE("resource caps keep the partial graph") {
  GenerationLimits limits;
  limits.max_vertices = 50;
  try {
    generate_full(builtin_seed("A4"), Equivalence::exact, Payload::seeds, limits);
    FAIL("expected a cap");
  } catch (const ResourceLimitError& e) {
    CHECK(e.partial().metadata().partial);
    CHECK(e.completed_depth() == 3);
    CHECK(e.partial().vertex_count() > 32);
  }
}

TEST_CASE("density, clustering and Wiener index on known graphs") {
  CHECK(density(complete_graph(5)) == doctest::Approx(1.0));
  CHECK(density(cycle_graph(6)) == doctest::Approx(0.4));
  CHECK(clustering_coefficients(complete_graph(4)).triangle == doctest::Approx(1.0));
  CHECK(clustering_coefficients(cycle_graph(4)).square == doctest::Approx(1.0));
  CHECK(clustering_coefficients(cycle_graph(4)).triangle == doctest::Approx(0.0));
  CHECK(clustering_coefficients(path_graph(5)).square == doctest::Approx(0.0));
  for (std::size_t n : {2u, 5u, 9u}) CHECK(wiener_index(path_graph(n)).full == n * (n * n - 1) / 6);
  for (std::size_t n : {4u, 8u, 12u}) CHECK(wiener_index(cycle_graph(n)).full == n * n * n / 8);
  CHECK(wiener_index(petersen()).full == 75);
  CHECK_THROWS(wiener_index(UndirectedGraph(3, {{0, 1}})));
}

TEST_CASE("triangle clustering and Wiener index against brute force") {
  clusterml::Rng rng(3);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 3 + rng() % 10;
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) e.emplace_back(rng() % i, i);  // keeps the graph connected
      for (std::size_t j = i + 2; j < n; ++j) {
        if (rng() % 3 == 0) e.emplace_back(i, j);
      }
    }
    const UndirectedGraph g(n, e);
    CHECK(wiener_index(g).full == floyd_wiener(g));
    const auto tri = triangle_clustering(g);
    for (std::size_t v = 0; v < n; ++v) {
      const auto& nb = g.neighbours(v);
      std::size_t links = 0;
      for (std::size_t a = 0; a < nb.size(); ++a) {
        for (std::size_t b = a + 1; b < nb.size(); ++b) links += g.adjacent(nb[a], nb[b]);
      }
      const double k = static_cast<double>(nb.size());
      CHECK(tri[v] == doctest::Approx(nb.size() < 2 ? 0.0 : links / (k * (k - 1) / 2)));
    }
  }
}

TEST_CASE("eigenvector centrality") {
  std::vector<std::pair<std::size_t, std::size_t>> star{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  const auto c = eigenvector_centrality(UndirectedGraph(5, star));
  REQUIRE(c.centre);
  CHECK(*c.centre == 0);
  CHECK(c.values[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(c.values[1] == doctest::Approx(1 / std::sqrt(8.0)).epsilon(1e-6));
  REQUIRE(c.diff);
  CHECK(*c.diff == doctest::Approx(c.values[0] - c.values[1]));

  const auto flat = eigenvector_centrality(cycle_graph(7));
  CHECK_FALSE(flat.centre);
  CHECK_FALSE(flat.diff);

  const auto leaf = eigenvector_centrality(UndirectedGraph(5, star), {}, 2);
  CHECK(*leaf.centre == 0);
  CHECK_FALSE(leaf.diff);
}

TEST_CASE("minimum cycle bases of known graphs") {
  CHECK(format_histogram(cycle_length_histogram(minimum_cycle_basis(complete_graph(4)))) == "[3,3]");
  CHECK(format_histogram(cycle_length_histogram(minimum_cycle_basis(petersen()))) == "[5,6]");
  CHECK(format_histogram(cycle_length_histogram(minimum_cycle_basis(cube()))) == "[4,5]");
  CHECK(format_histogram(cycle_length_histogram(de_pina_cycle_basis(cube()))) == "[4,5]");
  CHECK(minimum_cycle_basis(path_graph(6)).empty());
  CHECK(connected_components(UndirectedGraph(5, {{0, 1}, {2, 3}})) == 3);
}

TEST_CASE("full statistics of a seed graph") {
  const auto s = full_stats(generate_seed_graph(builtin_seed("F4"), 4).topology());
  CHECK(s.vertices == 65);
  CHECK(s.wiener.full == 10700);
  CHECK(format_histogram(s.mcb_histogram) == "[4,17], [6,3]");
  REQUIRE(s.centre);
  CHECK(*s.centre == 0);
}
