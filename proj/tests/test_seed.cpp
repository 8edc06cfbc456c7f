#include <doctest.h>

#include "clusterml/catalogue.hpp"
#include "clusterml/errors.hpp"
#include "clusterml/seed.hpp"
#include "properties.hpp"

using namespace clusterml;

TEST_CASE("matrix mutation rule") {
  const ExchangeMatrix b{{0, 1, 0}, {-1, 0, 1}, {0, -1, 0}};
  const auto m = mutate(b, 1);
  CHECK(m == ExchangeMatrix{{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});
  CHECK(mutate(m, 1) == b);
  CHECK(b.is_sign_coherent());
  CHECK(b.is_skew_symmetric());
  CHECK(b.max_cycle_product() == 1);
}

TEST_CASE("A2 exchange relations") {
  const Seed s = builtin_seed("A2");
  CHECK(s.matrix() == ExchangeMatrix{{0, 1}, {-1, 0}});
  const Seed m0 = mutate(s, 0);
  CHECK(m0.variable(0).to_string() == "(x2+1)/(x1)");
  CHECK(m0.variable(1).to_string() == "(x2)/(1)");
  const Seed m01 = mutate(m0, 1);
  CHECK(m01.variable(1).to_string() == "(x1+x2+1)/(x1*x2)");
  CHECK(mutate(m0, 0) == s);
  CHECK_THROWS_AS(exchange(s, 2), DomainError);
}

TEST_CASE("skew-symmetrizers") {
  const auto b = builtin_seed("B3").matrix();
  const auto d = find_skew_symmetrizer(b);
  REQUIRE(d);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(d->diag[i] * b(i, j) == -d->diag[j] * b(j, i));
  }
  CHECK(*std::min_element(d->diag.begin(), d->diag.end()) == 1);
  CHECK(find_skew_symmetrizer(ExchangeMatrix{{0, 1, 1}, {-2, 0, 1}, {-1, -1, 0}}) == std::nullopt);
}

TEST_CASE("permutation equivalence") {
  const Seed s = mutate(builtin_seed("A3"), 1);
  const std::vector<std::size_t> perm{2, 0, 1};
  const Seed p = s.permuted(perm);
  CHECK(p.variable(0) == s.variable(2));
  CHECK(p.matrix()(0, 1) == s.matrix()(2, 0));
  CHECK(canonical_form(p, Equivalence::permutation) == canonical_form(s, Equivalence::permutation));
  CHECK(canonical_form(p, Equivalence::exact) != canonical_form(s, Equivalence::exact));
  CHECK(parse_equivalence("perm") == Equivalence::permutation);
  CHECK_THROWS_AS(parse_equivalence("loose"), ConfigError);
}

TEST_CASE("mutation types") {
  CHECK(classify_type(builtin_seed("A4").matrix(), 1000) == MutationType::finite);
  CHECK(classify_type(ExchangeMatrix{{0, 2, -2}, {-2, 0, 2}, {2, -2, 0}}, 1000) == MutationType::finite_mutation);
  CHECK(classify_type(ExchangeMatrix{{0, 3}, {-3, 0}}, 1000) == MutationType::infinite);
}

TEST_CASE("catalogue") {
  CHECK(parse_dynkin("F4") == DynkinType{'F', 4});
  CHECK_FALSE(parse_dynkin("A13"));
  CHECK_THROWS_AS(builtin_seed("Q7"), ConfigError);
  for (const auto& name : builtin_names()) {
    const Seed s = builtin_seed(name);
    CHECK(find_skew_symmetrizer(s.matrix()));
  }
  CHECK(builtin_seed("I1").rank() == 4);
}
