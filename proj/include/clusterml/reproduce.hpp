#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clusterml/exchange_graph.hpp"

namespace clusterml {

struct CheckRow {
  std::string item;
  std::string field;
  std::string expected;
  std::string computed;
  bool pass = false;
};

struct ReproduceReport {
  int table = 0;
  std::string title;
  std::vector<CheckRow> rows;

  bool passed() const;
  std::vector<CheckRow> failures() const;
  std::string to_csv() const;
};

struct ReproduceOptions {
  std::uint64_t seed = 42;
  std::size_t repeats = 1;
  // Train the classifiers of tables 8-10 and check the published metrics
  // against tolerance bands; otherwise only the data shapes are compared.
  bool metrics_band = false;
  // Rank-5 rows of table 6.
  bool include_rank5 = false;
  GenerationLimits limits;
};

// Tables 1-10 of the reference results: 1 seed graphs at depth 4, 2 full
// finite-type graphs, 3 permutation factors and orbits, 4 quiver graphs at
// depth 4, 5-6 seed/quiver ratios, 7 cycle embeddings, 8 binary
// classification, 9 depth sweep, 10 true-vs-fake classification.
ReproduceReport reproduce_table(int table, const ReproduceOptions& options = {});
std::vector<int> reproducible_tables();

}  // namespace clusterml
