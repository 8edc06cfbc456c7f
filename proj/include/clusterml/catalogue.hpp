#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clusterml/seed.hpp"

namespace clusterml {

// Finite Dynkin type such as A4 or F4.
struct DynkinType {
  char family = 'A';
  std::size_t rank = 0;

  std::string name() const { return std::string(1, family) + std::to_string(rank); }
  friend bool operator==(const DynkinType&, const DynkinType&) = default;
};

// Parses "A4", "B3", "F4", ... Returns nullopt for non-Dynkin names such as
// the affine "A13"/"A22" or the wild "I1"/"I2".
std::optional<DynkinType> parse_dynkin(std::string_view name);

// Cartan matrix in the convention a_ij = 2(a_i, a_j)/(a_i, a_i); for B_n the
// last simple root is short, for C_n it is long.
ExchangeMatrix cartan_matrix(const DynkinType& type);

// Exchange matrix of a Dynkin diagram with bipartite orientation: node 0 is
// a source, b_ij = +-|a_ij| alternating by bipartition class.
ExchangeMatrix bipartite_exchange_matrix(const DynkinType& type);

// Initial seed {x1..xr} for a catalogue name: A1-A8, B2-B8, C2-C8, D3-D8,
// E6-E8, F4, G2, the affine A~3 orientations A13 and A22, and the wild I1, I2.
Seed builtin_seed(std::string_view name);

// The names used throughout the experiments.
std::vector<std::string> builtin_names();

}  // namespace clusterml
