#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clusterml/analytics.hpp"
#include "clusterml/catalogue.hpp"
#include "clusterml/exchange_graph.hpp"

namespace clusterml {

struct RootSystemData {
  DynkinType type;
  std::vector<std::uint64_t> exponents;
  std::uint64_t coxeter = 0;

  std::vector<std::uint64_t> degrees() const;
};

// Exponents and Coxeter number for A_n, B_n, C_n, D_n, E6-E8, F4, G2.
RootSystemData root_system(const DynkinType& type);

// prod (e_i + h + 1) / (e_i + 1), evaluated exactly.
std::uint64_t cluster_count_formula(const DynkinType& type);
// Same count from the degree form prod (d_i + h) / d_i.
std::uint64_t cluster_count_from_degrees(const DynkinType& type);

struct Ratio {
  std::size_t numerator = 0;
  std::size_t denominator = 1;

  bool integral() const noexcept { return denominator != 0 && numerator % denominator == 0; }
  double value() const noexcept { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  std::string to_string() const;
};

struct PermutationCount {
  std::size_t exact = 0;        // N'
  std::size_t permutation = 0;  // N
  Ratio factor() const { return {exact, permutation}; }
};

// Generates the full exchange graph in both equivalence modes.
PermutationCount permutation_factor(const Seed& initial, const GenerationLimits& limits = {});

// Each entry sigma lists, position by position, which initial variable sits
// there: the seed's cluster is (x_{sigma[0]+1}, ..., x_{sigma[r-1]+1}).
// Collected over all seeds of `full` whose cluster consists of initial
// variables only. Sorted lexicographically.
std::vector<std::vector<std::size_t>> orbit_permutations(const ExchangeGraph& full);

// Seed vertices over quiver vertices of two closed graphs.
Ratio vertex_ratio(const ExchangeGraph& seeds, const ExchangeGraph& quivers);

struct EmbeddingProfile {
  std::size_t s = 0;  // quiver cycle length
  std::size_t t = 0;  // length of each seed cycle
  std::size_t p = 0;  // t / s
  std::size_t q = 0;  // number of seed cycles
  std::size_t seed_vertices = 0;
  std::optional<std::string> anomaly;
};

// Preimage of a quiver cycle (consecutive matrices related by one mutation)
// in a closed seed exchange graph. Only seed edges that project onto a cycle
// edge are kept.
EmbeddingProfile cycle_embedding(const std::vector<ExchangeMatrix>& cycle, const ExchangeGraph& seeds);

// Matrices along a cycle of a quiver exchange graph.
std::vector<ExchangeMatrix> cycle_matrices(const Cycle& cycle, const ExchangeGraph& quivers);

// True when the quiver cycle is Q, mu_k Q, mu_l mu_k Q, mu_l Q with b_kl = 0.
bool is_commuting_square(const std::vector<ExchangeMatrix>& cycle);

struct EmbeddingSummary {
  std::map<std::size_t, std::size_t> basis_lengths;
  std::map<std::size_t, std::size_t> p_histogram;
  std::map<std::size_t, std::size_t> q_histogram;
  std::vector<EmbeddingProfile> profiles;  // one per basis cycle, basis order
  std::vector<std::vector<ExchangeMatrix>> cycles;
  Ratio ratio;
};

// Profiles every cycle of the quiver graph's minimum cycle basis (de Pina order). Throws
// InternalError on a structural anomaly.
EmbeddingSummary mcb_embedding_profile(const ExchangeGraph& seeds, const ExchangeGraph& quivers);
EmbeddingSummary mcb_embedding_profile(const Seed& initial, const GenerationLimits& limits = {});

}  // namespace clusterml
