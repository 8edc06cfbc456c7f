#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clusterml/ml.hpp"

namespace clusterml {

struct ExperimentConfig {
  std::uint64_t seed = 42;
  MlpConfig mlp;
  std::size_t folds = 5;
  std::size_t repeats = 1;
  GenerationLimits limits;
};

// One classification investigation, cross-validated `repeats` times.
struct Investigation {
  std::string label;
  std::vector<std::string> classes;
  std::vector<std::size_t> class_sizes;
  bool include_matrix = true;
  std::optional<int> depth;  // nullopt: full exchange graph
  std::size_t length = 0;
  double sparsity = 0.0;
  std::uint64_t seed = 0;
  std::vector<CvReport> runs;

  double accuracy() const;  // mean over runs of the CV mean
  double accuracy_se() const;
  double mcc() const;
  double mcc_se() const;
  // Mean confusion over runs.
  std::vector<std::vector<double>> confusion() const;
};

// Seeds of one catalogue algebra to `depth` (nullopt: to closure), encoded.
Corpus seed_corpus(const std::string& name, std::optional<int> depth, bool include_matrix,
                   const GenerationLimits& limits = {});

// The six algebra pairs compared at depth 4.
std::vector<std::pair<std::string, std::string>> binary_pairs();
// A4, B4, C4, D4, F4.
std::vector<std::string> finite_rank4();
// Algebras used for the fake-data comparison.
std::vector<std::string> fake_algebras();

Investigation run_classification(const std::vector<Corpus>& corpora, const std::string& label,
                                 std::optional<int> depth, const ExperimentConfig& config);

Investigation run_binary_pair(const std::string& a, const std::string& b, bool include_matrix,
                              const ExperimentConfig& config, int depth = 4);
// Every pair, with and without the matrix block.
std::vector<Investigation> run_binary_pairs(const ExperimentConfig& config);

Investigation run_multiclass_finite(const ExperimentConfig& config);

Investigation run_fake_vs_true(const std::string& name, const ExperimentConfig& config, int depth = 4);

struct DepthSweepRow {
  int depth = 0;
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  std::size_t length = 0;              // training vectors (no matrix block)
  std::size_t length_with_matrix = 0;
  std::optional<Investigation> result;
};

// A4 vs D4 at depths 1..max_depth. Class sizes and lengths only unless
// `train` is set.
std::vector<DepthSweepRow> run_depth_sweep(const ExperimentConfig& config, int max_depth = 13, bool train = true);

// Stable 64-bit FNV-1a hash, used to derive per-investigation seeds.
std::uint64_t stable_hash(const std::string& text);

}  // namespace clusterml
