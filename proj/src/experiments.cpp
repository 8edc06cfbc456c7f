#include "clusterml/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clusterml/catalogue.hpp"
#include "clusterml/errors.hpp"

namespace clusterml {

namespace {

double mean_of(const std::vector<CvReport>& runs, double CvReport::*field) {
  if (runs.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : runs) s += r.*field;
  return s / static_cast<double>(runs.size());
}

}  // namespace

double Investigation::accuracy() const { return mean_of(runs, &CvReport::accuracy_mean); }
double Investigation::accuracy_se() const { return mean_of(runs, &CvReport::accuracy_se); }
double Investigation::mcc() const { return mean_of(runs, &CvReport::mcc_mean); }
double Investigation::mcc_se() const { return mean_of(runs, &CvReport::mcc_se); }

std::vector<std::vector<double>> Investigation::confusion() const {
  const std::size_t k = classes.size();
  std::vector<std::vector<double>> out(k, std::vector<double>(k, 0.0));
  for (const auto& r : runs) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) out[a][b] += r.confusion[a][b] / static_cast<double>(runs.size());
    }
  }
  return out;
}

std::uint64_t stable_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

Corpus seed_corpus(const std::string& name, std::optional<int> depth, bool include_matrix,
                   const GenerationLimits& limits) {
  const Seed initial = builtin_seed(name);
  const auto graph = depth ? generate_seed_graph(initial, *depth, Equivalence::exact, limits, name)
                           : generate_full(initial, Equivalence::exact, Payload::seeds, limits, name);
  return encode_graph(graph, include_matrix, name);
}

std::vector<std::pair<std::string, std::string>> binary_pairs() {
  return {{"A4", "D4"}, {"A4", "A13"}, {"F4", "I1"}, {"A13", "A22"}, {"A13", "I1"}, {"I1", "I2"}};
}

std::vector<std::string> finite_rank4() { return {"A4", "B4", "C4", "D4", "F4"}; }

std::vector<std::string> fake_algebras() { return {"A4", "D4", "F4", "A13", "A22", "I1", "I2"}; }

namespace {

Investigation run_dataset(Investigation inv, const std::vector<Corpus>* corpora,
                          const std::vector<std::vector<std::vector<std::int64_t>>>* classes,
                          const ExperimentConfig& config) {
  if (config.repeats == 0) throw ConfigError("at least one repeat is required");
  inv.seed = derive_seed(config.seed, stable_hash(inv.label));
  for (std::size_t r = 0; r < config.repeats; ++r) {
    const std::uint64_t run_seed = derive_seed(inv.seed, r);
    Rng shuffle(derive_seed(run_seed, 0));
    const Dataset data = corpora ? assemble_dataset(*corpora, shuffle) : assemble_dataset(*classes, inv.classes, shuffle);
    if (r == 0) {
      inv.class_sizes = data.class_sizes;
      inv.length = data.length;
      inv.sparsity = data.sparsity;
    }
    inv.runs.push_back(cross_validate(data, config.mlp, derive_seed(run_seed, 1), config.folds));
  }
  return inv;
}

}  // namespace

Investigation run_classification(const std::vector<Corpus>& corpora, const std::string& label,
                                 std::optional<int> depth, const ExperimentConfig& config) {
  if (corpora.empty()) throw DomainError("no corpora");
  Investigation inv;
  inv.label = label;
  for (const auto& c : corpora) inv.classes.push_back(c.name);
  inv.include_matrix = !corpora.front().vectors.empty() && corpora.front().vectors.front().include_matrix;
  inv.depth = depth;
  return run_dataset(std::move(inv), &corpora, nullptr, config);
}

Investigation run_binary_pair(const std::string& a, const std::string& b, bool include_matrix,
                              const ExperimentConfig& config, int depth) {
  std::vector<Corpus> corpora{seed_corpus(a, depth, include_matrix, config.limits),
                              seed_corpus(b, depth, include_matrix, config.limits)};
  const std::string label = a + " vs " + b + (include_matrix ? " with matrix" : " without matrix") +
                            " depth " + std::to_string(depth);
  return run_classification(corpora, label, depth, config);
}

std::vector<Investigation> run_binary_pairs(const ExperimentConfig& config) {
  std::vector<Investigation> out;
  for (const auto& [a, b] : binary_pairs()) {
    for (bool m : {true, false}) out.push_back(run_binary_pair(a, b, m, config));
  }
  return out;
}

Investigation run_multiclass_finite(const ExperimentConfig& config) {
  std::vector<Corpus> corpora;
  for (const auto& name : finite_rank4()) corpora.push_back(seed_corpus(name, std::nullopt, true, config.limits));
  return run_classification(corpora, "finite rank 4 multiclass", std::nullopt, config);
}

Investigation run_fake_vs_true(const std::string& name, const ExperimentConfig& config, int depth) {
  const auto truth = padded_vectors(seed_corpus(name, depth, true, config.limits));
  Investigation inv;
  inv.label = name + " true vs fake depth " + std::to_string(depth);
  inv.classes = {name, name + " fake"};
  inv.include_matrix = true;
  inv.depth = depth;
  Rng rng(derive_seed(config.seed, stable_hash(inv.label + " sampling")));
  std::vector<std::vector<std::vector<std::int64_t>>> classes{truth, generate_fake(truth, rng)};
  return run_dataset(std::move(inv), nullptr, &classes, config);
}

std::vector<DepthSweepRow> run_depth_sweep(const ExperimentConfig& config, int max_depth, bool train) {
  if (max_depth < 1) throw ConfigError("depth sweep needs a positive maximum depth");
  const Seed a = builtin_seed("A4");
  const Seed b = builtin_seed("D4");
  const auto ga = generate_seed_graph(a, max_depth, Equivalence::exact, config.limits, "A4");
  const auto gb = generate_seed_graph(b, max_depth, Equivalence::exact, config.limits, "D4");
  std::vector<DepthSweepRow> out;
  for (int d = 1; d <= max_depth; ++d) {
    Corpus ca{"A4", {}}, cb{"D4", {}};
    std::size_t slot = 0;
    for (std::size_t v = 0; v < ga.vertex_count() && ga.depth(v) <= d; ++v) {
      ca.vectors.push_back(encode_seed(ga.seed(v), false));
      slot = std::max(slot, ca.vectors.back().max_blocks());
    }
    for (std::size_t v = 0; v < gb.vertex_count() && gb.depth(v) <= d; ++v) {
      cb.vectors.push_back(encode_seed(gb.seed(v), false));
      slot = std::max(slot, cb.vectors.back().max_blocks());
    }
    DepthSweepRow row;
    row.depth = d;
    row.size_a = ca.vectors.size();
    row.size_b = cb.vectors.size();
    row.length = slotted_length(a.rank(), slot, false);
    row.length_with_matrix = slotted_length(a.rank(), slot, true);
    if (train) {
      row.result = run_classification({ca, cb}, "A4 vs D4 without matrix depth " + std::to_string(d), d, config);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace clusterml
