#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "clusterml/exchange_graph.hpp"
#include "clusterml/seed.hpp"

namespace clusterml {

using Rng = std::mt19937_64;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Independent stream for a sub-task (fold, repeat, ...) of a run seeded by `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Sparse "coo" encoding of one seed. Each variable contributes its numerator
// terms as blocks [c, e1, ..., er] in descending graded-lex order followed by
// one denominator block [1, e1, ..., er]; the flattened exchange matrix is
// optionally appended after the last variable.
struct SeedVector {
  std::vector<std::int64_t> entries;
  std::vector<std::size_t> blocks;  // per variable, numerator terms + 1
  std::size_t rank = 0;
  bool include_matrix = false;
  std::string algebra;
  std::size_t seed_index = 0;

  std::size_t length() const noexcept { return entries.size(); }
  std::size_t max_blocks() const;
};

// Throws DomainError if a coefficient does not fit in 64 bits.
SeedVector encode_seed(const Seed& s, bool include_matrix);
// Inverse of encode_seed; needs the matrix block.
Seed decode_seed(const SeedVector& v);

// Fixed-width layout used for training: every variable gets a slot of
// `slot_blocks` blocks (its blocks, then zero blocks), followed by the matrix
// block if present. Length rank * slot_blocks * (rank + 1) (+ rank^2).
std::vector<std::int64_t> pad_to_slots(const SeedVector& v, std::size_t slot_blocks);
std::size_t slotted_length(std::size_t rank, std::size_t slot_blocks, bool include_matrix);
// Inverse of pad_to_slots. Within a slot the last block with a nonzero lead
// entry is the denominator.
Seed decode_slotted(const std::vector<std::int64_t>& padded, std::size_t rank, std::size_t slot_blocks,
                    bool include_matrix);

// Coefficient tensors T[a1, ..., ar] of one variable, each index in
// [0, extent).
struct DenseTensor {
  std::size_t rank = 0;
  std::size_t extent = 0;
  std::vector<std::int64_t> values;  // row-major, extent^rank entries

  std::int64_t at(std::span<const std::size_t> index) const;
  std::size_t nonzeros() const;
};

struct DenseEncoding {
  std::vector<DenseTensor> numerators;
  std::vector<DenseTensor> denominators;
};

// `extent` defaults to one more than the seed's largest exponent.
DenseEncoding encode_dense(const Seed& s, std::optional<std::size_t> extent = std::nullopt);

// Proportion of nonzero entries.
double dense_sparsity(const std::vector<Seed>& corpus);
double slotted_sparsity(const std::vector<SeedVector>& corpus);

struct Corpus {
  std::string name;
  std::vector<SeedVector> vectors;
};

Corpus encode_graph(const ExchangeGraph& g, bool include_matrix, const std::string& name = "");

struct Dataset {
  Eigen::SparseMatrix<double, Eigen::RowMajor> X;
  std::vector<int> y;
  std::vector<std::string> class_names;
  std::vector<std::size_t> class_sizes;
  std::size_t length = 0;       // padded vector length
  std::size_t slot_blocks = 0;
  double sparsity = 0.0;        // nonzero proportion of the padded vectors

  std::size_t size() const noexcept { return y.size(); }
  std::size_t classes() const noexcept { return class_names.size(); }
};

// Pads every corpus to the longest slot in the investigation, labels corpus i
// with class i, and shuffles rows with `rng`. Throws DomainError on an empty
// corpus or mixed encodings.
Dataset assemble_dataset(const std::vector<Corpus>& corpora, Rng& rng);
Dataset assemble_dataset(const std::vector<std::vector<std::vector<std::int64_t>>>& classes,
                         const std::vector<std::string>& names, Rng& rng);

struct MlpConfig {
  std::vector<std::size_t> hidden{256, 256, 256};
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double l2 = 1e-4;
  std::size_t batch_size = 200;  // capped at the sample count
  std::size_t epochs = 200;
  // Stop after this many epochs without a `tolerance` drop in training loss.
  // Zero disables the check.
  std::size_t patience = 0;
  double tolerance = 1e-4;
};

// Feed-forward ReLU network with a sigmoid (2 classes) or softmax head,
// trained on cross-entropy with Adam.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t inputs, std::size_t classes, const MlpConfig& config, Rng& rng);

  std::size_t inputs() const noexcept { return weights_.empty() ? 0 : weights_.front().rows(); }
  std::size_t classes() const noexcept { return classes_; }
  std::size_t outputs() const noexcept { return weights_.empty() ? 0 : weights_.back().cols(); }
  const std::vector<RowMatrix>& weights() const noexcept { return weights_; }
  const std::vector<Eigen::RowVectorXd>& biases() const noexcept { return biases_; }
  std::vector<RowMatrix>& weights() noexcept { return weights_; }
  std::vector<Eigen::RowVectorXd>& biases() noexcept { return biases_; }
  std::size_t parameter_count() const;
  std::size_t steps() const noexcept { return step_; }

  // Class probabilities, one row per sample.
  Eigen::MatrixXd predict_proba(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X) const;
  std::vector<int> predict(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X) const;

  // Mean cross-entropy plus l2/(2n) * sum of squared weights, and its
  // gradients (same layout as weights()/biases()).
  struct Gradient {
    double loss = 0.0;
    std::vector<RowMatrix> weights;
    std::vector<Eigen::RowVectorXd> biases;
  };
  Gradient loss_gradient(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X, const std::vector<int>& y,
                         double l2) const;
  double loss(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X, const std::vector<int>& y,
              double l2) const;

  void adam_step(const Gradient& g, const MlpConfig& config);
  // Gradient and Adam update on one batch; returns the batch loss before the
  // update.
  double train_step(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X, const std::vector<int>& y,
                    const MlpConfig& config);

  // Per-epoch training loss. Throws TrainingError on a non-finite loss.
  std::vector<double> fit(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X, const std::vector<int>& y,
                          const MlpConfig& config, Rng& rng);

  void save(const std::filesystem::path& path) const;
  static Mlp load(const std::filesystem::path& path);

 private:
  Gradient backprop(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X, const std::vector<int>& y, double l2,
                    RowMatrix* first_delta) const;
  double step_size(const MlpConfig& config);

  std::size_t classes_ = 2;
  std::vector<RowMatrix> weights_;
  std::vector<Eigen::RowVectorXd> biases_;
  std::vector<RowMatrix> m_w_, v_w_;
  std::vector<Eigen::RowVectorXd> m_b_, v_b_;
  std::size_t step_ = 0;
};

Mlp train_mlp(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X, const std::vector<int>& y,
              std::size_t classes, const MlpConfig& config, Rng& rng);

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);
// Multiclass R_K form; 0 when the denominator vanishes.
double mcc(const std::vector<int>& predictions, const std::vector<int>& labels);
// counts[true][predicted]
std::vector<std::vector<std::size_t>> confusion_counts(const std::vector<int>& predictions,
                                                       const std::vector<int>& labels, std::size_t classes);

struct FoldResult {
  double accuracy = 0.0;
  double mcc = 0.0;
  std::vector<std::size_t> test_indices;
  std::vector<std::vector<double>> confusion;  // proportions of the fold
  std::size_t epochs = 0;
};

struct CvReport {
  std::vector<FoldResult> folds;
  double accuracy_mean = 0.0;
  double accuracy_se = 0.0;
  double mcc_mean = 0.0;
  double mcc_se = 0.0;
  std::vector<std::vector<double>> confusion;  // mean over folds, sums to 1
};

// Shuffled k-fold partition of 0..n-1 into near-equal disjoint parts.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t folds, Rng& rng);

// k-fold cross-validation; SE is the population std of fold scores over
// sqrt(k). Throws DomainError when n < folds.
CvReport cross_validate(const Dataset& data, const MlpConfig& config, std::uint64_t seed,
                        std::size_t folds = 5);

// Fake vectors mimicking a corpus of equal-length padded vectors: entries
// drawn i.i.d. from the corpus-wide value frequencies, none equal to a true
// vector.
std::vector<std::vector<std::int64_t>> generate_fake(const std::vector<std::vector<std::int64_t>>& corpus,
                                                     Rng& rng);

// Slot-padded vectors of one corpus at its own maximum slot.
std::vector<std::vector<std::int64_t>> padded_vectors(const Corpus& corpus);

}  // namespace clusterml
