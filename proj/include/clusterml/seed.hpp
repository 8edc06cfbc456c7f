#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clusterml/laurent.hpp"

namespace clusterml {

// Square integer exchange matrix b_ij. Row/column i is bound to cluster
// position i for the lifetime of a seed.
class ExchangeMatrix {
 public:
  ExchangeMatrix() = default;
  explicit ExchangeMatrix(std::size_t rank);
  ExchangeMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static ExchangeMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  std::size_t rank() const noexcept { return rank_; }
  std::int64_t operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * rank_ + j];
  }
  std::int64_t& operator()(std::size_t i, std::size_t j) noexcept {
    return entries_[i * rank_ + j];
  }
  std::span<const std::int64_t> entries() const noexcept { return entries_; }
  std::vector<std::vector<std::int64_t>> rows() const;

  // Zero diagonal and b_ij > 0 <=> b_ji < 0.
  bool is_sign_coherent() const;
  bool is_skew_symmetric() const;
  // max_{i,j} |b_ij * b_ji|
  std::int64_t max_cycle_product() const;

  // Result row/column i is this matrix's row/column perm[i].
  ExchangeMatrix permuted(std::span<const std::size_t> perm) const;

  friend bool operator==(const ExchangeMatrix&, const ExchangeMatrix&) = default;
  friend auto operator<=>(const ExchangeMatrix&, const ExchangeMatrix&) = default;

  std::size_t hash() const noexcept;
  // "[[0,1],[-1,0]]"
  std::string to_string() const;

 private:
  std::size_t rank_ = 0;
  std::vector<std::int64_t> entries_;
};

// Matrix mutation at position k: entries in row/column k flip sign; any other
// b_ij gains b_ik*b_kj when both factors are positive and loses it when both
// are negative.
ExchangeMatrix mutate(const ExchangeMatrix& b, std::size_t k);

// Positive integer diagonal D with D*B skew-symmetric.
struct SkewSymmetrizer {
  std::vector<std::int64_t> diag;

  friend bool operator==(const SkewSymmetrizer&, const SkewSymmetrizer&) = default;
};

// Minimal symmetrizer on each connected component (gcd 1 per component),
// or nullopt when the matrix is not skew-symmetrizable.
std::optional<SkewSymmetrizer> find_skew_symmetrizer(const ExchangeMatrix& b);

class Seed {
 public:
  Seed() = default;
  Seed(std::vector<LaurentValue> cluster, ExchangeMatrix matrix);
  // Cluster {x1, ..., xr} with the given matrix.
  static Seed initial(ExchangeMatrix matrix);

  std::size_t rank() const noexcept { return matrix_.rank(); }
  const std::vector<LaurentValue>& cluster() const noexcept { return cluster_; }
  const LaurentValue& variable(std::size_t i) const { return cluster_.at(i); }
  const ExchangeMatrix& matrix() const noexcept { return matrix_; }

  // Total number of numerator terms across the cluster.
  std::size_t term_count() const noexcept;

  Seed permuted(std::span<const std::size_t> perm) const;

  friend bool operator==(const Seed&, const Seed&) = default;

  std::size_t hash() const noexcept;

 private:
  std::vector<LaurentValue> cluster_;
  ExchangeMatrix matrix_;
};

// Seed mutation at position k: replaces variable k by the exchange relation
// quotient and mutates the matrix. Throws InternalError if the exact division
// fails, which would contradict the Laurent phenomenon.
Seed mutate(const Seed& s, std::size_t k);

// The new variable produced by mutating `s` at k, without touching the rest.
LaurentValue exchange(const Seed& s, std::size_t k);

enum class Equivalence { exact, permutation };

std::string to_string(Equivalence mode);
Equivalence parse_equivalence(const std::string& text);

// Deterministic byte string identifying a seed. In permutation mode this is
// the lexicographic minimum over all simultaneous permutations of cluster
// entries and matrix rows/columns.
std::string canonical_form(const Seed& s, Equivalence mode);
std::string canonical_form(const ExchangeMatrix& b, Equivalence mode);

enum class MutationType { finite, finite_mutation, infinite, unknown };

std::string to_string(MutationType type);

// Explores up to `quiver_cap` distinct reachable exchange matrices and
// classifies by the largest |b_ij * b_ji| seen (<=3 finite, <=4
// finite-mutation, >=5 infinite). Returns unknown if the cap is hit first.
MutationType classify_type(const ExchangeMatrix& b, std::size_t quiver_cap);

}  // namespace clusterml
