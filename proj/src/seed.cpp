#include "clusterml/seed.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_set>

#include "clusterml/errors.hpp"

namespace clusterml {

// ---------------------------------------------------------------------------
// ExchangeMatrix

ExchangeMatrix::ExchangeMatrix(std::size_t rank) : rank_(rank), entries_(rank * rank, 0) {}

ExchangeMatrix::ExchangeMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : ExchangeMatrix(rows.size()) {
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != rank_) throw DimensionError("exchange matrix must be square");
    std::size_t j = 0;
    for (auto v : row) (*this)(i, j++) = v;
    ++i;
  }
}

ExchangeMatrix ExchangeMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  ExchangeMatrix b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw DimensionError("exchange matrix must be square");
    for (std::size_t j = 0; j < rows.size(); ++j) b(i, j) = rows[i][j];
  }
  return b;
}

std::vector<std::vector<std::int64_t>> ExchangeMatrix::rows() const {
  std::vector<std::vector<std::int64_t>> out(rank_);
  for (std::size_t i = 0; i < rank_; ++i) {
    out[i].assign(entries_.begin() + i * rank_, entries_.begin() + (i + 1) * rank_);
  }
  return out;
}

bool ExchangeMatrix::is_sign_coherent() const {
  for (std::size_t i = 0; i < rank_; ++i) {
    if ((*this)(i, i) != 0) return false;
    for (std::size_t j = i + 1; j < rank_; ++j) {
      const auto a = (*this)(i, j);
      const auto b = (*this)(j, i);
      if ((a == 0) != (b == 0)) return false;
      if (a != 0 && (a > 0) == (b > 0)) return false;
    }
  }
  return true;
}

bool ExchangeMatrix::is_skew_symmetric() const {
  for (std::size_t i = 0; i < rank_; ++i) {
    for (std::size_t j = i; j < rank_; ++j) {
      if ((*this)(i, j) != -(*this)(j, i)) return false;
    }
  }
  return true;
}

std::int64_t ExchangeMatrix::max_cycle_product() const {
  std::int64_t best = 0;
  for (std::size_t i = 0; i < rank_; ++i) {
    for (std::size_t j = i + 1; j < rank_; ++j) {
      best = std::max(best, std::abs((*this)(i, j) * (*this)(j, i)));
    }
  }
  return best;
}

ExchangeMatrix ExchangeMatrix::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != rank_) throw DimensionError("permutation length must equal rank");
  ExchangeMatrix out(rank_);
  for (std::size_t i = 0; i < rank_; ++i) {
    for (std::size_t j = 0; j < rank_; ++j) out(i, j) = (*this)(perm[i], perm[j]);
  }
  return out;
}

std::size_t ExchangeMatrix::hash() const noexcept {
  std::size_t h = rank_;
  for (auto v : entries_) h = h * 1000003ULL ^ static_cast<std::size_t>(v + 0x51ed27);
  return h;
}

std::string ExchangeMatrix::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < rank_; ++i) {
    if (i) out += ',';
    out += '[';
    for (std::size_t j = 0; j < rank_; ++j) {
      if (j) out += ',';
      out += std::to_string((*this)(i, j));
    }
    out += ']';
  }
  return out + "]";
}

ExchangeMatrix mutate(const ExchangeMatrix& b, std::size_t k) {
  const std::size_t r = b.rank();
  if (k >= r) throw DomainError("mutation index out of range");
  ExchangeMatrix out(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const auto bij = b(i, j);
      if (i == k || j == k) {
        out(i, j) = -bij;
        continue;
      }
      const auto bik = b(i, k);
      const auto bkj = b(k, j);
      if (bik > 0 && bkj > 0) {
        out(i, j) = bij + bik * bkj;
      } else if (bik < 0 && bkj < 0) {
        out(i, j) = bij - bik * bkj;
      } else {
        out(i, j) = bij;
      }
    }
  }
  return out;
}

std::optional<SkewSymmetrizer> find_skew_symmetrizer(const ExchangeMatrix& b) {
  if (!b.is_sign_coherent()) return std::nullopt;
  const std::size_t r = b.rank();
  // d_j / d_i = -b_ij / b_ji along every edge; track each d as num/den.
  std::vector<std::int64_t> num(r, 0);
  std::vector<std::int64_t> den(r, 1);
  std::vector<int> component(r, -1);
  int ncomp = 0;
  for (std::size_t root = 0; root < r; ++root) {
    if (component[root] >= 0) continue;
    component[root] = ncomp;
    num[root] = 1;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < r; ++j) {
        if (b(i, j) == 0) continue;
        // d_j = d_i * |b_ij| / |b_ji|
        std::int64_t n = num[i] * std::abs(b(i, j));
        std::int64_t d = den[i] * std::abs(b(j, i));
        const auto g = std::gcd(n, d);
        n /= g;
        d /= g;
        if (component[j] < 0) {
          component[j] = ncomp;
          num[j] = n;
          den[j] = d;
          queue.push_back(j);
        } else if (num[j] != n || den[j] != d) {
          return std::nullopt;
        }
      }
    }
    ++ncomp;
  }
  SkewSymmetrizer out;
  out.diag.assign(r, 0);
  for (int c = 0; c < ncomp; ++c) {
    std::int64_t l = 1;
    for (std::size_t i = 0; i < r; ++i) {
      if (component[i] == c) l = std::lcm(l, den[i]);
    }
    std::int64_t g = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (component[i] == c) {
        out.diag[i] = num[i] * (l / den[i]);
        g = std::gcd(g, out.diag[i]);
      }
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (component[i] == c) out.diag[i] /= g;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Seed

Seed::Seed(std::vector<LaurentValue> cluster, ExchangeMatrix matrix)
    : cluster_(std::move(cluster)), matrix_(std::move(matrix)) {
  if (cluster_.size() != matrix_.rank()) {
    throw DimensionError("cluster length must equal matrix rank");
  }
  for (const auto& v : cluster_) {
    if (v.nvars() != matrix_.rank()) throw DimensionError("cluster variable rank mismatch");
  }
}

Seed Seed::initial(ExchangeMatrix matrix) {
  std::vector<LaurentValue> cluster;
  cluster.reserve(matrix.rank());
  for (std::size_t i = 0; i < matrix.rank(); ++i) {
    cluster.push_back(LaurentValue::variable(matrix.rank(), i));
  }
  return Seed(std::move(cluster), std::move(matrix));
}

std::size_t Seed::term_count() const noexcept {
  std::size_t n = 0;
  for (const auto& v : cluster_) n += v.numerator().size();
  return n;
}

Seed Seed::permuted(std::span<const std::size_t> perm) const {
  std::vector<LaurentValue> cluster;
  cluster.reserve(cluster_.size());
  for (auto p : perm) cluster.push_back(cluster_.at(p));
  return Seed(std::move(cluster), matrix_.permuted(perm));
}

std::size_t Seed::hash() const noexcept {
  std::size_t h = matrix_.hash();
  for (const auto& v : cluster_) h = h * 0x100000001b3ULL ^ v.hash();
  return h;
}

LaurentValue exchange(const Seed& s, std::size_t k) {
  const std::size_t r = s.rank();
  if (k >= r) throw DomainError("mutation index out of range");
  const auto& b = s.matrix();

  Polynomial in_num = Polynomial::constant(r, 1);
  Polynomial out_num = Polynomial::constant(r, 1);
  Monomial in_den(r);
  Monomial out_den(r);
  for (std::size_t i = 0; i < r; ++i) {
    const auto bik = b(i, k);
    if (bik == 0 || i == k) continue;
    const auto power = static_cast<unsigned>(std::abs(bik));
    const auto& x = s.variable(i);
    if (bik > 0) {
      in_num = in_num * x.numerator().pow(power);
      in_den = in_den * x.denominator().pow(power);
    } else {
      out_num = out_num * x.numerator().pow(power);
      out_den = out_den * x.denominator().pow(power);
    }
  }
  // (in_num/in_den + out_num/out_den) over the common denominator.
  const Monomial common = Monomial::lcm(in_den, out_den);
  const Polynomial sum = in_num * (common / in_den) + out_num * (common / out_den);

  // Divide by x_k = N_k / D_k. The monomial content of N_k moves to the
  // denominator; the remaining factor must divide `sum` exactly.
  const auto& xk = s.variable(k);
  const Monomial content = xk.numerator().monomial_content();
  const Polynomial divisor = xk.numerator().divide_by(content);
  auto quotient = exact_divide(sum, divisor);
  if (!quotient) {
    throw InternalError("inexact division while mutating at index " + std::to_string(k) +
                        ": " + sum.to_string() + " / " + divisor.to_string());
  }
  return LaurentValue::normalize(*quotient * xk.denominator(), common * content);
}

Seed mutate(const Seed& s, std::size_t k) {
  std::vector<LaurentValue> cluster = s.cluster();
  cluster[k] = exchange(s, k);
  return Seed(std::move(cluster), mutate(s.matrix(), k));
}

// ---------------------------------------------------------------------------
// Canonical forms

std::string to_string(Equivalence mode) {
  return mode == Equivalence::exact ? "exact" : "perm";
}

Equivalence parse_equivalence(const std::string& text) {
  if (text == "exact") return Equivalence::exact;
  if (text == "perm" || text == "permutation") return Equivalence::permutation;
  throw ConfigError("unknown equivalence mode '" + text + "'");
}

namespace {

std::string serialize(std::span<const std::string> vars, const ExchangeMatrix& b) {
  std::string out = "C[";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ';';
    out += vars[i];
  }
  out += "]B";
  out += b.to_string();
  return out;
}

// Permutation minimising (permuted variable strings, permuted matrix).
std::vector<std::size_t> minimal_permutation(std::span<const std::string> vars,
                                             const ExchangeMatrix& b) {
  const std::size_t r = b.rank();
  std::vector<std::size_t> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  ExchangeMatrix best_matrix = b;
  auto less_than_best = [&](const std::vector<std::size_t>& p, const ExchangeMatrix& m) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto c = vars[p[i]].compare(vars[best[i]]);
      if (c != 0) return c < 0;
    }
    const auto a = m.entries();
    const auto bb = best_matrix.entries();
    return std::lexicographical_compare(a.begin(), a.end(), bb.begin(), bb.end());
  };
  while (std::next_permutation(perm.begin(), perm.end())) {
    if (!vars.empty()) {
      // Cheap rejection on the first variable before permuting the matrix.
      const auto c = vars[perm[0]].compare(vars[best[0]]);
      if (c > 0) continue;
    }
    ExchangeMatrix m = b.permuted(perm);
    if (less_than_best(perm, m)) {
      best = perm;
      best_matrix = std::move(m);
    }
  }
  return best;
}

}  // namespace

std::string canonical_form(const Seed& s, Equivalence mode) {
  std::vector<std::string> vars;
  vars.reserve(s.rank());
  for (const auto& v : s.cluster()) vars.push_back(v.to_string());
  if (mode == Equivalence::exact) return serialize(vars, s.matrix());
  const auto perm = minimal_permutation(vars, s.matrix());
  std::vector<std::string> permuted;
  permuted.reserve(vars.size());
  for (auto p : perm) permuted.push_back(vars[p]);
  return serialize(permuted, s.matrix().permuted(perm));
}

std::string canonical_form(const ExchangeMatrix& b, Equivalence mode) {
  if (mode == Equivalence::exact) return "B" + b.to_string();
  const auto perm = minimal_permutation({}, b);
  return "B" + b.permuted(perm).to_string();
}

// ---------------------------------------------------------------------------
// Mutation type

std::string to_string(MutationType type) {
  switch (type) {
    case MutationType::finite:
      return "finite";
    case MutationType::finite_mutation:
      return "finite_mutation";
    case MutationType::infinite:
      return "infinite";
    case MutationType::unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

struct MatrixHash {
  std::size_t operator()(const ExchangeMatrix& b) const noexcept { return b.hash(); }
};

}  // namespace

MutationType classify_type(const ExchangeMatrix& b, std::size_t quiver_cap) {
  if (quiver_cap == 0) throw DomainError("quiver cap must be positive");
  std::unordered_set<ExchangeMatrix, MatrixHash> seen{b};
  std::deque<ExchangeMatrix> frontier{b};
  std::int64_t worst = b.max_cycle_product();
  if (worst >= 5) return MutationType::infinite;
  while (!frontier.empty()) {
    const ExchangeMatrix current = std::move(frontier.front());
    frontier.pop_front();
    for (std::size_t k = 0; k < current.rank(); ++k) {
      ExchangeMatrix next = mutate(current, k);
      if (seen.contains(next)) continue;
      const auto product = next.max_cycle_product();
      if (product >= 5) return MutationType::infinite;
      worst = std::max(worst, product);
      if (seen.size() >= quiver_cap) return MutationType::unknown;
      seen.insert(next);
      frontier.push_back(std::move(next));
    }
  }
  return worst <= 3 ? MutationType::finite : MutationType::finite_mutation;
}

}  // namespace clusterml
