#include "clusterml/ml.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "clusterml/errors.hpp"

namespace clusterml {

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// ---------------------------------------------------------------------------
// Encodings

std::size_t SeedVector::max_blocks() const {
  return blocks.empty() ? 0 : *std::max_element(blocks.begin(), blocks.end());
}

namespace {

std::int64_t to_int64(const Integer& c) {
  if (c > std::numeric_limits<std::int64_t>::max() || c < std::numeric_limits<std::int64_t>::min()) {
    throw DomainError("coefficient " + c.str() + " does not fit the encoding");
  }
  return static_cast<std::int64_t>(c);
}

void append_block(std::vector<std::int64_t>& out, std::int64_t lead, const Monomial& m) {
  out.push_back(lead);
  for (std::size_t i = 0; i < m.nvars(); ++i) out.push_back(m[i]);
}

Monomial block_monomial(std::span<const std::int64_t> block) {
  std::vector<unsigned> exps;
  exps.reserve(block.size() - 1);
  for (std::size_t i = 1; i < block.size(); ++i) {
    if (block[i] < 0) throw DomainError("negative exponent in encoded block");
    exps.push_back(static_cast<unsigned>(block[i]));
  }
  return Monomial(std::span<const unsigned>(exps));
}

LaurentValue decode_variable(std::span<const std::int64_t> data, std::size_t numerator_blocks, std::size_t width,
                             std::size_t rank) {
  std::vector<Term> terms;
  terms.reserve(numerator_blocks);
  for (std::size_t b = 0; b < numerator_blocks; ++b) {
    auto block = data.subspan(b * width, width);
    if (block[0] <= 0) throw DomainError("numerator coefficient must be positive");
    terms.push_back({block_monomial(block), Integer(block[0])});
  }
  auto den = data.subspan(numerator_blocks * width, width);
  if (den[0] != 1) throw DomainError("denominator block must lead with 1");
  return LaurentValue::normalize(Polynomial::from_terms(rank, std::move(terms)), block_monomial(den));
}

ExchangeMatrix decode_matrix(std::span<const std::int64_t> data, std::size_t rank) {
  ExchangeMatrix b(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    for (std::size_t j = 0; j < rank; ++j) b(i, j) = data[i * rank + j];
  }
  return b;
}

}  // namespace

SeedVector encode_seed(const Seed& s, bool include_matrix) {
  SeedVector out;
  out.rank = s.rank();
  out.include_matrix = include_matrix;
  for (const auto& x : s.cluster()) {
    for (const auto& t : x.numerator().terms()) append_block(out.entries, to_int64(t.coeff), t.monomial);
    append_block(out.entries, 1, x.denominator());
    out.blocks.push_back(x.numerator().size() + 1);
  }
  if (include_matrix) {
    const auto e = s.matrix().entries();
    out.entries.insert(out.entries.end(), e.begin(), e.end());
  }
  return out;
}

Seed decode_seed(const SeedVector& v) {
  if (!v.include_matrix) throw DomainError("decoding needs the matrix block");
  const std::size_t r = v.rank;
  const std::size_t width = r + 1;
  std::span<const std::int64_t> data(v.entries);
  std::vector<LaurentValue> cluster;
  std::size_t offset = 0;
  for (auto b : v.blocks) {
    if (b == 0 || offset + b * width > data.size()) throw DomainError("malformed seed vector");
    cluster.push_back(decode_variable(data.subspan(offset, b * width), b - 1, width, r));
    offset += b * width;
  }
  if (cluster.size() != r || offset + r * r != data.size()) throw DomainError("malformed seed vector");
  return Seed(std::move(cluster), decode_matrix(data.subspan(offset), r));
}

std::size_t slotted_length(std::size_t rank, std::size_t slot_blocks, bool include_matrix) {
  return rank * slot_blocks * (rank + 1) + (include_matrix ? rank * rank : 0);
}

std::vector<std::int64_t> pad_to_slots(const SeedVector& v, std::size_t slot_blocks) {
  const std::size_t width = v.rank + 1;
  std::vector<std::int64_t> out(slotted_length(v.rank, slot_blocks, v.include_matrix), 0);
  std::size_t src = 0;
  for (std::size_t i = 0; i < v.blocks.size(); ++i) {
    const std::size_t n = v.blocks[i] * width;
    if (v.blocks[i] > slot_blocks) throw DomainError("variable does not fit its slot");
    std::copy_n(v.entries.begin() + static_cast<std::ptrdiff_t>(src), n,
                out.begin() + static_cast<std::ptrdiff_t>(i * slot_blocks * width));
    src += n;
  }
  if (v.include_matrix) {
    std::copy(v.entries.begin() + static_cast<std::ptrdiff_t>(src), v.entries.end(),
              out.end() - static_cast<std::ptrdiff_t>(v.rank * v.rank));
  }
  return out;
}

Seed decode_slotted(const std::vector<std::int64_t>& padded, std::size_t rank, std::size_t slot_blocks,
                    bool include_matrix) {
  if (!include_matrix) throw DomainError("decoding needs the matrix block");
  if (padded.size() != slotted_length(rank, slot_blocks, true)) throw DomainError("wrong padded length");
  const std::size_t width = rank + 1;
  std::span<const std::int64_t> data(padded);
  std::vector<LaurentValue> cluster;
  for (std::size_t i = 0; i < rank; ++i) {
    auto slot = data.subspan(i * slot_blocks * width, slot_blocks * width);
    std::size_t used = 0;
    for (std::size_t b = 0; b < slot_blocks; ++b) {
      if (slot[b * width] != 0) used = b + 1;
    }
    if (used == 0) throw DomainError("empty variable slot");
    cluster.push_back(decode_variable(slot, used - 1, width, rank));
  }
  return Seed(std::move(cluster), decode_matrix(data.subspan(rank * slot_blocks * width), rank));
}

std::int64_t DenseTensor::at(std::span<const std::size_t> index) const {
  if (index.size() != rank) throw DimensionError("tensor index has the wrong rank");
  std::size_t flat = 0;
  for (auto i : index) {
    if (i >= extent) return 0;
    flat = flat * extent + i;
  }
  return values[flat];
}

std::size_t DenseTensor::nonzeros() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](auto x) { return x != 0; }));
}

namespace {

unsigned max_exponent(const Seed& s) {
  unsigned e = 0;
  for (const auto& x : s.cluster()) {
    for (const auto& t : x.numerator().terms()) {
      for (std::size_t i = 0; i < s.rank(); ++i) e = std::max(e, t.monomial[i]);
    }
    for (std::size_t i = 0; i < s.rank(); ++i) e = std::max(e, x.denominator()[i]);
  }
  return e;
}

std::size_t flat_index(const Monomial& m, std::size_t extent) {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < m.nvars(); ++i) flat = flat * extent + m[i];
  return flat;
}

}  // namespace

DenseEncoding encode_dense(const Seed& s, std::optional<std::size_t> extent) {
  const std::size_t ext = extent.value_or(max_exponent(s) + 1);
  if (ext <= max_exponent(s)) throw DomainError("tensor extent smaller than an exponent");
  std::size_t size = 1;
  for (std::size_t i = 0; i < s.rank(); ++i) size *= ext;
  DenseEncoding out;
  for (const auto& x : s.cluster()) {
    DenseTensor num{s.rank(), ext, std::vector<std::int64_t>(size, 0)};
    for (const auto& t : x.numerator().terms()) num.values[flat_index(t.monomial, ext)] = to_int64(t.coeff);
    DenseTensor den{s.rank(), ext, std::vector<std::int64_t>(size, 0)};
    den.values[flat_index(x.denominator(), ext)] = 1;
    out.numerators.push_back(std::move(num));
    out.denominators.push_back(std::move(den));
  }
  return out;
}

double dense_sparsity(const std::vector<Seed>& corpus) {
  if (corpus.empty()) throw DomainError("empty corpus");
  unsigned e = 0;
  for (const auto& s : corpus) e = std::max(e, max_exponent(s));
  const double cells = std::pow(static_cast<double>(e + 1), static_cast<double>(corpus.front().rank()));
  double nonzero = 0.0;
  double total = 0.0;
  for (const auto& s : corpus) {
    for (const auto& x : s.cluster()) nonzero += static_cast<double>(x.numerator().size() + 1);
    total += 2.0 * static_cast<double>(s.rank()) * cells;
  }
  return nonzero / total;
}

double slotted_sparsity(const std::vector<SeedVector>& corpus) {
  if (corpus.empty()) throw DomainError("empty corpus");
  std::size_t slot = 0;
  for (const auto& v : corpus) slot = std::max(slot, v.max_blocks());
  const auto& f = corpus.front();
  const double length = static_cast<double>(slotted_length(f.rank, slot, f.include_matrix));
  double nonzero = 0.0;
  for (const auto& v : corpus) {
    nonzero += static_cast<double>(std::count_if(v.entries.begin(), v.entries.end(), [](auto x) { return x != 0; }));
  }
  return nonzero / (length * static_cast<double>(corpus.size()));
}

Corpus encode_graph(const ExchangeGraph& g, bool include_matrix, const std::string& name) {
  if (g.payload() != Payload::seeds) throw DomainError("encoding needs a seed exchange graph");
  Corpus out;
  out.name = name.empty() ? g.metadata().name : name;
  out.vectors.reserve(g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    auto sv = encode_seed(g.seed(v), include_matrix);
    sv.algebra = out.name;
    sv.seed_index = v;
    out.vectors.push_back(std::move(sv));
  }
  return out;
}

std::vector<std::vector<std::int64_t>> padded_vectors(const Corpus& corpus) {
  std::size_t slot = 0;
  for (const auto& v : corpus.vectors) slot = std::max(slot, v.max_blocks());
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(corpus.vectors.size());
  for (const auto& v : corpus.vectors) out.push_back(pad_to_slots(v, slot));
  return out;
}

// ---------------------------------------------------------------------------
// Datasets

namespace {

Dataset build_dataset(const std::vector<std::vector<std::vector<std::int64_t>>>& classes,
                      const std::vector<std::string>& names, Rng& rng) {
  Dataset d;
  d.class_names = names;
  std::vector<std::pair<const std::vector<std::int64_t>*, int>> rows;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].empty()) throw DomainError("class '" + names[c] + "' is empty");
    d.class_sizes.push_back(classes[c].size());
    for (const auto& v : classes[c]) {
      d.length = std::max(d.length, v.size());
      rows.emplace_back(&v, static_cast<int>(c));
    }
  }
  std::shuffle(rows.begin(), rows.end(), rng);

  std::vector<Eigen::Triplet<double>> triplets;
  d.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = *rows[i].first;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] != 0) {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), static_cast<double>(v[j]));
      }
    }
    d.y.push_back(rows[i].second);
  }
  d.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.length));
  d.X.setFromTriplets(triplets.begin(), triplets.end());
  d.sparsity = static_cast<double>(triplets.size()) / (static_cast<double>(rows.size()) * static_cast<double>(d.length));
  return d;
}

}  // namespace

Dataset assemble_dataset(const std::vector<Corpus>& corpora, Rng& rng) {
  if (corpora.empty()) throw DomainError("no corpora");
  std::size_t slot = 0;
  const SeedVector* first = nullptr;
  for (const auto& c : corpora) {
    if (c.vectors.empty()) throw DomainError("corpus '" + c.name + "' is empty");
    for (const auto& v : c.vectors) {
      if (!first) first = &v;
      if (v.rank != first->rank || v.include_matrix != first->include_matrix) {
        throw DomainError("corpora use different encodings");
      }
      slot = std::max(slot, v.max_blocks());
    }
  }
  std::vector<std::vector<std::vector<std::int64_t>>> classes;
  std::vector<std::string> names;
  for (const auto& c : corpora) {
    std::vector<std::vector<std::int64_t>> rows;
    rows.reserve(c.vectors.size());
    for (const auto& v : c.vectors) rows.push_back(pad_to_slots(v, slot));
    classes.push_back(std::move(rows));
    names.push_back(c.name);
  }
  auto d = build_dataset(classes, names, rng);
  d.slot_blocks = slot;
  return d;
}

Dataset assemble_dataset(const std::vector<std::vector<std::vector<std::int64_t>>>& classes,
                         const std::vector<std::string>& names, Rng& rng) {
  if (classes.empty() || classes.size() != names.size()) throw DomainError("class names do not match classes");
  return build_dataset(classes, names, rng);
}

// ---------------------------------------------------------------------------
// MLP

namespace {

SparseRM take_rows(const SparseRM& X, std::span<const std::size_t> rows) {
  SparseRM out(static_cast<Eigen::Index>(rows.size()), X.cols());
  Eigen::VectorXi nnz(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    nnz[static_cast<Eigen::Index>(i)] = static_cast<int>(X.outerIndexPtr()[r + 1] - X.outerIndexPtr()[r]);
  }
  out.reserve(nnz);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (SparseRM::InnerIterator it(X, static_cast<Eigen::Index>(rows[i])); it; ++it) {
      out.insert(static_cast<Eigen::Index>(i), it.col()) = it.value();
    }
  }
  out.makeCompressed();
  return out;
}

// Numerically stable log(1 + e^z).
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct Forward {
  std::vector<RowMatrix> activations;  // hidden layer outputs after ReLU
  RowMatrix logits;
};

}  // namespace

Mlp::Mlp(std::size_t inputs, std::size_t classes, const MlpConfig& config, Rng& rng) : classes_(classes) {
  if (inputs == 0) throw DomainError("network needs at least one input");
  if (classes < 2) throw DomainError("classification needs at least two classes");
  std::vector<std::size_t> sizes{inputs};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(classes == 2 ? 1 : classes);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(sizes[l]);
    const auto fan_out = static_cast<Eigen::Index>(sizes[l + 1]);
    // Glorot uniform for weights and biases.
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    RowMatrix w(fan_in, fan_out);
    for (Eigen::Index j = 0; j < fan_out; ++j) {
      for (Eigen::Index i = 0; i < fan_in; ++i) w(i, j) = dist(rng);
    }
    Eigen::RowVectorXd b(fan_out);
    for (Eigen::Index j = 0; j < fan_out; ++j) b[j] = dist(rng);
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
    m_w_.push_back(RowMatrix::Zero(fan_in, fan_out));
    v_w_.push_back(RowMatrix::Zero(fan_in, fan_out));
    m_b_.push_back(Eigen::RowVectorXd::Zero(fan_out));
    v_b_.push_back(Eigen::RowVectorXd::Zero(fan_out));
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

namespace {

Forward forward(const std::vector<RowMatrix>& w, const std::vector<Eigen::RowVectorXd>& b, const SparseRM& X) {
  if (X.cols() != w.front().rows()) throw DimensionError("input width does not match the network");
  Forward f;
  RowMatrix z = X * w[0];
  z.rowwise() += b[0];
  for (std::size_t l = 1; l < w.size(); ++l) {
    f.activations.push_back(z.cwiseMax(0.0));
    z = f.activations.back() * w[l];
    z.rowwise() += b[l];
  }
  f.logits = std::move(z);
  return f;
}

// Mean cross-entropy and d(loss)/d(logits).
double head_loss(const RowMatrix& logits, const std::vector<int>& y, RowMatrix* delta) {
  const auto n = logits.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  if (delta) delta->resize(n, logits.cols());
  if (logits.cols() == 1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = logits(i, 0);
      const double t = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;
      loss += softplus(z) - t * z;
      if (delta) (*delta)(i, 0) = (1.0 / (1.0 + std::exp(-z)) - t) * inv_n;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = logits.row(i).maxCoeff();
      const Eigen::RowVectorXd e = (logits.row(i).array() - m).exp().matrix();
      const double sum = e.sum();
      const auto t = static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]);
      loss += m + std::log(sum) - logits(i, t);
      if (delta) {
        delta->row(i) = e / sum;
        (*delta)(i, t) -= 1.0;
        delta->row(i) *= inv_n;
      }
    }
  }
  return loss * inv_n;
}

void check_labels(const SparseRM& X, const std::vector<int>& y, std::size_t classes) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw DimensionError("row count differs from label count");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) throw DomainError("label out of range");
  }
}

}  // namespace

Eigen::MatrixXd Mlp::predict_proba(const SparseRM& X) const {
  const auto f = forward(weights_, biases_, X);
  Eigen::MatrixXd p(f.logits.rows(), static_cast<Eigen::Index>(classes_));
  for (Eigen::Index i = 0; i < f.logits.rows(); ++i) {
    if (f.logits.cols() == 1) {
      const double q = 1.0 / (1.0 + std::exp(-f.logits(i, 0)));
      p(i, 0) = 1.0 - q;
      p(i, 1) = q;
    } else {
      const double m = f.logits.row(i).maxCoeff();
      const Eigen::RowVectorXd e = (f.logits.row(i).array() - m).exp().matrix();
      p.row(i) = e / e.sum();
    }
  }
  return p;
}

std::vector<int> Mlp::predict(const SparseRM& X) const {
  const auto f = forward(weights_, biases_, X);
  std::vector<int> out(static_cast<std::size_t>(f.logits.rows()));
  for (Eigen::Index i = 0; i < f.logits.rows(); ++i) {
    Eigen::Index best = 0;
    if (f.logits.cols() == 1) {
      best = f.logits(i, 0) > 0.0 ? 1 : 0;
    } else {
      f.logits.row(i).maxCoeff(&best);
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double Mlp::loss(const SparseRM& X, const std::vector<int>& y, double l2) const {
  check_labels(X, y, classes_);
  const auto f = forward(weights_, biases_, X);
  double penalty = 0.0;
  for (const auto& w : weights_) penalty += w.squaredNorm();
  return head_loss(f.logits, y, nullptr) + 0.5 * l2 * penalty / static_cast<double>(X.rows());
}

Mlp::Gradient Mlp::backprop(const SparseRM& X, const std::vector<int>& y, double l2,
                            RowMatrix* first_delta) const {
  check_labels(X, y, classes_);
  const auto f = forward(weights_, biases_, X);
  const double n = static_cast<double>(X.rows());
  Gradient g;
  RowMatrix delta;
  g.loss = head_loss(f.logits, y, &delta);
  const std::size_t L = weights_.size();
  g.weights.resize(L);
  g.biases.resize(L);
  double penalty = 0.0;
  for (std::size_t l = L; l-- > 0;) {
    g.biases[l] = delta.colwise().sum();
    if (l == 0) {
      if (first_delta) {
        *first_delta = std::move(delta);
        break;
      }
      g.weights[0] = X.transpose() * delta;
    } else {
      g.weights[l] = f.activations[l - 1].transpose() * delta;
    }
    penalty += weights_[l].squaredNorm();
    g.weights[l] += (l2 / n) * weights_[l];
    if (l > 0) {
      RowMatrix back = delta * weights_[l].transpose();
      delta = (f.activations[l - 1].array() > 0.0).select(back, 0.0);
    }
  }
  g.loss += 0.5 * l2 * penalty / n;
  return g;
}

Mlp::Gradient Mlp::loss_gradient(const SparseRM& X, const std::vector<int>& y, double l2) const {
  return backprop(X, y, l2, nullptr);
}

namespace {

// One Adam update of a parameter block.
template <typename Param, typename Grad>
void adam_update(Param& w, Param& m, Param& v, const Grad& g, double lr, const MlpConfig& c) {
  m = c.beta1 * m + (1.0 - c.beta1) * g;
  v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseAbs2();
  w.array() -= lr * m.array() / (v.array().sqrt() + c.epsilon);
}

}  // namespace

double Mlp::step_size(const MlpConfig& c) {
  ++step_;
  const double t = static_cast<double>(step_);
  return c.learning_rate * std::sqrt(1.0 - std::pow(c.beta2, t)) / (1.0 - std::pow(c.beta1, t));
}

void Mlp::adam_step(const Gradient& g, const MlpConfig& c) {
  const double lr = step_size(c);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    adam_update(weights_[l], m_w_[l], v_w_[l], g.weights[l], lr, c);
    adam_update(biases_[l], m_b_[l], v_b_[l], g.biases[l], lr, c);
  }
}

double Mlp::train_step(const SparseRM& X, const std::vector<int>& y, const MlpConfig& c) {
  RowMatrix delta;
  auto g = backprop(X, y, c.l2, &delta);
  const double n = static_cast<double>(X.rows());

  const SparseRM xt = X.transpose();
  const double lr = step_size(c);
  for (std::size_t l = 1; l < weights_.size(); ++l) {
    adam_update(weights_[l], m_w_[l], v_w_[l], g.weights[l], lr, c);
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    adam_update(biases_[l], m_b_[l], v_b_[l], g.biases[l], lr, c);
  }

  // Fused gradient + Adam pass over the first layer, one input row at a time.
  auto& w = weights_[0];
  const Eigen::Index width = w.cols();
  const double decay = c.l2 / n;
  const double b1 = c.beta1, b2 = c.beta2, eps = c.epsilon;
  double penalty = 0.0;
  std::vector<double> grad(static_cast<std::size_t>(width));
  for (Eigen::Index j = 0; j < w.rows(); ++j) {
    double* wr = w.row(j).data();
    double* mr = m_w_[0].row(j).data();
    double* vr = v_w_[0].row(j).data();
    penalty += w.row(j).squaredNorm();
    for (Eigen::Index h = 0; h < width; ++h) grad[h] = decay * wr[h];
    for (SparseRM::InnerIterator it(xt, j); it; ++it) {
      const double x = it.value();
      const double* d = delta.row(it.col()).data();
      for (Eigen::Index h = 0; h < width; ++h) grad[h] += x * d[h];
    }
    for (Eigen::Index h = 0; h < width; ++h) {
      const double gh = grad[h];
      mr[h] = b1 * mr[h] + (1.0 - b1) * gh;
      vr[h] = b2 * vr[h] + (1.0 - b2) * gh * gh;
      wr[h] -= lr * mr[h] / (std::sqrt(vr[h]) + eps);
    }
  }
  return g.loss + 0.5 * c.l2 * penalty / n;
}

std::vector<double> Mlp::fit(const SparseRM& X, const std::vector<int>& y, const MlpConfig& config, Rng& rng) {
  check_labels(X, y, classes_);
  const std::size_t n = y.size();
  if (n == 0) throw DomainError("no training samples");
  const std::size_t batch = std::clamp<std::size_t>(config.batch_size, 1, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> curve;
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      std::span<const std::size_t> idx(order.data() + start, len);
      const auto xb = take_rows(X, idx);
      std::vector<int> yb(len);
      for (std::size_t i = 0; i < len; ++i) yb[i] = y[idx[i]];
      const double loss = train_step(xb, yb, config);
      if (!std::isfinite(loss)) {
        throw TrainingError("training diverged at epoch " + std::to_string(epoch + 1));
      }
      total += loss * static_cast<double>(len);
    }
    curve.push_back(total / static_cast<double>(n));
    if (config.patience > 0) {
      stale = curve.back() > best - config.tolerance ? stale + 1 : 0;
      best = std::min(best, curve.back());
      if (stale > config.patience) break;
    }
  }
  for (const auto& w : weights_) {
    if (!w.allFinite()) throw TrainingError("non-finite parameters after training");
  }
  return curve;
}

namespace {

constexpr char kMagic[4] = {'C', 'M', 'L', 'P'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ConfigError("truncated model file");
  return value;
}

}  // namespace

// Layout: magic, u32 version, u32 classes, u32 layers, then per layer
// u64 rows, u64 cols, row-major float64 weights, float64 biases.
void Mlp::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_pod(out, kFormatVersion);
  write_pod(out, static_cast<std::uint32_t>(classes_));
  write_pod(out, static_cast<std::uint32_t>(weights_.size()));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    write_pod(out, static_cast<std::uint64_t>(weights_[l].rows()));
    write_pod(out, static_cast<std::uint64_t>(weights_[l].cols()));
    out.write(reinterpret_cast<const char*>(weights_[l].data()),
              static_cast<std::streamsize>(weights_[l].size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(biases_[l].data()),
              static_cast<std::streamsize>(biases_[l].size() * sizeof(double)));
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

Mlp Mlp::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw ConfigError("not a model file");
  if (read_pod<std::uint32_t>(in) != kFormatVersion) throw ConfigError("unsupported model file version");
  Mlp m;
  m.classes_ = read_pod<std::uint32_t>(in);
  const auto layers = read_pod<std::uint32_t>(in);
  for (std::uint32_t l = 0; l < layers; ++l) {
    const auto rows = static_cast<Eigen::Index>(read_pod<std::uint64_t>(in));
    const auto cols = static_cast<Eigen::Index>(read_pod<std::uint64_t>(in));
    RowMatrix w(rows, cols);
    Eigen::RowVectorXd b(cols);
    in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated model file");
    if (l > 0 && m.weights_.back().cols() != rows) throw ConfigError("inconsistent layer shapes");
    m.m_w_.push_back(RowMatrix::Zero(rows, cols));
    m.v_w_.push_back(RowMatrix::Zero(rows, cols));
    m.m_b_.push_back(Eigen::RowVectorXd::Zero(cols));
    m.v_b_.push_back(Eigen::RowVectorXd::Zero(cols));
    m.weights_.push_back(std::move(w));
    m.biases_.push_back(std::move(b));
  }
  if (m.weights_.empty()) throw ConfigError("model has no layers");
  return m;
}

Mlp train_mlp(const SparseRM& X, const std::vector<int>& y, std::size_t classes, const MlpConfig& config, Rng& rng) {
  Mlp model(static_cast<std::size_t>(X.cols()), classes, config, rng);
  model.fit(X, y, config, rng);
  return model;
}

// ---------------------------------------------------------------------------
// Metrics and cross-validation

namespace {

void check_lengths(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DimensionError("predictions and labels differ in length");
  if (a.empty()) throw DomainError("no predictions");
}

}  // namespace

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  check_lengths(predictions, labels);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double mcc(const std::vector<int>& predictions, const std::vector<int>& labels) {
  check_lengths(predictions, labels);
  std::map<int, double> p, t;
  double c = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    p[predictions[i]] += 1.0;
    t[labels[i]] += 1.0;
    c += predictions[i] == labels[i];
  }
  const double s = static_cast<double>(labels.size());
  double pt = 0.0, pp = 0.0, tt = 0.0;
  for (const auto& [k, n] : p) {
    pp += n * n;
    auto it = t.find(k);
    if (it != t.end()) pt += n * it->second;
  }
  for (const auto& [k, n] : t) tt += n * n;
  const double den = std::sqrt((s * s - pp) * (s * s - tt));
  return den == 0.0 ? 0.0 : (c * s - pt) / den;
}

std::vector<std::vector<std::size_t>> confusion_counts(const std::vector<int>& predictions,
                                                       const std::vector<int>& labels, std::size_t classes) {
  check_lengths(predictions, labels);
  std::vector<std::vector<std::size_t>> m(classes, std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto a = static_cast<std::size_t>(labels[i]);
    const auto b = static_cast<std::size_t>(predictions[i]);
    if (a >= classes || b >= classes) throw DomainError("label out of range");
    ++m[a][b];
  }
  return m;
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t folds, Rng& rng) {
  if (folds < 2) throw DomainError("need at least two folds");
  if (n < folds) throw DomainError("fewer samples than folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t start = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t len = n / folds + (f < n % folds ? 1 : 0);
    out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(start + len));
    std::sort(out[f].begin(), out[f].end());
    start += len;
  }
  return out;
}

namespace {

// Removes columns that are zero in every row.
SparseRM drop_empty_columns(const SparseRM& X) {
  std::vector<int> remap(static_cast<std::size_t>(X.cols()), -1);
  for (Eigen::Index k = 0; k < X.nonZeros(); ++k) remap[static_cast<std::size_t>(X.innerIndexPtr()[k])] = 0;
  int next = 0;
  for (auto& r : remap) {
    if (r == 0) r = next++;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(X.nonZeros()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (SparseRM::InnerIterator it(X, i); it; ++it) {
      triplets.emplace_back(static_cast<int>(i), remap[static_cast<std::size_t>(it.col())], it.value());
    }
  }
  SparseRM out(X.rows(), std::max(next, 1));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::pair<double, double> mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / n) / std::sqrt(n)};
}

}  // namespace

CvReport cross_validate(const Dataset& data, const MlpConfig& config, std::uint64_t seed, std::size_t folds) {
  const std::size_t n = data.size();
  const std::size_t k = data.classes();
  Rng split_rng(derive_seed(seed, 0));
  const auto parts = kfold_indices(n, folds, split_rng);
  const SparseRM X = drop_empty_columns(data.X);

  CvReport report;
  report.confusion.assign(k, std::vector<double>(k, 0.0));
  std::vector<double> accs, mccs;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    train.reserve(n - parts[f].size());
    for (std::size_t g = 0; g < folds; ++g) {
      if (g != f) train.insert(train.end(), parts[g].begin(), parts[g].end());
    }
    std::sort(train.begin(), train.end());
    std::vector<int> y_train, y_test;
    for (auto i : train) y_train.push_back(data.y[i]);
    for (auto i : parts[f]) y_test.push_back(data.y[i]);

    Rng rng(derive_seed(seed, f + 1));
    Mlp model(static_cast<std::size_t>(X.cols()), k, config, rng);
    const auto curve = model.fit(take_rows(X, train), y_train, config, rng);
    const auto pred = model.predict(take_rows(X, parts[f]));

    FoldResult r;
    r.accuracy = accuracy(pred, y_test);
    r.mcc = mcc(pred, y_test);
    r.test_indices = parts[f];
    r.epochs = curve.size();
    const auto counts = confusion_counts(pred, y_test, k);
    r.confusion.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        r.confusion[a][b] = static_cast<double>(counts[a][b]) / static_cast<double>(y_test.size());
        report.confusion[a][b] += r.confusion[a][b] / static_cast<double>(folds);
      }
    }
    accs.push_back(r.accuracy);
    mccs.push_back(r.mcc);
    report.folds.push_back(std::move(r));
  }
  std::tie(report.accuracy_mean, report.accuracy_se) = mean_se(accs);
  std::tie(report.mcc_mean, report.mcc_se) = mean_se(mccs);
  return report;
}

// ---------------------------------------------------------------------------
// Fake data

std::vector<std::vector<std::int64_t>> generate_fake(const std::vector<std::vector<std::int64_t>>& corpus, Rng& rng) {
  if (corpus.empty()) throw DomainError("empty corpus");
  const std::size_t length = corpus.front().size();
  std::map<std::int64_t, double> freq;
  for (const auto& v : corpus) {
    if (v.size() != length) throw DomainError("corpus vectors must share one length");
    for (auto x : v) freq[x] += 1.0;
  }
  std::vector<std::int64_t> values;
  std::vector<double> weights;
  for (const auto& [x, w] : freq) {
    values.push_back(x);
    weights.push_back(w);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  const std::set<std::vector<std::int64_t>> truth(corpus.begin(), corpus.end());

  constexpr std::size_t kMaxAttempts = 10'000;
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(corpus.size());
  std::vector<std::int64_t> v(length);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::size_t attempts = 0;
    do {
      if (++attempts > kMaxAttempts) throw DomainError("cannot draw a vector distinct from the corpus");
      for (auto& x : v) x = values[pick(rng)];
    } while (truth.count(v) != 0);
    out.push_back(v);
  }
  return out;
}

}  // namespace clusterml
