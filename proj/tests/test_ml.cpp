#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <algorithm>
#include <set>

#include "clusterml/catalogue.hpp"
#include "clusterml/errors.hpp"
#include "clusterml/ml.hpp"

using namespace clusterml;

namespace {

Eigen::SparseMatrix<double, Eigen::RowMajor> sparse(const std::vector<std::vector<double>>& rows) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> X(long(rows.size()), long(rows.front().size()));
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] != 0) t.emplace_back(int(i), int(j), rows[i][j]);
    }
  }
  X.setFromTriplets(t.begin(), t.end());
  return X;
}

double binary_mcc(const std::vector<int>& p, const std::vector<int>& y) {
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1) (p[i] == 1 ? tp : fn) += 1;
    else (p[i] == 1 ? fp : tn) += 1;
  }
  const double d = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  return d == 0 ? 0 : (tp * tn - fp * fn) / d;
}

}  // namespace

TEST_CASE("seed encoding layout") {
  const Seed s = mutate(builtin_seed("A2"), 0);
  const auto v = encode_seed(s, true);
  CHECK(v.entries == std::vector<std::int64_t>{1, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 1, 1, 0, 0, 0, -1, 1, 0});
  CHECK(v.blocks == std::vector<std::size_t>{3, 2});
  CHECK(v.max_blocks() == 3);
  CHECK(encode_seed(s, false).length() == 15);
  CHECK(decode_seed(v) == s);
  CHECK_THROWS_AS(decode_seed(encode_seed(s, false)), DomainError);

  const auto padded = pad_to_slots(v, 4);
  CHECK(padded.size() == slotted_length(2, 4, true));
  CHECK(padded.size() == 2 * 4 * 3 + 4);
  CHECK(decode_slotted(padded, 2, 4, true) == s);
  CHECK_THROWS_AS(pad_to_slots(v, 2), DomainError);
}

TEST_CASE("dense tensors") {
  const Seed s = mutate(builtin_seed("A2"), 0);
  const auto d = encode_dense(s);
  REQUIRE(d.numerators.size() == 2);
  CHECK(d.numerators[0].extent == 2);
  const std::vector<std::size_t> x2{0, 1}, unit{0, 0}, x1{1, 0};
  CHECK(d.numerators[0].at(x2) == 1);
  CHECK(d.numerators[0].at(unit) == 1);
  CHECK(d.denominators[0].at(x1) == 1);
  CHECK(d.numerators[0].nonzeros() == 2);
  CHECK(dense_sparsity({s}) == doctest::Approx(5.0 / 16.0));
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(42, 0) == derive_seed(42, 0));
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("metrics") {
  const std::vector<int> y{0, 0, 1, 1, 1, 0};
  const std::vector<int> p{0, 1, 1, 1, 0, 0};
  CHECK(accuracy(p, y) == doctest::Approx(4.0 / 6.0));
  CHECK(mcc(p, y) == doctest::Approx(binary_mcc(p, y)));
  CHECK(mcc(y, y) == doctest::Approx(1.0));
  CHECK(mcc(std::vector<int>(6, 0), y) == 0.0);
  const auto c = confusion_counts(p, y, 2);
  CHECK(c == std::vector<std::vector<std::size_t>>{{2, 1}, {1, 2}});
  CHECK_THROWS_AS(accuracy({0}, y), DimensionError);

  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    const std::size_t k = 2 + rng() % 4, n = 5 + rng() % 40;
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = int(rng() % k);
      b[i] = int(rng() % k);
    }
    if (k == 2) CHECK(mcc(a, b) == doctest::Approx(binary_mcc(a, b)));
    // Renaming the classes leaves the score unchanged.
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> ra(n), rb(n);
    for (std::size_t i = 0; i < n; ++i) {
      ra[i] = perm[std::size_t(a[i])];
      rb[i] = perm[std::size_t(b[i])];
    }
    CHECK(mcc(ra, rb) == doctest::Approx(mcc(a, b)));
  }
}

TEST_CASE("Adam leaves parameters alone on a zero gradient") {
  MlpConfig cfg;
  cfg.hidden = {4};
  Rng rng(1);
  Mlp net(3, 2, cfg, rng);
  const auto before = net.weights();
  const auto bias = net.biases();
  Mlp::Gradient zero;
  for (const auto& w : net.weights()) zero.weights.push_back(RowMatrix::Zero(w.rows(), w.cols()));
  for (const auto& b : net.biases()) zero.biases.push_back(Eigen::RowVectorXd::Zero(b.size()));
  for (int i = 0; i < 5; ++i) net.adam_step(zero, cfg);
  for (std::size_t l = 0; l < before.size(); ++l) {
    CHECK(net.weights()[l] == before[l]);
    CHECK(net.biases()[l] == bias[l]);
  }
  CHECK(net.steps() == 5);
}

TEST_CASE("initialisation shapes and bounds") {
  MlpConfig cfg;
  Rng rng(2);
  Mlp net(10, 3, cfg, rng);
  CHECK(net.weights().size() == 4);
  CHECK(net.outputs() == 3);
  CHECK(net.parameter_count() == 10 * 256 + 256 + 256 * 256 * 2 + 512 + 256 * 3 + 3);
  const double bound = std::sqrt(6.0 / (10 + 256));
  CHECK(net.weights()[0].cwiseAbs().maxCoeff() <= bound);
  CHECK(Mlp(10, 2, cfg, rng).outputs() == 1);
}

TEST_CASE("XOR is learnt") {
  const auto X = sparse({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const std::vector<int> y{0, 1, 1, 0};
  MlpConfig cfg;
  cfg.hidden = {16, 16};
  cfg.learning_rate = 0.01;
  cfg.epochs = 1000;
  cfg.l2 = 0;
  Rng rng(11);
  const Mlp net = train_mlp(X, y, 2, cfg, rng);
  CHECK(net.predict(X) == y);
}

TEST_CASE("checkpoints round-trip") {
  MlpConfig cfg;
  cfg.hidden = {5, 4};
  Rng rng(3);
  const Mlp net(6, 3, cfg, rng);
  const auto path = std::filesystem::temp_directory_path() / "clusterml_test.cmlp";
  net.save(path);
  const Mlp back = Mlp::load(path);
  const auto X = sparse({{1, 0, 2, 0, 0, 1}, {0, 3, 0, 1, 0, 0}});
  CHECK(back.predict_proba(X).isApprox(net.predict_proba(X), 0.0));
  CHECK(back.classes() == 3);
  std::ofstream(path, std::ios::binary) << "not a model";
  CHECK_THROWS(Mlp::load(path));
  std::filesystem::remove(path);
}

TEST_CASE("cross-validation separates easy classes") {
  Rng rng(9);
  std::vector<std::vector<std::vector<std::int64_t>>> classes(2);
  for (int i = 0; i < 40; ++i) {
    classes[0].push_back({1, std::int64_t(rng() % 3), 0, 0});
    classes[1].push_back({0, 0, std::int64_t(rng() % 3), 1});
  }
  Rng shuffle(1);
  const Dataset data = assemble_dataset(classes, {"a", "b"}, shuffle);
  CHECK(data.size() == 80);
  CHECK(data.class_sizes == std::vector<std::size_t>{40, 40});
  MlpConfig cfg;
  cfg.hidden = {8};
  cfg.learning_rate = 0.01;
  cfg.epochs = 300;
  const auto r1 = cross_validate(data, cfg, 4);
  const auto r2 = cross_validate(data, cfg, 4);
  CHECK(r1.accuracy_mean == doctest::Approx(1.0));
  CHECK(r1.mcc_mean == doctest::Approx(1.0));
  CHECK(r1.accuracy_mean == r2.accuracy_mean);
  CHECK(r1.folds.size() == 5);
  double total = 0;
  for (const auto& row : r1.confusion) {
    for (double x : row) total += x;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK_THROWS_AS(cross_validate(data, cfg, 4, 100), DomainError);
}

TEST_CASE("fake vectors") {
  const std::vector<std::vector<std::int64_t>> truth{{1, 0, 2, 0}, {1, 1, 0, 0}, {3, 0, 0, 1}};
  Rng rng(4);
  const auto fake = generate_fake(truth, rng);
  CHECK(fake.size() == truth.size());
  const std::set<std::vector<std::int64_t>> real(truth.begin(), truth.end());
  for (const auto& f : fake) {
    CHECK(f.size() == 4);
    CHECK_FALSE(real.count(f));
    for (auto x : f) CHECK((x == 0 || x == 1 || x == 2 || x == 3));
  }
}
