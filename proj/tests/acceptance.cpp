#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clusterml/catalogue.hpp"
#include "clusterml/experiments.hpp"
#include "clusterml/io.hpp"
#include "clusterml/reproduce.hpp"
#include "properties.hpp"

using namespace clusterml;
using clusterml::testing::Rational;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome from_report(const ReproduceReport& rep) {
  std::ostringstream os;
  const auto failed = rep.failures();
  os << rep.rows.size() - failed.size() << "/" << rep.rows.size() << " cells";
  for (const auto& f : failed) os << "; " << f.item << " " << f.field << " expected " << f.expected << " got " << f.computed;
  return {rep.passed(), os.str()};
}

Outcome merge(const std::vector<Outcome>& parts) {
  Outcome out{true, ""};
  for (const auto& p : parts) {
    out.pass = out.pass && p.pass;
    out.detail += (out.detail.empty() ? "" : " | ") + p.detail;
  }
  return out;
}

Outcome a2_closure() {
  const auto start = std::chrono::steady_clock::now();
  const Seed a2 = builtin_seed("A2");
  const auto seeds = generate_full(a2);
  const auto quivers = generate_full(a2, Equivalence::exact, Payload::quivers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const Rational x1(3, 7), x2(11, 5);
  const Rational y1 = (x2 + 1) / x1, y2 = (x1 + 1) / x2, z = (x1 + x2 + 1) / (x1 * x2);
  std::set<std::pair<Rational, Rational>> expected, computed;
  for (auto [a, b] : std::vector<std::pair<Rational, Rational>>{{x1, x2}, {y1, x2}, {x1, y2}, {y1, z}, {z, y2}}) {
    expected.emplace(a, b);
    expected.emplace(b, a);
  }
  for (std::size_t v = 0; v < seeds.vertex_count(); ++v) {
    computed.emplace(clusterml::testing::evaluate(seeds.seed(v).variable(0), {x1, x2}),
                     clusterml::testing::evaluate(seeds.seed(v).variable(1), {x1, x2}));
  }
  std::ostringstream os;
  os << seeds.vertex_count() << " seeds, " << computed.size() << " distinct clusters, " << quivers.vertex_count()
     << " quivers, " << format_fixed(secs, 3) << " s";
  return {seeds.vertex_count() == 10 && computed == expected && quivers.vertex_count() == 2 && secs < 1.0, os.str()};
}

Outcome multiclass(const ExperimentConfig& cfg) {
  const auto inv = run_multiclass_finite(cfg);
  const auto conf = inv.confusion();
  double worst = 0.0;
  bool dominant = true;
  for (std::size_t a = 0; a < conf.size(); ++a) {
    for (std::size_t b = 0; b < conf.size(); ++b) {
      if (a == b) continue;
      worst = std::max(worst, conf[a][b]);
      dominant = dominant && conf[a][a] > conf[a][b] && conf[a][a] > conf[b][a];
    }
  }
  std::ostringstream os;
  os << "accuracy " << format_fixed(inv.accuracy(), 3) << " +- " << format_fixed(inv.accuracy_se(), 3) << ", mcc "
     << format_fixed(inv.mcc(), 3) << ", largest off-diagonal " << format_fixed(worst, 4) << " over "
     << inv.runs.size() << " runs";
  return {inv.accuracy() >= 0.95 && dominant && worst < 0.02, os.str()};
}

Outcome properties(std::uint64_t seed) {
  Outcome out{true, ""};
  for (const auto& r : clusterml::testing::all_properties(seed)) {
    out.pass = out.pass && r.ok();
    out.detail += (out.detail.empty() ? "" : "; ") + r.name + " " + std::to_string(r.cases - r.failures) + "/" +
                  std::to_string(r.cases);
    if (!r.ok()) out.detail += " (" + r.first_failure + ")";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  bool deterministic = false, stochastic = false;
  std::vector<int> only;
  ReproduceOptions opts;
  opts.repeats = 3;
  app.add_flag("--deterministic", deterministic, "Criteria 1-8 and 12");
  app.add_flag("--stochastic", stochastic, "Criteria 9-11 (trains every classifier)");
  app.add_option("--only", only, "Run these criteria");
  app.add_option("--repeats", opts.repeats, "Cross-validation runs per investigation");
  app.add_option("--seed", opts.seed);
  CLI11_PARSE(app, argc, argv);
  if (!deterministic && !stochastic && only.empty()) deterministic = stochastic = true;

  ExperimentConfig cfg;
  cfg.seed = opts.seed;
  cfg.repeats = opts.repeats;
  ReproduceOptions banded = opts;
  banded.metrics_band = true;

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, a2_closure},
      {2, [&] { return from_report(reproduce_table(1, opts)); }},
      {3, [&] { return from_report(reproduce_table(4, opts)); }},
      {4, [&] { return from_report(reproduce_table(2, opts)); }},
      {5, [&] { return from_report(reproduce_table(3, opts)); }},
      {6, [&] { return merge({from_report(reproduce_table(5, opts)), from_report(reproduce_table(6, opts))}); }},
      {7, [&] { return from_report(reproduce_table(7, opts)); }},
      {8, [&] { return from_report(reproduce_table(9, opts)); }},
      {9, [&] { return from_report(reproduce_table(8, banded)); }},
      {10, [&] { return multiclass(cfg); }},
      {11, [&] { return from_report(reproduce_table(10, banded)); }},
      {12, [&] { return properties(opts.seed); }},
  };

  bool all = true;
  for (const auto& [id, run] : criteria) {
    const bool is_stochastic = id >= 9 && id <= 11;
    const bool selected = only.empty() ? (is_stochastic ? stochastic : deterministic)
                                       : std::find(only.begin(), only.end(), id) != only.end();
    if (!selected) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << format_fixed(secs, 1)
              << " s) " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
