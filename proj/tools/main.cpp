#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clusterml/analytics.hpp"
#include "clusterml/catalogue.hpp"
#include "clusterml/embedding.hpp"
#include "clusterml/errors.hpp"
#include "clusterml/experiments.hpp"
#include "clusterml/io.hpp"
#include "clusterml/reproduce.hpp"

namespace fs = std::filesystem;
using namespace clusterml;

namespace {

enum Exit { ok = 0, failure = 1, mismatch = 2, capped = 3, bad_config = 4 };

struct Common {
  std::string out;
  std::string catalogue;
  std::size_t max_vertices = GenerationLimits{}.max_vertices;
  std::size_t max_terms = GenerationLimits{}.max_terms;
  long max_seconds = 0;

  GenerationLimits limits() const {
    if (max_vertices == 0 || max_terms == 0) throw ConfigError("resource caps must be positive");
    GenerationLimits l;
    l.max_vertices = max_vertices;
    l.max_terms = max_terms;
    if (max_seconds < 0) throw ConfigError("resource caps must be positive");
    if (max_seconds > 0) l.max_wall_time = std::chrono::seconds(max_seconds);
    return l;
  }

  // Relative paths land under $CLUSTERML_OUT when it is set.
  fs::path resolve(const std::string& path, const std::string& fallback) const {
    fs::path p = path.empty() ? fs::path(fallback) : fs::path(path);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("CLUSTERML_OUT"); root && *root) return fs::path(root) / p;
    return p;
  }
};

void add_caps(CLI::App* cmd, Common& c) {
  cmd->add_option("--catalogue", c.catalogue, "JSON file of named initial seeds");
  cmd->add_option("--max-vertices", c.max_vertices, "Vertex cap for graph generation");
  cmd->add_option("--max-terms", c.max_terms, "Cap on stored numerator terms");
  cmd->add_option("--max-seconds", c.max_seconds, "Wall-clock cap in seconds");
}

// Catalogue file first, then a seed JSON path, then the builtin names.
Seed resolve_seed(const std::string& name, const Common& c) {
  if (!c.catalogue.empty()) {
    const auto cat = load_seed_catalogue(c.catalogue);
    if (auto it = cat.find(name); it != cat.end()) return it->second;
  }
  if (fs::is_regular_file(name)) {
    const auto cat = load_seed_catalogue(name);
    if (cat.size() != 1) throw ConfigError(name + " holds more than one seed");
    return cat.begin()->second;
  }
  return builtin_seed(name);
}

std::string seed_label(const std::string& name) {
  return fs::is_regular_file(name) ? fs::path(name).stem().string() : name;
}

std::optional<int> parse_depth(const std::string& text) {
  if (text == "full") return std::nullopt;
  try {
    std::size_t used = 0;
    const int d = std::stoi(text, &used);
    if (used == text.size() && d >= 0) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("depth must be a non-negative integer or 'full', got '" + text + "'");
}

std::string render_graph(const ExchangeGraph& g, const std::string& format) {
  if (format == "json") return graph_to_json(g).dump(1) + "\n";
  if (format == "dot") return graph_to_dot(g);
  if (format == "csv") return graph_to_csv(g);
  throw ConfigError("unknown format '" + format + "'");
}

void print_counts(const ExchangeGraph& g) {
  const auto counts = seeds_per_depth(g);
  for (std::size_t d = 0; d < counts.size(); ++d) std::cout << "depth " << d << ": " << counts[d] << "\n";
  std::cout << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string seed;
  std::string depth = "4";
  std::string mode = "exact";
  std::string payload = "seeds";
  std::string format = "json";
};

int cmd_generate(const GenerateArgs& a, const Common& c) {
  const Seed initial = resolve_seed(a.seed, c);
  const auto depth = parse_depth(a.depth);
  const auto mode = parse_equivalence(a.mode);
  const auto payload = parse_payload(a.payload);
  const std::string name = seed_label(a.seed);
  const fs::path out = c.resolve(c.out, name + "_" + a.payload + "_" + a.depth + "." + a.format);
  try {
    ExchangeGraph g;
    if (!depth) {
      g = generate_full(initial, mode, payload, c.limits(), name);
    } else if (payload == Payload::seeds) {
      g = generate_seed_graph(initial, *depth, mode, c.limits(), name);
    } else {
      g = generate_quiver_graph(initial, *depth, mode, c.limits(), name);
    }
    print_counts(g);
    write_text(out, render_graph(g, a.format));
    std::cout << "wrote " << out.string() << "\n";
    return ok;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource cap reached: " << e.what() << " (completed depth " << e.completed_depth() << ")\n";
    print_counts(e.partial());
    fs::path partial = out;
    if (a.format != "json") partial.replace_extension(".json");
    write_text(partial, graph_to_json(e.partial()).dump(1) + "\n");
    std::cerr << "partial graph written to " << partial.string() << "\n";
    return capped;
  }
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string in;
  std::string format;  // inferred from --out when empty
};

int cmd_analyze(const AnalyzeArgs& a, const Common& c) {
  const ExchangeGraph g = graph_from_json(read_json(a.in));
  const auto& m = g.metadata();
  if (m.partial) std::cerr << "warning: " << a.in << " is a partial graph\n";
  const StatsKey key{m.name, m.payload, m.depth_limit, m.mode};
  const GraphStats stats = full_stats(g.topology());
  const fs::path out = c.resolve(c.out, (m.name.empty() ? "graph" : m.name) + "_stats.csv");
  const std::string format = a.format.empty() ? (out.extension() == ".json" ? "json" : "csv") : a.format;
  if (format == "json") {
    write_text(out, stats_to_json(key, stats).dump(1) + "\n");
  } else if (format == "csv") {
    write_text(out, stats_csv_header() + stats_csv_row(key, stats));
  } else {
    throw ConfigError("analyze writes json or csv");
  }
  std::cout << stats_csv_header() << stats_csv_row(key, stats);
  return ok;
}

// ---------------------------------------------------------------------------

struct EmbedArgs {
  std::vector<std::string> algebras;
  std::string report;
};

int cmd_embed(const EmbedArgs& a, const Common& c) {
  if (a.algebras.empty()) throw ConfigError("embed needs at least one algebra");
  std::ostringstream csv;
  csv << "algebra,ratio,basis_lengths,p,q\n";
  Json records = Json::array();
  for (const auto& name : a.algebras) {
    const auto summary = mcb_embedding_profile(resolve_seed(name, c), c.limits());
    const std::string label = seed_label(name);
    csv << label << "," << summary.ratio.to_string() << ",\"" << format_histogram(summary.basis_lengths) << "\",\""
        << format_histogram(summary.p_histogram) << "\",\"" << format_histogram(summary.q_histogram) << "\"\n";
    std::cout << label << ": ratio " << summary.ratio.to_string() << ", basis "
              << format_histogram(summary.basis_lengths) << ", p " << format_histogram(summary.p_histogram)
              << ", q " << format_histogram(summary.q_histogram) << "\n";
    records.push_back(embedding_to_json(label, summary));
  }
  const fs::path report = c.resolve(a.report, "embedding.csv");
  write_text(report, csv.str());
  fs::path json = report;
  json.replace_extension(".json");
  write_text(json, records.dump(1) + "\n");
  return ok;
}

// ---------------------------------------------------------------------------

struct MlArgs {
  std::string experiment = "binary-pairs";
  std::uint64_t seed = 42;
  std::size_t repeats = 1;
  std::size_t folds = 5;
  std::size_t epochs = MlpConfig{}.epochs;
  std::vector<std::string> pair;
  std::vector<std::string> algebras;
  std::string matrix = "both";
  int depth = 4;
  int max_depth = 13;
  std::string checkpoints;
};

void save_checkpoint(const std::vector<Corpus>& corpora, const Investigation& inv, const ExperimentConfig& cfg,
                     const fs::path& dir) {
  const std::uint64_t run_seed = derive_seed(inv.seed, 0);
  Rng shuffle(derive_seed(run_seed, 0));
  const Dataset data = assemble_dataset(corpora, shuffle);
  Rng init(derive_seed(run_seed, 2));
  const Mlp model = train_mlp(data.X, data.y, data.classes(), cfg.mlp, init);
  std::string file = inv.label;
  for (char& ch : file) {
    if (ch == ' ') ch = '_';
  }
  fs::create_directories(dir);
  model.save(dir / (file + ".cmlp"));
}

int cmd_ml(const MlArgs& a, const Common& c) {
  if (a.repeats == 0 || a.folds < 2 || a.epochs == 0) throw ConfigError("repeats, folds and epochs must be positive");
  ExperimentConfig cfg;
  cfg.seed = a.seed;
  cfg.repeats = a.repeats;
  cfg.folds = a.folds;
  cfg.mlp.epochs = a.epochs;
  cfg.limits = c.limits();
  std::vector<bool> matrices;
  if (a.matrix == "both" || a.matrix == "with") matrices.push_back(true);
  if (a.matrix == "both" || a.matrix == "without") matrices.push_back(false);
  if (matrices.empty()) throw ConfigError("--matrix takes with, without or both");

  std::vector<Investigation> results;
  auto report = [&](const Investigation& inv) {
    std::cout << inv.label << ": accuracy " << format_fixed(inv.accuracy(), 3) << " +- "
              << format_fixed(inv.accuracy_se(), 3) << ", mcc " << format_fixed(inv.mcc(), 3) << " +- "
              << format_fixed(inv.mcc_se(), 3) << "\n";
    results.push_back(inv);
  };
  const fs::path out = c.resolve(c.out, "results");

  if (a.experiment == "binary-pairs") {
    auto pairs = binary_pairs();
    if (!a.pair.empty()) {
      if (a.pair.size() != 2) throw ConfigError("--pair takes two algebra names");
      pairs = {{a.pair[0], a.pair[1]}};
    }
    for (const auto& [x, y] : pairs) {
      for (bool m : matrices) {
        std::vector<Corpus> corpora{seed_corpus(x, a.depth, m, cfg.limits), seed_corpus(y, a.depth, m, cfg.limits)};
        const std::string label =
            x + " vs " + y + (m ? " with matrix" : " without matrix") + " depth " + std::to_string(a.depth);
        report(run_classification(corpora, label, a.depth, cfg));
        if (!a.checkpoints.empty()) save_checkpoint(corpora, results.back(), cfg, c.resolve(a.checkpoints, ""));
      }
    }
  } else if (a.experiment == "multiclass-finite") {
    std::vector<Corpus> corpora;
    for (const auto& name : finite_rank4()) corpora.push_back(seed_corpus(name, std::nullopt, true, cfg.limits));
    report(run_classification(corpora, "finite rank 4 multiclass", std::nullopt, cfg));
    if (!a.checkpoints.empty()) save_checkpoint(corpora, results.back(), cfg, c.resolve(a.checkpoints, ""));
  } else if (a.experiment == "fake-vs-true") {
    for (const auto& name : a.algebras.empty() ? fake_algebras() : a.algebras) report(run_fake_vs_true(name, cfg, a.depth));
  } else if (a.experiment == "depth-sweep") {
    std::ostringstream sizes;
    sizes << "depth,size_a,size_b,length,length_with_matrix\n";
    for (const auto& row : run_depth_sweep(cfg, a.max_depth, true)) {
      sizes << row.depth << "," << row.size_a << "," << row.size_b << "," << row.length << ","
            << row.length_with_matrix << "\n";
      report(*row.result);
    }
    write_text(out / "depth-sweep_sizes.csv", sizes.str());
  } else {
    throw ConfigError("unknown experiment '" + a.experiment + "'");
  }

  std::string csv = investigation_csv_header();
  Json json = {{"experiment", a.experiment}, {"seed", a.seed}, {"repeats", a.repeats}, {"investigations", Json::array()}};
  for (const auto& inv : results) {
    csv += investigation_csv_rows(inv);
    json["investigations"].push_back(investigation_to_json(inv));
  }
  write_text(out / (a.experiment + ".csv"), csv);
  write_text(out / (a.experiment + ".json"), json.dump(1) + "\n");
  std::cout << "wrote " << (out / (a.experiment + ".csv")).string() << "\n";
  return ok;
}

// ---------------------------------------------------------------------------

struct ReproduceArgs {
  std::vector<int> tables;
  bool metrics_band = false;
  bool rank5 = false;
  std::uint64_t seed = 42;
  std::size_t repeats = 1;
};

int cmd_reproduce(const ReproduceArgs& a, const Common& c) {
  ReproduceOptions o;
  o.seed = a.seed;
  o.repeats = a.repeats;
  o.metrics_band = a.metrics_band;
  o.include_rank5 = a.rank5;
  o.limits = c.limits();
  if (a.repeats == 0) throw ConfigError("repeats must be positive");
  const fs::path out = c.resolve(c.out, "reproduce");
  bool all = true;
  for (int t : a.tables) {
    const auto start = std::chrono::steady_clock::now();
    const auto rep = reproduce_table(t, o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text(out / ("table" + std::to_string(t) + ".csv"), rep.to_csv());
    const auto failed = rep.failures();
    std::cout << "table " << t << " (" << rep.title << "): " << rep.rows.size() - failed.size() << "/"
              << rep.rows.size() << " cells match, " << format_fixed(secs, 1) << " s\n";
    for (const auto& f : failed) {
      std::cout << "  MISMATCH " << f.item << " " << f.field << ": expected " << f.expected << ", computed "
                << f.computed << "\n";
    }
    all = all && failed.empty();
  }
  return all ? ok : mismatch;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
  std::vector<std::string> algebras;
  std::vector<std::string> inputs;
  int max_depth = 4;
  bool metrics = false;
  std::uint64_t seed = 42;
  std::size_t repeats = 1;
};

struct DepthPoint {
  std::size_t vertices = 0;
  std::size_t basis = 0;
};

// Level-by-level view of a breadth-first graph: the graph generated to depth d
// is the prefix of vertices at depth <= d and the edges found while expanding
// depth < d.
std::vector<DepthPoint> depth_series(const ExchangeGraph& g, int max_depth) {
  std::vector<DepthPoint> out;
  const int top = std::min(max_depth, g.max_depth());
  for (int d = 0; d <= top; ++d) {
    std::size_t n = 0;
    while (n < g.vertex_count() && g.depth(n) <= d) ++n;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& e : g.edges()) {
      if (e.a < n && e.b < n && std::min(g.depth(e.a), g.depth(e.b)) < d) edges.emplace_back(e.a, e.b);
    }
    const UndirectedGraph sub(n, edges);
    out.push_back({n, edges.size() + connected_components(sub) - n});
  }
  return out;
}

int cmd_export_plotdata(const PlotArgs& a, const Common& c) {
  if (a.algebras.empty() && a.inputs.empty() && !a.metrics) throw ConfigError("no graphs to export");
  const fs::path out = c.resolve(c.out, "plotdata");
  std::ostringstream counts;
  counts << "algebra,depth,seeds,quivers,quiver_seed_ratio,seed_basis,quiver_basis\n";
  for (const auto& name : a.algebras) {
    const Seed initial = resolve_seed(name, c);
    const auto s = depth_series(generate_seed_graph(initial, a.max_depth, Equivalence::exact, c.limits()), a.max_depth);
    const auto q =
        depth_series(generate_quiver_graph(initial, a.max_depth, Equivalence::exact, c.limits()), a.max_depth);
    for (std::size_t d = 0; d < s.size(); ++d) {
      const auto& qp = d < q.size() ? q[d] : q.back();
      counts << seed_label(name) << "," << d << "," << s[d].vertices << "," << qp.vertices << ","
             << format_fixed(static_cast<double>(qp.vertices) / static_cast<double>(s[d].vertices), 6) << ","
             << s[d].basis << "," << qp.basis << "\n";
    }
  }
  if (!a.algebras.empty()) write_text(out / "counts.csv", counts.str());

  if (!a.inputs.empty()) {
    std::ostringstream graphs;
    graphs << "graph,payload,depth,vertices,basis\n";
    for (const auto& path : a.inputs) {
      const auto g = graph_from_json(read_json(path));
      const auto series = depth_series(g, g.max_depth());
      for (std::size_t d = 0; d < series.size(); ++d) {
        graphs << fs::path(path).stem().string() << "," << to_string(g.payload()) << "," << d << ","
               << series[d].vertices << "," << series[d].basis << "\n";
      }
    }
    write_text(out / "graph_counts.csv", graphs.str());
  }

  if (a.metrics) {
    ExperimentConfig cfg;
    cfg.seed = a.seed;
    cfg.repeats = a.repeats;
    cfg.limits = c.limits();
    std::ostringstream m;
    m << "depth,size_a,size_b,accuracy,accuracy_se,mcc,mcc_se\n";
    for (const auto& row : run_depth_sweep(cfg, 13, true)) {
      const auto& r = *row.result;
      m << row.depth << "," << row.size_a << "," << row.size_b << "," << format_fixed(r.accuracy(), 6) << ","
        << format_fixed(r.accuracy_se(), 6) << "," << format_fixed(r.mcc(), 6) << "," << format_fixed(r.mcc_se(), 6)
        << "\n";
    }
    write_text(out / "depth_metrics.csv", m.str());
  }
  std::cout << "wrote " << out.string() << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster algebra exchange graphs, statistics and classifiers"};
  app.require_subcommand(1);
  Common common;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a seed or quiver exchange graph");
  g->add_option("--seed-name,--seed", gen.seed, "Catalogue name (A4, I1, ...) or seed JSON path")->required();
  g->add_option("--depth", gen.depth, "Mutation depth or 'full'");
  g->add_option("--mode", gen.mode, "exact or perm")->check(CLI::IsMember({"exact", "perm", "permutation"}));
  g->add_option("--payload", gen.payload, "seeds or quivers")->check(CLI::IsMember({"seeds", "quivers"}));
  g->add_option("--format", gen.format, "json, dot or csv")->check(CLI::IsMember({"json", "dot", "csv"}));
  g->add_option("--out", common.out, "Output file");
  add_caps(g, common);

  AnalyzeArgs an;
  auto* z = app.add_subcommand("analyze", "Network statistics of a graph file");
  z->add_option("--in", an.in, "Graph JSON written by generate")->required()->check(CLI::ExistingFile);
  z->add_option("--out", common.out, "Stats file (.csv or .json)");
  z->add_option("--format", an.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  EmbedArgs em;
  auto* e = app.add_subcommand("embed", "Embed quiver cycles into the seed exchange graph");
  e->add_option("--algebra,--seed-name", em.algebras, "Finite-type algebra name(s)")->required();
  e->add_option("--report,--out", em.report, "CSV report; a JSON file is written alongside");
  add_caps(e, common);

  MlArgs ml;
  auto* m = app.add_subcommand("ml", "Train and cross-validate classifiers");
  m->add_option("--experiment", ml.experiment)
      ->check(CLI::IsMember({"binary-pairs", "multiclass-finite", "depth-sweep", "fake-vs-true"}));
  m->add_option("--seed,--rng", ml.seed, "RNG seed for shuffling, initialisation, folds and sampling");
  m->add_option("--repeats", ml.repeats, "Independent cross-validation runs");
  m->add_option("--folds", ml.folds);
  m->add_option("--epochs", ml.epochs);
  m->add_option("--pair", ml.pair, "Restrict binary-pairs to one pair")->expected(2);
  m->add_option("--algebra", ml.algebras, "Restrict fake-vs-true to these algebras");
  m->add_option("--matrix", ml.matrix, "with, without or both (binary-pairs)");
  m->add_option("--depth", ml.depth, "Generation depth");
  m->add_option("--max-depth", ml.max_depth, "Deepest level of the depth sweep");
  m->add_option("--checkpoint", ml.checkpoints, "Directory for models trained on the full data");
  m->add_option("--out", common.out, "Output directory");
  add_caps(m, common);

  ReproduceArgs rp;
  auto* r = app.add_subcommand("reproduce", "Recompute a reference table and compare");
  r->add_option("tables", rp.tables, "Table numbers")->required()->check(CLI::Range(1, 10));
  r->add_flag("--metrics-band", rp.metrics_band, "Also train the classifiers and check metric bands");
  r->add_flag("--rank5", rp.rank5, "Include rank-5 ratios");
  r->add_option("--seed,--rng", rp.seed);
  r->add_option("--repeats", rp.repeats);
  r->add_option("--out", common.out, "Report directory");
  add_caps(r, common);

  PlotArgs pl;
  auto* p = app.add_subcommand("export-plotdata", "Per-depth count, basis and metric series");
  p->add_option("--algebra,--seed-name", pl.algebras, "Algebras to generate");
  p->add_option("--in", pl.inputs, "Graph JSON files")->check(CLI::ExistingFile);
  p->add_option("--max-depth", pl.max_depth);
  p->add_flag("--metrics", pl.metrics, "A4 vs D4 accuracy and MCC by depth (trains 13 models)");
  p->add_option("--seed,--rng", pl.seed);
  p->add_option("--repeats", pl.repeats);
  p->add_option("--out", common.out, "Output directory");
  add_caps(p, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? ok : bad_config;
  }

  try {
    if (*g) return cmd_generate(gen, common);
    if (*z) return cmd_analyze(an, common);
    if (*e) return cmd_embed(em, common);
    if (*m) return cmd_ml(ml, common);
    if (*r) return cmd_reproduce(rp, common);
    if (*p) return cmd_export_plotdata(pl, common);
  } catch (const ResourceLimitError& err) {
    std::cerr << "resource cap reached: " << err.what() << "\n";
    return capped;
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return bad_config;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return failure;
  }
  return failure;
}
