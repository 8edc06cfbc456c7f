#include "clusterml/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "clusterml/errors.hpp"

namespace clusterml {

namespace {

Json monomial_exponents(const Monomial& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.nvars(); ++i) out.push_back(m[i]);
  return out;
}

Monomial monomial_from(const Json& j, std::size_t begin, std::size_t rank) {
  if (!j.is_array() || j.size() != begin + rank) throw ConfigError("monomial has the wrong number of exponents");
  std::vector<unsigned> exps;
  for (std::size_t i = begin; i < j.size(); ++i) {
    const auto e = j[i].get<long long>();
    if (e < 0) throw ConfigError("negative exponent");
    exps.push_back(static_cast<unsigned>(e));
  }
  return Monomial(std::span<const unsigned>(exps));
}

Json matrix_to_json(const ExchangeMatrix& b) { return b.rows(); }

ExchangeMatrix matrix_from_json(const Json& j) {
  return ExchangeMatrix::from_rows(j.get<std::vector<std::vector<std::int64_t>>>());
}

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

std::string optional_depth(std::optional<int> depth) { return depth ? std::to_string(*depth) : "full"; }

}  // namespace

Json seed_to_json(const Seed& s) {
  Json cluster = Json::array();
  for (const auto& x : s.cluster()) {
    Json num = Json::array();
    for (const auto& t : x.numerator().terms()) {
      Json term = Json::array({t.coeff.str()});
      for (std::size_t i = 0; i < t.monomial.nvars(); ++i) term.push_back(t.monomial[i]);
      num.push_back(std::move(term));
    }
    cluster.push_back({{"num", std::move(num)}, {"den", monomial_exponents(x.denominator())}});
  }
  return {{"rank", s.rank()}, {"matrix", matrix_to_json(s.matrix())}, {"cluster", std::move(cluster)}};
}

Seed seed_from_json(const Json& j) {
  try {
    auto matrix = matrix_from_json(required<Json>(j, "matrix"));
    const auto rank = j.contains("rank") ? j.at("rank").get<std::size_t>() : matrix.rank();
    if (matrix.rank() != rank) throw ConfigError("matrix size differs from rank");
    if (!j.contains("cluster")) return Seed::initial(std::move(matrix));
    std::vector<LaurentValue> cluster;
    for (const auto& v : j.at("cluster")) {
      std::vector<Term> terms;
      for (const auto& t : v.at("num")) {
        if (!t.is_array() || t.empty()) throw ConfigError("malformed numerator term");
        const Json& c = t[0];
        Integer coeff = c.is_string() ? Integer(c.get<std::string>()) : Integer(c.get<long long>());
        terms.push_back({monomial_from(t, 1, rank), coeff});
      }
      cluster.push_back(LaurentValue::normalize(Polynomial::from_terms(rank, std::move(terms)),
                                                monomial_from(v.at("den"), 0, rank)));
    }
    return Seed(std::move(cluster), std::move(matrix));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed seed JSON: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("malformed seed JSON: ") + e.what());
  }
}

Json graph_to_json(const ExchangeGraph& g) {
  const auto& m = g.metadata();
  Json meta = {{"name", m.name},
               {"payload", to_string(m.payload)},
               {"mode", to_string(m.mode)},
               {"depth_limit", m.depth_limit ? Json(*m.depth_limit) : Json(nullptr)},
               {"closed", m.closed},
               {"partial", m.partial},
               {"completed_depth", m.completed_depth}};
  Json vertices = Json::array();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    Json entry = {{"id", v}, {"depth", g.depth(v)}};
    if (g.payload() == Payload::seeds) {
      entry["seed"] = seed_to_json(g.seed(v));
    } else {
      entry["matrix"] = matrix_to_json(g.matrix(v));
    }
    vertices.push_back(std::move(entry));
  }
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.a, e.b, e.index});
  return {{"metadata", std::move(meta)},
          {"rank", g.rank()},
          {"vertex_count", g.vertex_count()},
          {"edge_count", g.edge_count()},
          {"partial", m.partial},
          {"vertices", std::move(vertices)},
          {"edges", std::move(edges)}};
}

ExchangeGraph graph_from_json(const Json& j) {
  try {
    const Json& jm = j.at("metadata");
    ExchangeGraph::Metadata meta;
    meta.name = jm.value("name", "");
    meta.payload = parse_payload(jm.value("payload", "seeds"));
    meta.mode = parse_equivalence(jm.value("mode", "exact"));
    if (jm.contains("depth_limit") && !jm.at("depth_limit").is_null()) meta.depth_limit = jm.at("depth_limit").get<int>();
    meta.closed = jm.value("closed", false);
    meta.partial = jm.value("partial", false);
    meta.completed_depth = jm.value("completed_depth", 0);

    std::vector<Seed> seeds;
    std::vector<ExchangeMatrix> matrices;
    std::vector<int> depths;
    for (const auto& v : j.at("vertices")) {
      depths.push_back(v.at("depth").get<int>());
      if (meta.payload == Payload::seeds) {
        seeds.push_back(seed_from_json(v.at("seed")));
      } else {
        matrices.push_back(matrix_from_json(v.at("matrix")));
      }
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<std::size_t>()});
    }
    return ExchangeGraph::assemble(std::move(meta), required<std::size_t>(j, "rank"), std::move(seeds),
                                   std::move(matrices), std::move(depths), std::move(edges));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed graph JSON: ") + e.what());
  }
}

std::string graph_to_dot(const ExchangeGraph& g) {
  std::ostringstream out;
  out << "graph \"" << (g.metadata().name.empty() ? "exchange" : g.metadata().name) << "\" {\n";
  for (std::size_t v = 0; v < g.vertex_count(); ++v) out << "  " << v << " [label=\"" << v << "\"];\n";
  for (const auto& e : g.edges()) out << "  " << e.a << " -- " << e.b << " [label=\"" << e.index << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string graph_to_csv(const ExchangeGraph& g) {
  std::ostringstream out;
  out << "vertex,depth,neighbours\n";
  const auto& t = g.topology();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    out << v << "," << g.depth(v) << ",";
    const auto& nb = t.neighbours(v);
    for (std::size_t i = 0; i < nb.size(); ++i) out << (i ? " " : "") << nb[i];
    out << "\n";
  }
  return out.str();
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

Json stats_to_json(const StatsKey& key, const GraphStats& s) {
  Json hist = Json::array();
  for (const auto& [len, count] : s.mcb_histogram) hist.push_back({len, count});
  return {{"algebra", key.algebra},
          {"payload", to_string(key.payload)},
          {"depth", optional_depth(key.depth)},
          {"mode", to_string(key.mode)},
          {"vertices", s.vertices},
          {"edges", s.edges},
          {"density", s.density},
          {"triangle_clustering", s.clustering.triangle},
          {"square_clustering", s.clustering.square},
          {"wiener", s.wiener.full},
          {"wiener_normalized", s.wiener.normalized},
          {"centre", s.centre ? Json(*s.centre) : Json(nullptr)},
          {"centrality_diff", s.centrality_diff ? Json(*s.centrality_diff) : Json(nullptr)},
          {"mcb", std::move(hist)}};
}

std::string stats_csv_header() {
  return "algebra,payload,depth,mode,vertices,edges,density,triangle_clustering,square_clustering,wiener,"
         "wiener_normalized,centre,centrality_diff,mcb\n";
}

std::string stats_csv_row(const StatsKey& key, const GraphStats& s) {
  std::ostringstream out;
  out << key.algebra << "," << to_string(key.payload) << "," << optional_depth(key.depth) << "," << to_string(key.mode)
      << "," << s.vertices << "," << s.edges << "," << format_fixed(s.density, 6) << ","
      << format_fixed(s.clustering.triangle, 6) << "," << format_fixed(s.clustering.square, 6) << "," << s.wiener.full
      << "," << format_fixed(s.wiener.normalized, 6) << "," << (s.centre ? std::to_string(*s.centre) : "none") << ","
      << (s.centrality_diff ? format_fixed(*s.centrality_diff, 6) : "") << ",\"" << format_histogram(s.mcb_histogram)
      << "\"\n";
  return out.str();
}

Json embedding_to_json(const std::string& algebra, const EmbeddingSummary& summary) {
  auto hist = [](const std::map<std::size_t, std::size_t>& h) {
    Json out = Json::array();
    for (const auto& [k, v] : h) out.push_back({k, v});
    return out;
  };
  Json profiles = Json::array();
  for (const auto& p : summary.profiles) {
    profiles.push_back({{"s", p.s}, {"t", p.t}, {"p", p.p}, {"q", p.q}, {"seed_vertices", p.seed_vertices}});
  }
  return {{"algebra", algebra},
          {"ratio", summary.ratio.to_string()},
          {"basis_lengths", hist(summary.basis_lengths)},
          {"p", hist(summary.p_histogram)},
          {"q", hist(summary.q_histogram)},
          {"profiles", std::move(profiles)}};
}

Json investigation_to_json(const Investigation& inv) {
  Json runs = Json::array();
  for (const auto& r : inv.runs) {
    Json folds = Json::array();
    for (const auto& f : r.folds) {
      folds.push_back({{"accuracy", f.accuracy}, {"mcc", f.mcc}, {"epochs", f.epochs}, {"confusion", f.confusion}});
    }
    runs.push_back({{"accuracy", r.accuracy_mean},
                    {"accuracy_se", r.accuracy_se},
                    {"mcc", r.mcc_mean},
                    {"mcc_se", r.mcc_se},
                    {"confusion", r.confusion},
                    {"folds", std::move(folds)}});
  }
  return {{"label", inv.label},
          {"classes", inv.classes},
          {"class_sizes", inv.class_sizes},
          {"include_matrix", inv.include_matrix},
          {"depth", optional_depth(inv.depth)},
          {"length", inv.length},
          {"sparsity", inv.sparsity},
          {"seed", inv.seed},
          {"accuracy", inv.accuracy()},
          {"accuracy_se", inv.accuracy_se()},
          {"mcc", inv.mcc()},
          {"mcc_se", inv.mcc_se()},
          {"confusion", inv.confusion()},
          {"runs", std::move(runs)}};
}

std::string investigation_csv_header() { return "investigation,run,fold,accuracy,mcc,accuracy_se,mcc_se,seed\n"; }

std::string investigation_csv_rows(const Investigation& inv) {
  std::ostringstream out;
  for (std::size_t r = 0; r < inv.runs.size(); ++r) {
    const auto& run = inv.runs[r];
    for (std::size_t f = 0; f < run.folds.size(); ++f) {
      out << "\"" << inv.label << "\"," << r << "," << f << "," << format_fixed(run.folds[f].accuracy, 6) << ","
          << format_fixed(run.folds[f].mcc, 6) << ",,," << inv.seed << "\n";
    }
    out << "\"" << inv.label << "\"," << r << ",mean," << format_fixed(run.accuracy_mean, 6) << ","
        << format_fixed(run.mcc_mean, 6) << "," << format_fixed(run.accuracy_se, 6) << ","
        << format_fixed(run.mcc_se, 6) << "," << inv.seed << "\n";
  }
  return out.str();
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::map<std::string, Seed> load_seed_catalogue(const std::filesystem::path& path) {
  const Json j = read_json(path);
  std::map<std::string, Seed> out;
  if (j.contains("matrix")) {
    out.emplace(path.stem().string(), seed_from_json(j));
    return out;
  }
  if (!j.is_object()) throw ConfigError("seed catalogue must be an object of named seeds");
  for (const auto& [name, value] : j.items()) out.emplace(name, seed_from_json(value));
  return out;
}

}  // namespace clusterml
