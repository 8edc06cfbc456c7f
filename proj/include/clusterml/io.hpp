#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "clusterml/analytics.hpp"
#include "clusterml/embedding.hpp"
#include "clusterml/exchange_graph.hpp"
#include "clusterml/experiments.hpp"

namespace clusterml {

using Json = nlohmann::json;

// {"rank": r, "matrix": [[...]], "cluster": [{"num": [["coeff", e1..er]], "den": [e1..er]}]}
// with coefficients as decimal strings. "rank" and "cluster" may be omitted on
// input; the cluster then defaults to the initial variables.
Json seed_to_json(const Seed& s);
Seed seed_from_json(const Json& j);

// Metadata, per-vertex depth and payload (seed or matrix), and edges
// [a, b, index].
Json graph_to_json(const ExchangeGraph& g);
ExchangeGraph graph_from_json(const Json& j);

// Vertex label = discovery index, edge label = mutation index.
std::string graph_to_dot(const ExchangeGraph& g);
// "vertex,depth,neighbours" with neighbours separated by spaces.
std::string graph_to_csv(const ExchangeGraph& g);

struct StatsKey {
  std::string algebra;
  Payload payload = Payload::seeds;
  std::optional<int> depth;  // nullopt: full
  Equivalence mode = Equivalence::exact;
};

Json stats_to_json(const StatsKey& key, const GraphStats& stats);
std::string stats_csv_header();
std::string stats_csv_row(const StatsKey& key, const GraphStats& stats);

Json embedding_to_json(const std::string& algebra, const EmbeddingSummary& summary);

Json investigation_to_json(const Investigation& inv);
std::string investigation_csv_header();
// One row per fold and run, then a summary row with fold "mean".
std::string investigation_csv_rows(const Investigation& inv);

// A file holding either one seed or an object mapping names to seeds.
std::map<std::string, Seed> load_seed_catalogue(const std::filesystem::path& path);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Fixed-precision decimal, e.g. format_fixed(0.0344, 3) == "0.034".
std::string format_fixed(double value, int digits);

}  // namespace clusterml
