#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clusterml/analytics.hpp"
#include "clusterml/catalogue.hpp"
#include "clusterml/embedding.hpp"
#include "clusterml/errors.hpp"
#include "clusterml/io.hpp"
#include "clusterml/ml.hpp"
#include "clusterml/reproduce.hpp"

namespace py = pybind11;
using namespace clusterml;

namespace {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

py::dict histogram(const std::map<std::size_t, std::size_t>& h) {
  py::dict d;
  for (const auto& [k, v] : h) d[py::int_(k)] = v;
  return d;
}

py::dict stats_dict(const GraphStats& s) {
  py::dict d;
  d["vertices"] = s.vertices;
  d["edges"] = s.edges;
  d["density"] = s.density;
  d["triangle_clustering"] = s.clustering.triangle;
  d["square_clustering"] = s.clustering.square;
  d["wiener"] = s.wiener.full;
  d["wiener_normalized"] = s.wiener.normalized;
  d["centre"] = s.centre ? py::object(py::int_(*s.centre)) : py::object(py::none());
  d["centrality_diff"] = s.centrality_diff ? py::object(py::float_(*s.centrality_diff)) : py::object(py::none());
  d["mcb"] = histogram(s.mcb_histogram);
  return d;
}

Seed seed_of(const py::object& spec) {
  if (py::isinstance<Seed>(spec)) return spec.cast<Seed>();
  return builtin_seed(spec.cast<std::string>());
}

ExchangeGraph generate(const py::object& spec, std::optional<int> depth, const std::string& mode,
                       const std::string& payload, std::size_t max_vertices) {
  const Seed s = seed_of(spec);
  const auto eq = parse_equivalence(mode);
  const auto kind = parse_payload(payload);
  const std::string name = py::isinstance<py::str>(spec) ? spec.cast<std::string>() : "";
  GenerationLimits limits;
  limits.max_vertices = max_vertices;
  py::gil_scoped_release release;
  if (!depth) return generate_full(s, eq, kind, limits, name);
  return kind == Payload::seeds ? generate_seed_graph(s, *depth, eq, limits, name)
                                : generate_quiver_graph(s, *depth, eq, limits, name);
}

}  // namespace

PYBIND11_MODULE(_clusterml, m) {
  m.doc() = "Cluster algebra exchange graphs, statistics and encodings";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_RuntimeError);

  py::class_<Seed>(m, "Seed")
      .def(py::init([](const std::vector<std::vector<std::int64_t>>& rows) {
             return Seed::initial(ExchangeMatrix::from_rows(rows));
           }),
           py::arg("matrix"))
      .def_property_readonly("rank", &Seed::rank)
      .def_property_readonly("matrix", [](const Seed& s) { return s.matrix().rows(); })
      .def_property_readonly("cluster",
                             [](const Seed& s) {
                               std::vector<std::string> out;
                               for (const auto& x : s.cluster()) out.push_back(x.to_string());
                               return out;
                             })
      .def("mutate", [](const Seed& s, std::size_t k) { return mutate(s, k); }, py::arg("k"))
      .def("encode", [](const Seed& s, bool matrix) { return encode_seed(s, matrix).entries; },
           py::arg("include_matrix") = true)
      .def("to_json", [](const Seed& s) { return seed_to_json(s).dump(); })
      .def(py::self == py::self)
      .def("__repr__", [](const Seed& s) { return "<Seed rank " + std::to_string(s.rank()) + " " + s.matrix().to_string() + ">"; });

  m.def("seed_from_json", [](const std::string& text) { return seed_from_json(Json::parse(text)); });
  m.def("builtin_seed", [](const std::string& name) { return builtin_seed(name); });
  m.def("builtin_names", &builtin_names);

  py::class_<ExchangeGraph>(m, "ExchangeGraph")
      .def_property_readonly("vertex_count", &ExchangeGraph::vertex_count)
      .def_property_readonly("edge_count", &ExchangeGraph::edge_count)
      .def_property_readonly("rank", &ExchangeGraph::rank)
      .def_property_readonly("depths", &ExchangeGraph::depths)
      .def_property_readonly("closed", [](const ExchangeGraph& g) { return g.metadata().closed; })
      .def_property_readonly("edges",
                             [](const ExchangeGraph& g) {
                               std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
                               for (const auto& e : g.edges()) out.emplace_back(e.a, e.b, e.index);
                               return out;
                             })
      .def("seed", &ExchangeGraph::seed, py::arg("vertex"))
      .def("matrix", [](const ExchangeGraph& g, std::size_t v) { return g.matrix(v).rows(); }, py::arg("vertex"))
      .def("counts_by_depth", [](const ExchangeGraph& g) { return seeds_per_depth(g); })
      .def("stats", [](const ExchangeGraph& g) { return stats_dict(full_stats(g.topology())); })
      .def("to_json", [](const ExchangeGraph& g) { return graph_to_json(g).dump(); })
      .def("to_dot", &graph_to_dot);

  m.def("generate", &generate, py::arg("seed"), py::arg("depth") = py::none(), py::arg("mode") = "exact",
        py::arg("payload") = "seeds", py::arg("max_vertices") = GenerationLimits{}.max_vertices,
        "Exchange graph to `depth` mutations, or to closure when depth is None.");
  m.def("graph_from_json", [](const std::string& text) { return graph_from_json(Json::parse(text)); });

  m.def("graph_stats", [](std::size_t n, const EdgeList& e) { return stats_dict(full_stats(UndirectedGraph(n, e))); },
        py::arg("n"), py::arg("edges"));
  m.def("triangle_clustering", [](std::size_t n, const EdgeList& e) { return triangle_clustering(UndirectedGraph(n, e)); });
  m.def("square_clustering", [](std::size_t n, const EdgeList& e) { return square_clustering(UndirectedGraph(n, e)); });
  m.def("wiener_index", [](std::size_t n, const EdgeList& e) { return wiener_index(UndirectedGraph(n, e)).full; });
  m.def("eigenvector_centrality",
        [](std::size_t n, const EdgeList& e) { return eigenvector_centrality(UndirectedGraph(n, e)).values; });
  m.def("cycle_basis_lengths", [](std::size_t n, const EdgeList& e) {
    std::vector<std::size_t> out;
    for (const auto& c : minimum_cycle_basis(UndirectedGraph(n, e))) out.push_back(c.length());
    return out;
  });

  m.def("cluster_count", [](const std::string& name) {
    const auto t = parse_dynkin(name);
    if (!t) throw ConfigError("not a Dynkin type: " + name);
    return cluster_count_formula(*t);
  });
  m.def("embedding_profile", [](const std::string& name) {
    EmbeddingSummary s;
    {
      py::gil_scoped_release release;
      s = mcb_embedding_profile(builtin_seed(name));
    }
    py::dict d;
    d["ratio"] = s.ratio.to_string();
    d["basis"] = histogram(s.basis_lengths);
    d["p"] = histogram(s.p_histogram);
    d["q"] = histogram(s.q_histogram);
    return d;
  });

  m.def("accuracy", &accuracy);
  m.def("mcc", &mcc);

  m.def("reproduce", [](int table) {
    ReproduceReport rep;
    {
      py::gil_scoped_release release;
      rep = reproduce_table(table);
    }
    py::list rows;
    for (const auto& r : rep.rows) {
      py::dict d;
      d["item"] = r.item;
      d["field"] = r.field;
      d["expected"] = r.expected;
      d["computed"] = r.computed;
      d["pass"] = r.pass;
      rows.append(d);
    }
    return py::make_tuple(rep.passed(), rows);
  }, py::arg("table"), "Recompute a reference table; returns (passed, rows).");
}
