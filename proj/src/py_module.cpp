// Python bindings for the walk toolkit. Matrices and vectors cross the
// boundary as numpy arrays; structured reports cross as plain dicts built
// from the same JSON serialization the CLI emits.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include <json.hpp>

#include "qwalk/classical.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/mixing.hpp"
#include "qwalk/qwalk.hpp"
#include "qwalk/serialize.hpp"
#include "qwalk/spectral.hpp"

namespace py = pybind11;
using namespace qwalk;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) {
        out[py::str(key)] = json_to_py(value);
      }
      return out;
    }
    default:
      return py::none();
  }
}

CoinOperator coin_from_py(const py::object& coin, int d) {
  if (py::isinstance<py::str>(coin)) {
    std::string name = coin.cast<std::string>();
    if (name == "hadamard") return hadamard_coin();
    if (name == "dft") return dft_coin(d);
    throw std::invalid_argument("unknown coin name: " + name +
                                " (use 'hadamard', 'dft', or a matrix)");
  }
  return CoinOperator{coin.cast<CMat>()};
}

std::mt19937_64* maybe_rng(std::optional<std::uint64_t> seed,
                           std::optional<std::mt19937_64>& storage) {
  if (!seed) return nullptr;
  storage.emplace(*seed);
  return &*storage;
}

long default_horizon(const WalkOperator& W, long t_max) {
  return t_max > 0 ? t_max : quantum_default_t_max(W.n());
}

const Distribution* opt_ptr(const std::optional<Distribution>& pi) {
  return pi ? &*pi : nullptr;
}

}  // namespace

PYBIND11_MODULE(qwalk_py, m) {
  m.doc() = "Discrete-time quantum walks on graphs: spectra, limiting "
            "distributions, mixing measures, amplification, and bounds";

  py::class_<LabeledGraph>(m, "Graph")
      .def_readonly("n", &LabeledGraph::n)
      .def_readonly("d", &LabeledGraph::d)
      .def_readonly("vertex_transitive", &LabeledGraph::vertex_transitive)
      .def("degree", &LabeledGraph::degree)
      .def("edge_count", &LabeledGraph::edge_count)
      .def("connected", &LabeledGraph::connected)
      .def(
          "neighbor",
          [](const LabeledGraph& g, int a, int v) { return g.sigma.at(a).at(v); },
          py::arg("a"), py::arg("v"))
      .def("adjacent", &LabeledGraph::adjacent, py::arg("u"), py::arg("v"))
      .def("__repr__", [](const LabeledGraph& g) {
        std::ostringstream s;
        s << "Graph(n=" << g.n << ", d=" << g.d << ")";
        return s.str();
      });

  py::class_<WalkOperator>(m, "Walk")
      .def_property_readonly("n", &WalkOperator::n)
      .def_property_readonly("d", &WalkOperator::d)
      .def_property_readonly("dim", &WalkOperator::dim)
      .def_property_readonly("kind",
                             [](const WalkOperator& W) {
                               switch (W.kind) {
                                 case WalkOperator::Kind::Coined:
                                   return "coined";
                                 case WalkOperator::Kind::GeneralUnitary:
                                   return "general";
                                 default:
                                   return "mixture";
                               }
                             })
      .def("matrix", &WalkOperator::matrix);

  py::class_<WalkState>(m, "State")
      .def(py::init([](const CVec& amp, int n, int d) {
             if (amp.size() != static_cast<Eigen::Index>(n) * d) {
               throw std::invalid_argument("State: amplitude size != n*d");
             }
             return WalkState{amp, n, d};
           }),
           py::arg("amp"), py::arg("n"), py::arg("d"))
      .def_readonly("n", &WalkState::n)
      .def_readonly("d", &WalkState::d)
      .def_property_readonly("amp",
                             [](const WalkState& s) { return s.amp; })
      .def_property_readonly("dim", &WalkState::dim)
      .def("norm", &WalkState::norm)
      .def("__repr__", [](const WalkState& s) {
        std::ostringstream os;
        os << "State(n=" << s.n << ", d=" << s.d << ")";
        return os.str();
      });

  // Graph constructors and the text format.
  m.def("cycle", &cycle, py::arg("n"));
  m.def("cayley_abelian", &cayley_abelian, py::arg("orders"),
        py::arg("generators"));
  m.def(
      "complete_graph",
      [](int n) {
        if (n < 2) throw std::invalid_argument("complete_graph needs n >= 2");
        std::vector<std::vector<int>> gens;
        for (int k = 1; k < n; ++k) gens.push_back({k});
        return cayley_abelian({n}, gens);
      },
      py::arg("n"));
  m.def(
      "hypercube",
      [](int dim) {
        if (dim < 1) throw std::invalid_argument("hypercube needs dim >= 1");
        std::vector<int> orders(static_cast<std::size_t>(dim), 2);
        std::vector<std::vector<int>> gens;
        for (int k = 0; k < dim; ++k) {
          std::vector<int> g(static_cast<std::size_t>(dim), 0);
          g[static_cast<std::size_t>(k)] = 1;
          gens.push_back(g);
        }
        return cayley_abelian(orders, gens);
      },
      py::arg("dim"));
  m.def("pad_regular", &pad_regular, py::arg("adjacency"));
  m.def(
      "bridged_cliques",
      [](int msize) { return pad_regular(bridged_cliques_adjacency(msize)); },
      py::arg("m"));
  m.def(
      "read_graph",
      [](const std::string& text) {
        std::istringstream in(text);
        return read_graph(in);
      },
      py::arg("text"));
  m.def("read_graph_file", &read_graph_file, py::arg("path"));
  m.def("graph_to_string", &graph_to_string, py::arg("graph"));

  // Walk constructors.
  m.def(
      "coined_walk",
      [](const LabeledGraph& g, const py::object& coin) {
        return coined_walk(g, coin_from_py(coin, g.d));
      },
      py::arg("graph"), py::arg("coin") = py::str("dft"));
  m.def("general_walk", &general_walk, py::arg("graph"), py::arg("matrix"));
  m.def("random_mixture", &random_mixture, py::arg("parts"), py::arg("probs"));
  m.def("hadamard_coin", [] { return hadamard_coin().C; });
  m.def("dft_coin", [](int d) { return dft_coin(d).C; }, py::arg("d"));

  // Evolution.
  m.def("basis_state", &basis_state, py::arg("n"), py::arg("d"), py::arg("a"),
        py::arg("v"));
  m.def(
      "step",
      [](const WalkOperator& W, const WalkState& s,
         std::optional<std::uint64_t> seed) {
        std::optional<std::mt19937_64> storage;
        return step(W, s, maybe_rng(seed, storage));
      },
      py::arg("walk"), py::arg("state"), py::arg("seed") = std::nullopt);
  m.def("node_distribution", &node_distribution, py::arg("state"));
  m.def(
      "average_distribution",
      [](const WalkOperator& W, const WalkState& alpha0, long T,
         std::optional<std::uint64_t> seed) {
        std::optional<std::mt19937_64> storage;
        return average_distribution(W, alpha0, T, maybe_rng(seed, storage));
      },
      py::arg("walk"), py::arg("start"), py::arg("T"),
      py::arg("seed") = std::nullopt);
  m.def("tv_distance", &tv_distance, py::arg("d1"), py::arg("d2"));
  m.def("locality_check", &locality_check, py::arg("walk"));

  // Spectral analysis.
  m.def(
      "eigenvalues",
      [](const WalkOperator& W) { return decompose(W).eigvals; },
      py::arg("walk"));
  m.def(
      "limiting_distribution",
      [](const WalkOperator& W, const WalkState& alpha0) {
        return limiting_distribution(decompose(W), alpha0);
      },
      py::arg("walk"), py::arg("start"));
  m.def(
      "spacing_report",
      [](const WalkOperator& W, double delta, int a, int v) {
        SpectralDecomposition dec = decompose(W);
        return json_to_py(
            to_json(spacing_report(dec, delta, basis_state(W.n(), W.d(), a, v))));
      },
      py::arg("walk"), py::arg("delta") = 0.0, py::arg("a") = 0,
      py::arg("v") = 0);
  m.def(
      "spectrum_csv",
      [](const WalkOperator& W) { return spectrum_to_csv(decompose(W)); },
      py::arg("walk"));
  m.def("cycle_mixing_bound", &cycle_mixing_bound, py::arg("n"), py::arg("eps"));

  // Mixing measures.
  m.def("quantum_default_t_max", &quantum_default_t_max, py::arg("n"));
  m.def(
      "measure_mixing",
      [](const WalkOperator& W, double eps, long t_max,
         std::optional<Distribution> pi) {
        MixingReport rep = measure_mixing(
            W, eps, default_horizon(W, t_max), default_subset_family(W.g),
            default_initial_family(W.g), opt_ptr(pi));
        return json_to_py(to_json(rep));
      },
      py::arg("walk"), py::arg("eps") = 0.1, py::arg("t_max") = 0,
      py::arg("pi") = std::nullopt);
  m.def(
      "mixing_time",
      [](const WalkOperator& W, double eps, long t_max,
         std::optional<Distribution> pi) {
        return json_to_py(to_json(
            estimate_mixing_time(W, eps, default_horizon(W, t_max),
                                 default_initial_family(W.g), opt_ptr(pi))));
      },
      py::arg("walk"), py::arg("eps") = 0.1, py::arg("t_max") = 0,
      py::arg("pi") = std::nullopt);
  m.def(
      "mixing_curve_csv",
      [](const WalkOperator& W, const WalkState& start, const Distribution& pi,
         long T) { return mixing_curve_csv(W, start, pi, T); },
      py::arg("walk"), py::arg("start"), py::arg("pi"), py::arg("T"));

  // Amplification.
  m.def(
      "amplify",
      [](const WalkOperator& W, long stage_length, int k, std::uint64_t seed,
         long mc_trials) {
        return json_to_py(to_json(amplify(W, stage_length, k, seed, mc_trials)));
      },
      py::arg("walk"), py::arg("stage_length"), py::arg("k") = 3,
      py::arg("seed") = kDefaultSeed, py::arg("mc_trials") = 0);
  m.def(
      "amplified_sampling_bound",
      [](const WalkOperator& W, double eps, long stage_length,
         std::uint64_t seed) {
        return json_to_py(to_json(amplified_sampling_bound(W, eps, stage_length, seed)));
      },
      py::arg("walk"), py::arg("eps"), py::arg("stage_length"),
      py::arg("seed") = kDefaultSeed);

  // Lower bounds on the measures from cut geometry.
  m.def(
      "lower_bound_filling_check",
      [](const WalkOperator& W, const std::vector<int>& X, double eps,
         long measured_tau) {
        MeasuredTime tau;
        tau.value = measured_tau;
        tau.t_max = measured_tau;
        return json_to_py(to_json(
            lower_bound_filling_check(W, make_cut(W.g, X), eps, tau)));
      },
      py::arg("walk"), py::arg("X"), py::arg("eps"), py::arg("measured_tau"));
  m.def(
      "projection_inequality_check",
      [](const WalkOperator& W, const std::vector<int>& X, const WalkState& s) {
        return json_to_py(to_json(projection_inequality_check(W, make_cut(W.g, X), s)));
      },
      py::arg("walk"), py::arg("X"), py::arg("state"));

  // Classical baseline.
  m.def(
      "transition_matrix",
      [](const LabeledGraph& g) { return transition_matrix(g).P; },
      py::arg("graph"));
  m.def("stationary", &stationary, py::arg("graph"));
  m.def(
      "evolve",
      [](const RMat& P, const Distribution& d0, long t) {
        return evolve(StochasticMatrix{P}, d0, t);
      },
      py::arg("P"), py::arg("d0"), py::arg("t"));
  m.def("classical_default_t_max", &classical_default_t_max, py::arg("n"));
  m.def(
      "classical_mixing_time",
      [](const LabeledGraph& g, double eps, long t_max) {
        if (t_max <= 0) t_max = classical_default_t_max(g.n);
        return json_to_py(to_json(
            classical_mixing_time(transition_matrix(g), stationary(g), eps, t_max)));
      },
      py::arg("graph"), py::arg("eps") = 0.1, py::arg("t_max") = 0);
  m.def(
      "spectral_gap",
      [](const LabeledGraph& g) {
        return json_to_py(to_json(spectral_gap(transition_matrix(g))));
      },
      py::arg("graph"));
  m.def(
      "conductance",
      [](const LabeledGraph& g) {
        return json_to_py(to_json(conductance(g, default_cut_family(g))));
      },
      py::arg("graph"));
  m.def(
      "check_spect_bounds",
      [](const LabeledGraph& g, double eps, long t_max) {
        if (t_max <= 0) t_max = classical_default_t_max(g.n);
        return json_to_py(to_json(check_spect_bounds(g, eps, t_max)));
      },
      py::arg("graph"), py::arg("eps") = 0.1, py::arg("t_max") = 0);
  m.def(
      "check_cond_bounds",
      [](const LabeledGraph& g) { return json_to_py(to_json(check_cond_bounds(g))); },
      py::arg("graph"));

  m.attr("DEFAULT_SEED") = py::int_(kDefaultSeed);
}
