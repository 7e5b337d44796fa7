// Command-line runner: graph construction, walk configuration, sweep
// orchestration, bound verification, and report/plot-data emission.
//
// Exit codes: 0 success (horizon-limited measurements are findings, not
// failures); 1 a proven inequality was violated; 2 configuration or input
// errors (unparseable specs, malformed files, caps exceeded).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwalk/classical.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/mixing.hpp"
#include "qwalk/qwalk.hpp"
#include "qwalk/serialize.hpp"
#include "qwalk/spectral.hpp"

namespace {

using nlohmann::json;
using namespace qwalk;

struct Options {
  std::string graph;
  std::string coin = "hadamard";
  std::string walk = "coined";
  std::string mixture_coins;
  std::string mixture_probs;
  std::string matrix_file;
  std::string start = "0,0";
  std::string out = ".";
  double eps = 0.1;
  long t_max = 0;  // 0 = default horizon for the graph size
  std::uint64_t seed = kDefaultSeed;
  bool pi_uniform = false;
  // subcommand-specific
  double delta = 0.0;
  int states = 100;
  int stages = 3;
  long stage_length = 0;  // 0 = measured mixing time
  long mc_trials = 0;
  long curve_points = 5000;
  long max_guarantee_steps = 1000000;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--graph", opt.graph,
                  "Graph spec: cycle:N | complete:N | hypercube:D | bridged:M "
                  "| path to a graph file")
      ->required();
  cmd->add_option("--coin", opt.coin,
                  "Coin spec: hadamard | dft | phased | path to a matrix file");
  cmd->add_option("--walk", opt.walk, "Walk kind: coined | general | mixture");
  cmd->add_option("--mixture-coins", opt.mixture_coins,
                  "Comma-separated coin specs for --walk mixture");
  cmd->add_option("--mixture-probs", opt.mixture_probs,
                  "Comma-separated probabilities for --walk mixture");
  cmd->add_option("--matrix-file", opt.matrix_file,
                  "Unitary matrix file for --walk general");
  cmd->add_option("--start", opt.start, "Initial basis state as a,v");
  cmd->add_option("--out", opt.out, "Output directory");
  cmd->add_option("--eps", opt.eps, "Tolerance for the measures");
  cmd->add_option("--tmax", opt.t_max, "Sweep horizon (0 = 200 n ln n)");
  cmd->add_option("--seed", opt.seed, "Seed for every randomized path");
  cmd->add_flag("--pi-uniform", opt.pi_uniform,
                "Use the uniform distribution as the reference limit "
                "(required for mixture walks)");
}

// ---- config file merge -------------------------------------------------------

/// Loads --config JSON and appends "--key value" for every key not already
/// given on the command line, so explicit flags win.
std::vector<std::string> merge_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") config_path = args[i + 1];
  }
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("config file not readable: " + config_path);
  json cfg = json::parse(in);
  if (!cfg.is_object()) {
    throw std::invalid_argument("config file must hold a JSON object");
  }
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else {
      args.push_back(flag);
      args.push_back(value.dump());
    }
  }
  return args;
}

// ---- builders ------------------------------------------------------------------

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  auto pos = spec.find(':');
  if (pos == std::string::npos) return {spec, ""};
  return {spec.substr(0, pos), spec.substr(pos + 1)};
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(what);
    return value;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + ": '" + text + "'");
  }
}

LabeledGraph build_graph(const std::string& spec) {
  auto [name, arg] = split_spec(spec);
  if (name == "cycle") return cycle(parse_int(arg, "cycle size"));
  if (name == "complete") {
    int n = parse_int(arg, "complete-graph size");
    if (n < 2) throw std::invalid_argument("complete:N needs N >= 2");
    std::vector<std::vector<int>> gens;
    for (int k = 1; k < n; ++k) gens.push_back({k});
    return cayley_abelian({n}, gens);
  }
  if (name == "hypercube") {
    int dim = parse_int(arg, "hypercube dimension");
    if (dim < 1) throw std::invalid_argument("hypercube:D needs D >= 1");
    std::vector<int> orders(static_cast<std::size_t>(dim), 2);
    std::vector<std::vector<int>> gens;
    for (int k = 0; k < dim; ++k) {
      std::vector<int> g(static_cast<std::size_t>(dim), 0);
      g[static_cast<std::size_t>(k)] = 1;
      gens.push_back(g);
    }
    return cayley_abelian(orders, gens);
  }
  if (name == "bridged") {
    int m = parse_int(arg, "clique size");
    return pad_regular(bridged_cliques_adjacency(m));
  }
  return read_graph_file(spec);
}

CMat read_complex_matrix_file(const std::string& path, int expected_dim,
                              const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument(std::string(what) + " file not readable: " + path);
  }
  int m = 0;
  if (!(in >> m) || m < 1) {
    throw std::invalid_argument(std::string(what) +
                                " file: first token must be the dimension");
  }
  if (expected_dim > 0 && m != expected_dim) {
    throw std::invalid_argument(std::string(what) + " file: dimension " +
                                std::to_string(m) + " does not match required " +
                                std::to_string(expected_dim));
  }
  CMat M(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      double re = 0, im = 0;
      if (!(in >> re >> im)) {
        throw std::invalid_argument(
            std::string(what) + " file: expected " + std::to_string(2 * m * m) +
            " re/im values after the dimension");
      }
      M(r, c) = cxd(re, im);
    }
  }
  return M;
}

CoinOperator build_coin(const std::string& spec, int d) {
  if (spec == "hadamard") {
    if (d != 2) {
      throw std::invalid_argument(
          "hadamard coin needs degree 2 (graph has degree " + std::to_string(d) +
          "); use dft");
    }
    return hadamard_coin();
  }
  if (spec == "dft") return dft_coin(d);
  if (spec == "phased") {
    if (d != 2) throw std::invalid_argument("phased coin needs degree 2");
    CoinOperator h = hadamard_coin();
    CMat phase = CMat::Zero(2, 2);
    phase(0, 0) = 1.0;
    phase(1, 1) = cxd(0.0, 1.0);
    return CoinOperator{phase * h.C};
  }
  return CoinOperator{read_complex_matrix_file(spec, d, "coin matrix")};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) parts.push_back(item);
  return parts;
}

WalkOperator build_walk(const Options& opt, const LabeledGraph& g) {
  if (opt.walk == "coined") return coined_walk(g, build_coin(opt.coin, g.d));
  if (opt.walk == "general") {
    if (opt.matrix_file.empty()) {
      throw std::invalid_argument("--walk general needs --matrix-file");
    }
    return general_walk(
        g, read_complex_matrix_file(opt.matrix_file, g.n * g.d, "walk matrix"));
  }
  if (opt.walk == "mixture") {
    std::vector<std::string> coins = split_list(opt.mixture_coins);
    std::vector<std::string> probs = split_list(opt.mixture_probs);
    if (coins.empty() || coins.size() != probs.size()) {
      throw std::invalid_argument(
          "--walk mixture needs matching --mixture-coins and --mixture-probs");
    }
    std::vector<WalkOperator> parts;
    std::vector<double> p;
    for (std::size_t i = 0; i < coins.size(); ++i) {
      parts.push_back(coined_walk(g, build_coin(coins[i], g.d)));
      try {
        p.push_back(std::stod(probs[i]));
      } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse mixture probability: '" +
                                    probs[i] + "'");
      }
    }
    return random_mixture(std::move(parts), std::move(p));
  }
  throw std::invalid_argument("unknown walk kind: " + opt.walk);
}

std::pair<int, int> parse_start(const std::string& text, int n, int d) {
  auto parts = split_list(text);
  if (parts.size() != 2) {
    throw std::invalid_argument("--start must be 'a,v' (got '" + text + "')");
  }
  int a = parse_int(parts[0], "start label");
  int v = parse_int(parts[1], "start vertex");
  if (a < 0 || a >= d || v < 0 || v >= n) {
    throw std::invalid_argument("--start out of range for this graph");
  }
  return {a, v};
}

long horizon(const Options& opt, int n) {
  return opt.t_max > 0 ? opt.t_max : quantum_default_t_max(n);
}

std::optional<Distribution> pi_override(const Options& opt, int n) {
  if (!opt.pi_uniform) return std::nullopt;
  return Distribution::Constant(n, 1.0 / n);
}

void write_json(const std::string& dir, const std::string& name, const json& j) {
  atomic_write_file(dir + "/" + name, j.dump(2) + "\n");
}

void write_text(const std::string& dir, const std::string& name,
                const std::string& text) {
  atomic_write_file(dir + "/" + name, text);
}

bool is_odd_cycle_hadamard(const Options& opt, const LabeledGraph& g) {
  auto [name, arg] = split_spec(opt.graph);
  return name == "cycle" && g.n % 2 == 1 && opt.walk == "coined" &&
         opt.coin == "hadamard";
}

json finding(const std::string& check, bool holds) {
  json f;
  f["check"] = check;
  f["holds"] = holds;
  return f;
}

// ---- subcommands ---------------------------------------------------------------

int cmd_graph_info(const Options& opt) {
  LabeledGraph g = build_graph(opt.graph);
  json info;
  info["n"] = g.n;
  info["d"] = g.d;
  info["edges"] = g.edge_count();
  info["connected"] = g.connected();
  info["vertex_transitive"] = g.vertex_transitive;
  std::vector<int> degrees;
  for (int v = 0; v < g.n; ++v) degrees.push_back(g.degree(v));
  info["degrees"] = degrees;
  info["stationary"] = to_json(stationary(g));
  info["spectral"] = to_json(spectral_gap(transition_matrix(g)));
  CutFamily cuts = default_cut_family(g);
  info["cut_family"] = cuts.description;
  info["conductance"] = to_json(conductance(g, cuts));
  info["boundary_ratio"] = to_json(boundary_phi_prime(g, cuts));
  if (g.n <= kExhaustiveCutLimit) {
    info["boundary_vs_conductance"] = to_json(phi_prime_vs_phi_check(g));
  }
  write_json(opt.out, "graph_info.json", info);
  std::cout << "graph: n=" << g.n << " d=" << g.d << " edges=" << g.edge_count()
            << " connected=" << (g.connected() ? "yes" : "no") << "\n"
            << "wrote " << opt.out << "/graph_info.json\n";
  return 0;
}

int cmd_spectrum(const Options& opt) {
  LabeledGraph g = build_graph(opt.graph);
  WalkOperator W = build_walk(opt, g);
  if (W.kind == WalkOperator::Kind::RandomMixture) {
    throw std::invalid_argument("spectrum requires a unitary walk");
  }
  SpectralDecomposition dec = decompose(W);
  write_text(opt.out, "spectrum.csv", spectrum_to_csv(dec));

  auto [a, v] = parse_start(opt.start, g.n, g.d);
  WalkState alpha0 = basis_state(g.n, g.d, a, v);
  json spacing_json;
  spacing_json["dim"] = dec.dim();
  spacing_json["classes"] = dec.classes.size();
  spacing_json["distinct"] = dec.classes.size() == static_cast<std::size_t>(dec.dim());
  spacing_json["start"] = {{"a", a}, {"v", v}};
  try {
    spacing_json["spacing"] = to_json(spacing_report(dec, opt.delta, alpha0));
  } catch (const std::exception& e) {
    spacing_json["spacing_error"] = e.what();
  }
  write_json(opt.out, "spacing.json", spacing_json);

  if (is_odd_cycle_hadamard(opt, g)) {
    auto analytic = cycle_analytic_spectrum(g.n);
    CMat U = W.matrix();
    double worst_match = 0.0, worst_residual = 0.0;
    for (const auto& pair : analytic) {
      for (int which = 0; which < 2; ++which) {
        cxd lambda = which == 0 ? pair.lambda1 : pair.lambda2;
        const CVec& vec = which == 0 ? pair.vec1 : pair.vec2;
        double best = 1e300;
        for (int j = 0; j < dec.dim(); ++j) {
          best = std::min(best, std::abs(lambda - dec.eigvals[j]));
        }
        worst_match = std::max(worst_match, best);
        worst_residual = std::max(worst_residual, (U * vec - lambda * vec).norm());
      }
    }
    json cmp;
    cmp["max_eigenvalue_match_dev"] = worst_match;
    cmp["max_analytic_residual"] = worst_residual;
    cmp["holds"] = worst_match <= 1e-10 && worst_residual <= 1e-8;
    write_json(opt.out, "analytic_check.json", cmp);
  }
  std::cout << "spectrum: dim=" << dec.dim() << " classes=" << dec.classes.size()
            << " distinct="
            << (dec.classes.size() == static_cast<std::size_t>(dec.dim()) ? "yes"
                                                                          : "no")
            << "\nwrote " << opt.out << "/spectrum.csv, spacing.json\n";
  return 0;
}

int cmd_mix(const Options& opt) {
  LabeledGraph g = build_graph(opt.graph);
  WalkOperator W = build_walk(opt, g);
  long t_max = horizon(opt, g.n);
  auto pi_opt = pi_override(opt, g.n);
  const Distribution* pi_ptr = pi_opt ? &*pi_opt : nullptr;
  if (W.kind == WalkOperator::Kind::RandomMixture && !pi_ptr) {
    throw std::invalid_argument("mixture walks need --pi-uniform (no spectral reference)");
  }

  MixingReport rep = measure_mixing(W, opt.eps, t_max, default_subset_family(g),
                                    default_initial_family(g), pi_ptr);

  StochasticMatrix P = transition_matrix(g);
  Distribution pi_classical = stationary(g);
  long t_max_classical = classical_default_t_max(g.n);
  MeasuredTime classical_M =
      classical_mixing_time(P, pi_classical, opt.eps, t_max_classical);

  json out;
  out["quantum"] = to_json(rep);
  out["classical"] = {{"mixing", to_json(classical_M)},
                      {"t_max", t_max_classical}};

  bool violation = false;
  json bounds = json::object();
  if (rep.mixing.finite() && classical_M.finite()) {
    bounds["quantum_vs_classical"] = {
        {"quantum_mixing", rep.mixing.value},
        {"classical_mixing", classical_M.value},
        {"quantum_faster", rep.mixing.value < classical_M.value}};
  }
  if (is_odd_cycle_hadamard(opt, g) && opt.eps > 0 && opt.eps <= 1) {
    bounds["explicit_horizon"] = cycle_mixing_bound(g.n, opt.eps);
  }
  if (W.kind != WalkOperator::Kind::RandomMixture) {
    SpectralDecomposition dec = decompose(W);
    SpacingReport spacing =
        spacing_report(dec, 0.0, basis_state(g.n, g.d, 0, 0));
    if (spacing.delta > 0 && opt.eps > 0) {
      double t_us = M_PI * (std::log(g.n * g.d / 2.0) + 1.0) /
                    (opt.eps * spacing.delta);
      long t_bound = static_cast<long>(std::ceil(t_us));
      bounds["distinct_spacing_horizon"] = t_bound;
      if (rep.mixing.finite()) {
        bool ok = rep.mixing.value <= t_bound;
        bounds["mixing_within_spacing_horizon"] = ok;
        if (!ok) violation = true;
      }
    }
  }
  out["bounds"] = bounds;
  write_json(opt.out, "mix_report.json", out);

  // Plot data: averaged-distribution TV trajectory for the quantum walk,
  // instantaneous trajectory for the classical chain.
  long points = std::min(t_max, opt.curve_points);
  auto [a, v] = parse_start(opt.start, g.n, g.d);
  WalkState alpha0 = basis_state(g.n, g.d, a, v);
  Distribution pi_curve =
      pi_ptr ? *pi_ptr : limiting_distribution(decompose(W), alpha0);
  write_text(opt.out, "curve_quantum.csv",
             mixing_curve_csv(W, alpha0, pi_curve, points));
  std::ostringstream classical_csv;
  classical_csv << "t,tv\n";
  Distribution dist = Distribution::Zero(g.n);
  dist[v] = 1.0;
  for (long t = 0; t <= std::min(t_max_classical, opt.curve_points); ++t) {
    classical_csv << t << "," << format17(tv_distance(dist, pi_classical))
                  << "\n";
    dist = evolve(P, dist, 1);
  }
  write_text(opt.out, "curve_classical.csv", classical_csv.str());

  auto show = [](const MeasuredTime& m) {
    return m.finite() ? std::to_string(m.value) : std::string("exceeds-horizon");
  };
  std::cout << "mixing=" << show(rep.mixing) << " sampling=" << show(rep.sampling)
            << " filling=" << show(rep.filling)
            << " dispersion=" << show(rep.dispersion)
            << " classical-mixing=" << show(classical_M)
            << " ordering=" << (rep.ordering_holds ? "holds" : "violated")
            << "\nwrote " << opt.out << "/mix_report.json and curves\n";
  if (!rep.ordering_holds) violation = true;
  return violation ? 1 : 0;
}

int cmd_verify(const Options& opt) {
  LabeledGraph g = build_graph(opt.graph);
  json findings = json::array();
  bool failed = false;
  auto add = [&](json f) {
    if (f.contains("holds") && !f["holds"].get<bool>()) failed = true;
    findings.push_back(std::move(f));
  };

  WalkOperator W;
  bool built = false;
  try {
    W = build_walk(opt, g);
    built = true;
  } catch (const std::invalid_argument& e) {
    json f = finding("unitarity", false);
    f["notes"] = {std::string(e.what())};
    add(std::move(f));
  }

  if (built) {
    // Unitarity residual of the one-step operator(s).
    double unitarity_err = 0.0;
    auto gram_err = [](const CMat& U) {
      return (U.adjoint() * U - CMat::Identity(U.rows(), U.cols()))
          .cwiseAbs()
          .maxCoeff();
    };
    if (W.kind == WalkOperator::Kind::RandomMixture) {
      for (const auto& part : W.parts) {
        unitarity_err = std::max(unitarity_err, gram_err(part.matrix()));
      }
    } else {
      unitarity_err = gram_err(W.matrix());
    }
    json f = finding("unitarity", unitarity_err <= 1e-12);
    f["measured"] = unitarity_err;
    add(std::move(f));

    add(finding("locality", locality_check(W)));

    // Probability enters a subset only through its boundary (one step).
    CutFamily cuts = default_cut_family(g);
    Cut cut = boundary_phi_prime(g, cuts).argmin;
    std::mt19937_64 rng(opt.seed);
    double worst_margin = -1e300;
    bool projection_ok = true;
    for (int s = 0; s < opt.states; ++s) {
      WalkState psi = random_state(g.n, g.d, rng);
      ProjectionCheckReport pr = projection_inequality_check(W, cut, psi);
      projection_ok = projection_ok && pr.holds;
      worst_margin =
          std::max(worst_margin, pr.p_x_after - pr.p_x_before - pr.p_b_before);
    }
    json pf = finding("projection-inequality", projection_ok);
    pf["states"] = opt.states;
    pf["worst_margin"] = worst_margin;
    pf["cut"] = to_json(cut);
    add(std::move(pf));

    if (W.kind != WalkOperator::Kind::RandomMixture) {
      CompleteMixtureReport cm = complete_mixture_check(W, 100);
      json cf = finding("complete-mixture-uniform", cm.uniform_at_all_t);
      cf["worst_deviation"] = cm.worst_deviation;
      add(std::move(cf));
    }

    json cb = finding("conductance-sandwich", check_cond_bounds(g).holds);
    add(std::move(cb));
    if (g.n <= kExhaustiveCutLimit) {
      PhiComparisonReport pc = phi_prime_vs_phi_check(g);
      json bf = finding("boundary-vs-conductance", pc.holds);
      bf["phi"] = pc.phi;
      bf["phi_prime"] = pc.phi_prime;
      add(std::move(bf));
    }

    long t_max = horizon(opt, g.n);
    auto pi_opt = pi_override(opt, g.n);
    const Distribution* pi_ptr = pi_opt ? &*pi_opt : nullptr;
    bool can_measure = pi_ptr || W.kind != WalkOperator::Kind::RandomMixture;
    if (can_measure) {
      MixingReport rep =
          measure_mixing(W, opt.eps, t_max, default_subset_family(g),
                         default_initial_family(g), pi_ptr);
      json of = finding("measure-ordering", rep.ordering_holds);
      of["report"] = to_json(rep);
      add(std::move(of));

      // Uniform-limit hypothesis gates the filling/sampling lower bounds.
      bool uniform_limit = false;
      if (pi_ptr) {
        uniform_limit = true;  // asserted by --pi-uniform
      } else {
        SpectralDecomposition dec = decompose(W);
        Distribution uniform = Distribution::Constant(g.n, 1.0 / g.n);
        uniform_limit = true;
        for (int aa = 0; aa < g.d && uniform_limit; ++aa) {
          for (int vv = 0; vv < g.n && uniform_limit; ++vv) {
            Distribution pv =
                limiting_distribution(dec, basis_state(g.n, g.d, aa, vv));
            if (tv_distance(pv, uniform) > 1e-8) uniform_limit = false;
          }
        }
      }
      if (uniform_limit) {
        FillingLowerBoundReport fl =
            lower_bound_filling_check(W, cut, opt.eps, rep.filling);
        json ff = finding("filling-lower-bound",
                          fl.holds && fl.mean_boundary_holds);
        ff["report"] = to_json(fl);
        add(std::move(ff));
        if (W.kind == WalkOperator::Kind::Coined) {
          CoinedLowerBoundReport cl = coined_lower_bound_check(
              W, cut, opt.eps, rep.filling, opt.states, 50, opt.seed);
          json cf = finding("coined-lower-bound",
                            cl.holds && cl.mean_cutspace_holds &&
                                cl.leakage_violations == 0 &&
                                cl.conjugation_max_diff <= 1e-10);
          cf["report"] = to_json(cl);
          add(std::move(cf));
        }
        if (W.kind == WalkOperator::Kind::RandomMixture) {
          NonunitaryLowerBoundReport nl =
              nonunitary_lower_bound_check(W, cut, opt.eps, rep.sampling);
          json nf = finding("nonunitary-lower-bound", nl.holds);
          nf["report"] = to_json(nl);
          add(std::move(nf));
        }
      } else {
        json skip;
        skip["check"] = "lower-bounds";
        skip["skipped"] =
            "limiting distribution is not uniform; the bounds assume a "
            "uniform limit";
        add(std::move(skip));
      }

      if (W.kind != WalkOperator::Kind::RandomMixture && rep.mixing.finite()) {
        try {
          AmplificationResult amp = amplify(
              W, std::max<long>(1, rep.mixing.value), 2, opt.seed, 0);
          json af = finding(
              "amplification",
              amp.contraction_ok && amp.row_sum_error <= 1e-12 &&
                  amp.fixpoint_error <= 1e-10 &&
                  amp.final_distance <= amp.eps0 * amp.eps0 + 1e-9);
          af["eps0"] = amp.eps0;
          af["final_distance"] = amp.final_distance;
          af["row_sum_error"] = amp.row_sum_error;
          af["fixpoint_error"] = amp.fixpoint_error;
          add(std::move(af));
        } catch (const std::invalid_argument& e) {
          json skip;
          skip["check"] = "amplification";
          skip["skipped"] = e.what();
          add(std::move(skip));
        }
      }
    } else {
      json skip;
      skip["check"] = "measures";
      skip["skipped"] = "mixture walk without --pi-uniform: no reference limit";
      add(std::move(skip));
    }
  }

  json out;
  out["findings"] = findings;
  out["all_hold"] = !failed;
  write_json(opt.out, "findings.json", out);
  std::cout << (failed ? "FAIL" : "ok") << ": " << findings.size()
            << " checks, wrote " << opt.out << "/findings.json\n";
  return failed ? 1 : 0;
}

int cmd_amplify(const Options& opt) {
  LabeledGraph g = build_graph(opt.graph);
  WalkOperator W = build_walk(opt, g);
  long stage = opt.stage_length;
  if (stage <= 0) {
    MeasuredTime M = estimate_mixing_time(W, opt.eps, horizon(opt, g.n),
                                          default_initial_family(g));
    if (!M.finite()) {
      throw std::invalid_argument(
          "mixing time exceeds the horizon; pass --stage-length explicitly");
    }
    stage = std::max<long>(1, M.value);
  }
  AmplificationResult amp = amplify(W, stage, opt.stages, opt.seed, opt.mc_trials);
  json out;
  out["amplification"] = to_json(amp);
  bool violation = !amp.contraction_ok || amp.row_sum_error > 1e-12 ||
                   amp.fixpoint_error > 1e-10;
  double target = std::pow(amp.eps0, amp.k) + 1e-9;
  out["k_stage_target"] = target;
  out["k_stage_within_target"] = amp.final_distance <= target;
  if (amp.final_distance > target) violation = true;
  if (opt.eps > 0 && opt.eps < 1) {
    out["amplified_sampling"] =
        to_json(amplified_sampling_bound(W, opt.eps, stage, opt.seed));
  }
  write_json(opt.out, "amplify_report.json", out);
  std::cout << "stage_length=" << stage << " k=" << amp.k
            << " eps0=" << format17(amp.eps0)
            << " final=" << format17(amp.final_distance) << "\nwrote "
            << opt.out << "/amplify_report.json\n";
  return violation ? 1 : 0;
}

int cmd_bounds(const Options& opt) {
  LabeledGraph g = build_graph(opt.graph);
  WalkOperator W = build_walk(opt, g);
  json out;
  json checks = json::array();
  bool violation = false;
  auto add = [&](const BoundCheck& c) {
    if (!c.holds) violation = true;
    checks.push_back(to_json(c));
  };

  add(check_spect_bounds(g, opt.eps, classical_default_t_max(g.n)));
  add(check_cond_bounds(g));

  if (W.kind != WalkOperator::Kind::RandomMixture) {
    SpectralDecomposition dec = decompose(W);
    SpacingReport spacing = spacing_report(dec, 0.0, basis_state(g.n, g.d, 0, 0));
    InitialFamily starts = default_initial_family(g);
    double worst_pairs_margin = -1e300, worst_us_margin = -1e300;
    bool tv_ok = true;
    for (long T : {100L, 1000L, 10000L}) {
      for (auto [a, v] : starts.states) {
        WalkState alpha0 = basis_state(g.n, g.d, a, v);
        Distribution avg = average_distribution(W, alpha0, T);
        Distribution pi = limiting_distribution(dec, alpha0);
        double measured = tv_distance(avg, pi);
        double pairs = convergence_bound_pairs(dec, alpha0, T);
        if (measured > pairs + kIneqSlack) tv_ok = false;
        worst_pairs_margin = std::max(worst_pairs_margin, measured - pairs);
        if (spacing.delta > 0) {
          double us = convergence_bound_uniform_spacing(g.n, g.d, spacing.delta, T);
          if (measured > us + kIneqSlack) tv_ok = false;
          worst_us_margin = std::max(worst_us_margin, measured - us);
        }
      }
    }
    BoundCheck tv;
    tv.quantity = "averaged-distribution distance vs spectral bounds";
    tv.measured = worst_pairs_margin;
    tv.holds = tv_ok;
    tv.notes.push_back("worst measured-minus-bound margin over starts and T in "
                       "{100, 1000, 10000}");
    if (spacing.delta > 0) {
      tv.notes.push_back("distinct-spacing margin " + format17(worst_us_margin));
    } else {
      tv.notes.push_back("degenerate spectrum: distinct-spacing bound skipped");
    }
    add(tv);

    if (is_odd_cycle_hadamard(opt, g) && opt.eps > 0 && opt.eps <= 1) {
      long T = cycle_mixing_bound(g.n, opt.eps);
      BoundCheck guarantee;
      guarantee.quantity = "explicit mixing horizon guarantee";
      guarantee.upper_bound = opt.eps;
      if (T <= opt.max_guarantee_steps) {
        double worst = 0.0;
        Distribution uniform = Distribution::Constant(g.n, 1.0 / g.n);
        for (auto [a, v] : starts.states) {
          WalkState alpha0 = basis_state(g.n, g.d, a, v);
          worst = std::max(
              worst, tv_distance(average_distribution(W, alpha0, T), uniform));
        }
        guarantee.measured = worst;
        guarantee.holds = worst <= opt.eps + kIneqSlack;
        guarantee.notes.push_back("horizon T = " + std::to_string(T));
      } else {
        guarantee.holds = true;
        guarantee.notes.push_back(
            "horizon T = " + std::to_string(T) + " exceeds --max-guarantee-steps " +
            std::to_string(opt.max_guarantee_steps) + "; not simulated");
      }
      add(guarantee);
    }

    std::mt19937_64 rng(opt.seed);
    bool sd_ok = true;
    double sd_margin = -1e300;
    for (int trial = 0; trial < 3; ++trial) {
      WalkState alpha = random_state(g.n, g.d, rng);
      WalkState beta = random_state(g.n, g.d, rng);
      for (long T : {10L, 100L}) {
        StateDistanceReport sd =
            state_distance_vs_distribution_distance(alpha, beta, W, T);
        sd_ok = sd_ok && sd.holds;
        sd_margin = std::max(sd_margin, sd.distribution_distance - sd.bound);
      }
    }
    BoundCheck sd;
    sd.quantity = "averaged-distance vs initial-state distance";
    sd.measured = sd_margin;
    sd.holds = sd_ok;
    sd.notes.push_back("3 seeded state pairs, T in {10, 100}");
    add(sd);
  }

  out["checks"] = checks;
  out["all_hold"] = !violation;
  write_json(opt.out, "bounds_report.json", out);
  std::cout << (violation ? "FAIL" : "ok") << ": " << checks.size()
            << " bound checks, wrote " << opt.out << "/bounds_report.json\n";
  return violation ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-walk mixing toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file merged under flags");

  Options opt;
  CLI::App* sc_info = app.add_subcommand("graph-info", "Graph facts and conductance");
  CLI::App* sc_spectrum =
      app.add_subcommand("spectrum", "Eigendecomposition, spacing, spectrum CSV");
  CLI::App* sc_mix = app.add_subcommand(
      "mix", "Measure the four mixing quantities, classical baseline, curves");
  CLI::App* sc_verify =
      app.add_subcommand("verify", "Run the full invariant and bound suite");
  CLI::App* sc_amplify =
      app.add_subcommand("amplify", "Amplified sampling scheme and its contraction");
  CLI::App* sc_bounds =
      app.add_subcommand("bounds", "Spectral/conductance/guarantee bound checks");
  for (CLI::App* sc :
       {sc_info, sc_spectrum, sc_mix, sc_verify, sc_amplify, sc_bounds}) {
    add_common(sc, opt);
    sc->add_option("--config", config_path,
                   "JSON config file merged under flags");
  }
  sc_spectrum->add_option("--delta", opt.delta, "Good/bad split parameter");
  sc_mix->add_option("--curve-points", opt.curve_points, "Curve row cap");
  sc_verify->add_option("--states", opt.states, "Random states per check");
  sc_amplify->add_option("--stages", opt.stages, "Amplification stage count");
  sc_amplify->add_option("--stage-length", opt.stage_length,
                         "Steps per stage (0 = measured mixing time)");
  sc_amplify->add_option("--mc", opt.mc_trials, "Monte Carlo cross-check trials");
  sc_bounds->add_option("--max-guarantee-steps", opt.max_guarantee_steps,
                        "Simulate the explicit horizon only up to this length");

  try {
    std::vector<std::string> args = merge_config(argc, argv);
    std::vector<const char*> argv2;
    argv2.push_back(argc > 0 ? argv[0] : "qwalk");
    for (const auto& s : args) argv2.push_back(s.c_str());
    app.parse(static_cast<int>(argv2.size()), argv2.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sc_info->parsed()) return cmd_graph_info(opt);
    if (sc_spectrum->parsed()) return cmd_spectrum(opt);
    if (sc_mix->parsed()) return cmd_mix(opt);
    if (sc_verify->parsed()) return cmd_verify(opt);
    if (sc_amplify->parsed()) return cmd_amplify(opt);
    if (sc_bounds->parsed()) return cmd_bounds(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
