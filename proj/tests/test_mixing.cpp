#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/classical.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/mixing.hpp"
#include "qwalk/qwalk.hpp"

using namespace qwalk;

namespace {

WalkOperator hadamard_cycle(int n) { return coined_walk(cycle(n), hadamard_coin()); }

CoinOperator phased_coin() {
  CoinOperator c;
  CMat phase = CMat::Zero(2, 2);
  phase(0, 0) = cxd(1.0, 0.0);
  phase(1, 1) = cxd(0.0, 1.0);
  c.C = phase * hadamard_coin().C;
  return c;
}

Distribution uniform(int n) { return Distribution::Constant(n, 1.0 / n); }

}  // namespace

TEST_CASE("initial family: coin reduction on vertex-transitive graphs") {
  InitialFamily f5 = default_initial_family(cycle(5));
  REQUIRE(f5.states.size() == 2);
  CHECK(f5.states[0] == std::pair<int, int>{0, 0});
  CHECK(f5.states[1] == std::pair<int, int>{1, 0});

  LabeledGraph bk3 = pad_regular(bridged_cliques_adjacency(3));
  InitialFamily fb = default_initial_family(bk3);
  CHECK(fb.states.size() == static_cast<std::size_t>(bk3.n * bk3.d));
}

TEST_CASE("default horizons") {
  CHECK(quantum_default_t_max(5) == 1609);
  CHECK(quantum_default_t_max(6) == 2150);
  CHECK(quantum_default_t_max(8) == 3327);
  CHECK(classical_default_t_max(10) == 5000);
}

TEST_CASE("four measures on the 5-cycle, frozen values and ordering") {
  WalkOperator W = hadamard_cycle(5);
  LabeledGraph g = cycle(5);
  SubsetFamily subsets = default_subset_family(g);
  InitialFamily starts = default_initial_family(g);

  MixingReport r = measure_mixing(W, 0.1, 300, subsets, starts);
  REQUIRE(r.mixing.finite());
  REQUIRE(r.sampling.finite());
  REQUIRE(r.filling.finite());
  REQUIRE(r.dispersion.finite());
  CHECK(r.mixing.value == 16);
  CHECK(r.ordering_holds);
  CHECK(r.mixing.value <= r.sampling.value);
  CHECK(r.filling.value <= r.sampling.value);
  CHECK(r.dispersion.value <= r.sampling.value);

  // Tighter thresholds can only push the measures up.
  MixingReport tight = measure_mixing(W, 0.05, 300, subsets, starts);
  CHECK(tight.mixing.value >= r.mixing.value);

  // The witness records the binding (t, start); M is the last violation + 1.
  CHECK(r.mixing_witness.t == r.mixing.value - 1);
}

TEST_CASE("frozen mixing times across odd cycles") {
  struct Row {
    int n;
    long m;
  };
  for (const Row& row : {Row{5, 16}, Row{7, 28}, Row{9, 39}}) {
    WalkOperator W = hadamard_cycle(row.n);
    MeasuredTime m = estimate_mixing_time(W, 0.1, quantum_default_t_max(row.n),
                                          default_initial_family(cycle(row.n)));
    REQUIRE(m.finite());
    CHECK(m.value == row.m);
  }
}

TEST_CASE("a threshold beyond the diameter of the simplex") {
  WalkOperator W = hadamard_cycle(5);
  LabeledGraph g = cycle(5);
  MixingReport r = measure_mixing(W, 2.0, 300, default_subset_family(g),
                                  default_initial_family(g));
  // TV can never exceed 2, so the global measures collapse to 0; the
  // relative subset measures do not (eps multiplies pi(X), not the range).
  CHECK(r.mixing.value == 0);
  CHECK(r.filling.value == 0);
  CHECK(r.sampling.value == 2);
  CHECK(r.dispersion.value == 1);
}

TEST_CASE("subset measures are relative to the supplied family") {
  WalkOperator W = hadamard_cycle(5);
  SubsetFamily whole;
  whole.exhaustive = false;
  whole.sets = {{0, 1, 2, 3, 4}};
  whole.description = "full vertex set only";
  MixingReport r = measure_mixing(W, 0.1, 300, whole,
                                  default_initial_family(cycle(5)));
  CHECK(r.sampling.value == 0);
  CHECK(r.filling.value == 0);
  CHECK(r.dispersion.value == 0);
  CHECK(r.mixing.value == 16);  // the TV measure ignores the family
}

TEST_CASE("coin-state reduction agrees with the full start sweep") {
  WalkOperator W = hadamard_cycle(7);
  LabeledGraph g = cycle(7);
  SubsetFamily subsets = default_subset_family(g);

  InitialFamily all;
  all.description = "all basis states";
  for (int a = 0; a < 2; ++a) {
    for (int v = 0; v < 7; ++v) all.states.emplace_back(a, v);
  }
  MixingReport reduced =
      measure_mixing(W, 0.1, 400, subsets, default_initial_family(g));
  MixingReport full = measure_mixing(W, 0.1, 400, subsets, all);
  CHECK(reduced.mixing.value == full.mixing.value);
  CHECK(reduced.sampling.value == full.sampling.value);
  CHECK(reduced.filling.value == full.filling.value);
  CHECK(reduced.dispersion.value == full.dispersion.value);
}

TEST_CASE("instantaneous measures beat the classical walk on odd cycles") {
  for (int n : {5, 9, 13}) {
    LabeledGraph g = cycle(n);
    SubsetFamily subsets = default_subset_family(g);
    MeasuredTime q = estimate_filling_time(hadamard_cycle(n), 0.1,
                                           quantum_default_t_max(n), subsets,
                                           default_initial_family(g));
    MeasuredTime c = classical_filling_time(transition_matrix(g), stationary(g),
                                            0.1, classical_default_t_max(n),
                                            subsets);
    REQUIRE(q.finite());
    REQUIRE(c.finite());
    CHECK(q.value < c.value);
    if (n == 9) CHECK(q.value == 7);
  }
}

TEST_CASE("coin mixtures evolve the exact mixed density") {
  WalkOperator a = hadamard_cycle(9);
  WalkOperator b = coined_walk(cycle(9), phased_coin());
  WalkOperator mix = random_mixture({a, b}, {0.5, 0.5});
  LabeledGraph g = cycle(9);
  SubsetFamily subsets = default_subset_family(g);
  InitialFamily starts = default_initial_family(g);

  // The spectral reference is undefined for a mixture: the caller must say
  // what distribution to compare against.
  CHECK_THROWS_AS(measure_mixing(mix, 0.1, 300, subsets, starts),
                  std::invalid_argument);

  Distribution u = uniform(9);
  MixingReport r = measure_mixing(mix, 0.1, 300, subsets, starts, &u);
  REQUIRE(r.mixing.finite());
  REQUIRE(r.sampling.finite());
  CHECK(r.mixing.value == 50);
  CHECK(r.sampling.value == 128);
  CHECK(r.ordering_holds);
}

TEST_CASE("measure_mixing validates its inputs") {
  WalkOperator W = hadamard_cycle(5);
  LabeledGraph g = cycle(5);
  SubsetFamily subsets = default_subset_family(g);
  InitialFamily starts = default_initial_family(g);
  CHECK_THROWS_AS(measure_mixing(W, -0.1, 300, subsets, starts),
                  std::invalid_argument);
  CHECK_THROWS_AS(measure_mixing(W, 0.1, 0, subsets, starts),
                  std::invalid_argument);
  InitialFamily bad;
  bad.states = {{2, 0}};
  CHECK_THROWS_AS(measure_mixing(W, 0.1, 300, subsets, bad),
                  std::invalid_argument);
}

TEST_CASE("amplification drives the distance down geometrically") {
  WalkOperator W = hadamard_cycle(5);
  AmplificationResult amp = amplify(W, 16, 3);
  CHECK(amp.k == 3);
  CHECK(amp.stage_length == 16);
  CHECK(amp.eps0 == doctest::Approx(0.049388).epsilon(1e-3));
  CHECK(amp.eps0 < 0.05);
  CHECK(amp.row_sum_error <= 1e-12);
  CHECK(amp.fixpoint_error <= 1e-10);
  CHECK(amp.contraction_ok);
  CHECK(amp.final_distance <= std::pow(amp.eps0, 3) + 1e-9);
  for (int v = 0; v < 5; ++v) {
    CHECK(amp.pi(v) == doctest::Approx(0.2).epsilon(1e-10));
  }

  // Seeded Monte Carlo agrees with the exact matrix powering.
  AmplificationResult mc = amplify(W, 16, 2, kDefaultSeed, 100000);
  CHECK(mc.mc_trials == 100000);
  CHECK(mc.mc_max_z <= 4.0);
  CHECK(std::abs(mc.mc_estimate.sum() - 1.0) <= 1e-12);

  CHECK_THROWS_AS(amplify(W, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(amplify(W, 16, 0), std::invalid_argument);
}

TEST_CASE("amplification refuses start-dependent limits") {
  LabeledGraph g = pad_regular(bridged_cliques_adjacency(3));
  WalkOperator W = coined_walk(g, dft_coin(g.d));
  CHECK_THROWS_WITH_AS(amplify(W, 30, 2),
                       doctest::Contains("depends on the initial"),
                       std::invalid_argument);
}

TEST_CASE("amplified sampling horizon") {
  WalkOperator W = hadamard_cycle(5);
  MeasuredTime m = estimate_mixing_time(W, 0.5, quantum_default_t_max(5),
                                        default_initial_family(cycle(5)));
  REQUIRE(m.finite());
  AmplifiedSamplingReport rep = amplified_sampling_bound(W, 0.5, m.value);
  CHECK(rep.k == 3);  // ceil(ln 5 / ln 2)
  CHECK(rep.T == 3 * m.value);
  CHECK(rep.worst_relative_dev <= 0.5);
  CHECK(rep.meets_condition);

  MeasuredTime m19 = estimate_mixing_time(W, 0.19, quantum_default_t_max(5),
                                          default_initial_family(cycle(5)));
  AmplifiedSamplingReport r19 = amplified_sampling_bound(W, 0.19, m19.value);
  CHECK(r19.k == 1);

  CHECK_THROWS_AS(amplified_sampling_bound(W, 1.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(amplified_sampling_bound(W, 0.5, 0), std::invalid_argument);
}

TEST_CASE("filling-time lower bound from boundary leakage") {
  LabeledGraph g = cycle(11);
  WalkOperator W = hadamard_cycle(11);
  MeasuredTime tau = estimate_filling_time(W, 0.1, quantum_default_t_max(11),
                                           default_subset_family(g),
                                           default_initial_family(g));
  REQUIRE(tau.finite());

  Cut arc = make_cut(g, {0, 1, 2, 3, 4});
  FillingLowerBoundReport rep = lower_bound_filling_check(W, arc, 0.1, tau);
  CHECK(rep.bound == doctest::Approx(0.9 * 5.0 * 6.0 / (2.0 * 11.0)).epsilon(1e-12));
  CHECK(rep.binding);
  CHECK(rep.holds);
  CHECK(rep.mean_boundary_bound == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
  CHECK(std::abs(rep.mean_boundary_worst - 2.0 / 6.0) <= 1e-10);
  CHECK(rep.mean_boundary_holds);

  // A singleton cut yields a sub-1 bound: flagged as non-binding.
  Cut single = make_cut(g, {0});
  FillingLowerBoundReport weak = lower_bound_filling_check(W, single, 0.1, tau);
  CHECK(!weak.binding);
  CHECK(weak.holds);
}

TEST_CASE("coined lower bound through the cut-edge space") {
  LabeledGraph g = cycle(9);
  WalkOperator W = hadamard_cycle(9);
  MeasuredTime tau = estimate_filling_time(W, 0.1, quantum_default_t_max(9),
                                           default_subset_family(g),
                                           default_initial_family(g));
  REQUIRE(tau.finite());
  REQUIRE(tau.value == 7);

  Cut arc = make_cut(g, {0, 1, 2, 3});
  CoinedLowerBoundReport rep =
      coined_lower_bound_check(W, arc, 0.1, tau, 1000, 50);
  CHECK(rep.cut_edges == 2);
  CHECK(rep.cut_space_dim == 2);
  CHECK(rep.bound == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.holds);
  CHECK(rep.binding);
  CHECK(rep.mean_cutspace_bound == doctest::Approx(2.0 / 10.0).epsilon(1e-12));
  CHECK(rep.mean_cutspace_holds);
  CHECK(rep.leakage_checks == 1000 * 50);
  CHECK(rep.leakage_violations == 0);
  CHECK(rep.conjugation_max_diff <= 1e-10);
}

TEST_CASE("one shift-then-coin step cannot reach the set without a cut edge") {
  // U' = (C (x) I) S applied to |0,5> on cycle(9) with X = {0,1,2,3}:
  // sigma_0(5) = 6 stays in the complement, so P_X is exactly zero after.
  LabeledGraph g = cycle(9);
  CMat S = shift_operator(g);
  CMat C = hadamard_coin().C;
  CVec e = CVec::Zero(18);
  e(0 * 9 + 5) = 1.0;
  CVec shifted = S * e;
  CVec after = CVec::Zero(18);
  for (int v = 0; v < 9; ++v) {
    for (int a2 = 0; a2 < 2; ++a2) {
      for (int a1 = 0; a1 < 2; ++a1) {
        after(a2 * 9 + v) += C(a2, a1) * shifted(a1 * 9 + v);
      }
    }
  }
  double p_x = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int v = 0; v <= 3; ++v) p_x += std::norm(after(a * 9 + v));
  }
  CHECK(p_x <= 1e-10);
}

TEST_CASE("sampling lower bound for coin mixtures") {
  LabeledGraph g = cycle(9);
  WalkOperator mix = random_mixture(
      {hadamard_cycle(9), coined_walk(g, phased_coin())}, {0.5, 0.5});
  Distribution u = uniform(9);
  MeasuredTime s = estimate_sampling_time(mix, 0.1, 300, default_subset_family(g),
                                          default_initial_family(g), &u);
  REQUIRE(s.finite());
  REQUIRE(s.value == 128);

  Cut arc = make_cut(g, {0, 1, 2, 3});
  NonunitaryLowerBoundReport rep = nonunitary_lower_bound_check(mix, arc, 0.1, s);
  CHECK(rep.bound == doctest::Approx(0.7 * 4.0 / (2.2 * 2.0)).epsilon(1e-12));
  CHECK(!rep.vacuous);
  CHECK(rep.holds);

  NonunitaryLowerBoundReport loose = nonunitary_lower_bound_check(mix, arc, 0.4, s);
  CHECK(loose.vacuous);
  CHECK(!loose.notes.empty());
}

TEST_CASE("seeded random states") {
  std::mt19937_64 r1(123), r2(123);
  WalkState a = random_state(5, 2, r1);
  WalkState b = random_state(5, 2, r2);
  CHECK((a.amp - b.amp).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(a.norm() - 1.0) <= 1e-12);

  std::mt19937_64 r3(7);
  WalkState sup = random_state(5, 2, r3, {0, 3, 9});
  for (int i = 0; i < 10; ++i) {
    if (i != 0 && i != 3 && i != 9) CHECK(std::abs(sup.amp(i)) == 0.0);
  }
  CHECK(std::abs(sup.norm() - 1.0) <= 1e-12);
}

TEST_CASE("mixing curve CSV") {
  WalkOperator W = hadamard_cycle(5);
  WalkState s = basis_state(5, 2, 0, 0);
  std::string csv = mixing_curve_csv(W, s, uniform(5), 20);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "t,tv");
  int rows = 0;
  std::string first, last;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (rows == 0) first = line;
    last = line;
    ++rows;
  }
  CHECK(rows == 20);
  CHECK(first.substr(0, 2) == "1,");
  CHECK(last.substr(0, 3) == "20,");
}
