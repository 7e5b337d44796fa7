#pragma once

#include "qwalk/classical.hpp"
#include "qwalk/common.hpp"
#include "qwalk/qwalk.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

/// Basis initial states (a, v) swept by the "for all starts" quantifiers.
struct InitialFamily {
  std::vector<std::pair<int, int>> states;
  std::string description;
};

/// All nd basis states, reduced to the d coin states at vertex 0 when the
/// graph is vertex-transitive (other starts are equivalent up to relabeling;
/// validated against the full sweep at small n in the test suite).
InitialFamily default_initial_family(const LabeledGraph& g);

/// Default quantum sweep horizon: 200 n ln n.
long quantum_default_t_max(int n);

/// The binding (t, X, start) triple behind a measured value.
struct Witness {
  long t = -1;
  std::vector<int> X;  ///< empty for the whole-distribution measures
  int a = -1;
  int v = -1;
};

struct MixingReport {
  double eps = 0.0;
  long t_max = 0;
  MeasuredTime mixing;      ///< M: averaged distribution, TV, for all t >= T
  MeasuredTime sampling;    ///< S: averaged, relative on every subset, all t >= T
  MeasuredTime filling;     ///< tau: instantaneous, some t <= T per subset/start
  MeasuredTime dispersion;  ///< xi: instantaneous upper analog of tau
  Witness mixing_witness, sampling_witness, filling_witness, dispersion_witness;
  std::string subset_family;
  std::string initial_family;
  /// mixing, filling, dispersion <= sampling; true when provable from the
  /// measured values (vacuously true if sampling exceeds the horizon).
  bool ordering_holds = false;
};

/// Measures all four quantities in one sweep. For unitary walks the reference
/// distribution is the spectral limiting distribution per start; RandomMixture
/// walks evolve the exact mixed density (deterministic, no sampling) and
/// require pi_override. pi_override, when given, replaces the spectral
/// reference for every start.
MixingReport measure_mixing(const WalkOperator& W, double eps, long t_max,
                            const SubsetFamily& subsets,
                            const InitialFamily& starts,
                            const Distribution* pi_override = nullptr);

MeasuredTime estimate_mixing_time(const WalkOperator& W, double eps, long t_max,
                                  const InitialFamily& starts,
                                  const Distribution* pi_override = nullptr);
MeasuredTime estimate_sampling_time(const WalkOperator& W, double eps,
                                    long t_max, const SubsetFamily& subsets,
                                    const InitialFamily& starts,
                                    const Distribution* pi_override = nullptr);
MeasuredTime estimate_filling_time(const WalkOperator& W, double eps,
                                   long t_max, const SubsetFamily& subsets,
                                   const InitialFamily& starts,
                                   const Distribution* pi_override = nullptr);
MeasuredTime estimate_dispersion_time(const WalkOperator& W, double eps,
                                      long t_max, const SubsetFamily& subsets,
                                      const InitialFamily& starts,
                                      const Distribution* pi_override = nullptr);

/// CSV with columns t, tv: the trajectory of ||avg_t - pi|| for t in [1, T].
std::string mixing_curve_csv(const WalkOperator& W, const WalkState& start,
                             const Distribution& pi, long T);

// ---- Amplification -----------------------------------------------------------

struct AmplificationResult {
  int k = 0;                ///< stage count
  long stage_length = 0;    ///< steps per stage (the measured mixing time)
  RMat P_amp;               ///< one-stage node-to-node matrix, row-stochastic
  Distribution pi;          ///< the start-independent limiting distribution
  double eps0 = 0.0;        ///< achieved one-stage distance max_v ||e_v P - pi||
  double final_distance = 0.0;  ///< max_v ||e_v P^k - pi||
  double row_sum_error = 0.0;
  double fixpoint_error = 0.0;  ///< ||pi P - pi||
  bool contraction_ok = false;  ///< ||v_i P|| <= eps0 ||v_i|| for all proof basis v_i
  std::uint64_t seed = 0;
  // Monte Carlo cross-validation of e_0 P^k (0 trials = skipped).
  long mc_trials = 0;
  double mc_max_z = 0.0;  ///< worst per-entry z-score vs. the exact powering
  Distribution mc_estimate;
};

/// One amplification stage runs the walk from a uniformly random coin state
/// at the current node for a uniformly random time in [0, stage_length), then
/// measures the node: P(v,u) = (1/d) sum_a (1/L) sum_{t<L} P_t(u | a,v).
/// The k-stage distribution is computed exactly by matrix powering; mc_trials
/// > 0 additionally cross-validates row 0 by seeded simulation. Throws when
/// the limiting distribution depends on the initial basis state.
AmplificationResult amplify(const WalkOperator& W, long stage_length, int k,
                            std::uint64_t seed = kDefaultSeed,
                            long mc_trials = 0);

struct AmplifiedSamplingReport {
  long T = 0;   ///< k * M_eps
  int k = 0;    ///< ceil(log n / log(1/eps))
  double worst_relative_dev = 0.0;  ///< max over starts, subsets of |D_k(X)-pi(X)|/pi(X)
  bool meets_condition = false;     ///< worst_relative_dev <= eps
};

/// Horizon T = ceil(log n / log(1/eps)) * M_eps after which the amplified
/// walk samples within relative eps of pi, verified by running the k-stage
/// scheme exactly. Requires 0 < eps < 1 and a start-independent pi.
AmplifiedSamplingReport amplified_sampling_bound(const WalkOperator& W,
                                                 double eps, long M_eps,
                                                 std::uint64_t seed = kDefaultSeed);

// ---- Lower bounds --------------------------------------------------------------

struct FillingLowerBoundReport {
  double bound = 0.0;         ///< (1-eps) |X| |X̄| / (|B| n)
  double measured = 0.0;      ///< measured filling time (t_max when horizon-limited)
  bool holds = false;
  bool binding = false;       ///< bound >= 1 (a sub-1 bound constrains nothing)
  double mean_boundary_worst = 0.0;  ///< max_t mean over X̄ basis starts of ||P_B U^t a||^2
  double mean_boundary_bound = 0.0;  ///< |B| / |X̄|
  bool mean_boundary_holds = false;
  std::vector<std::string> notes;
};

/// Filling-time lower bound for walks with a uniform limiting distribution,
/// plus the exact boundary-projection mean check behind it (the mean over
/// basis starts in the complement equals a Frobenius norm and is evaluated
/// exactly, t = 0..measured).
FillingLowerBoundReport lower_bound_filling_check(const WalkOperator& W,
                                                  const Cut& cut, double eps,
                                                  const MeasuredTime& measured_tau);

struct CoinedLowerBoundReport {
  double bound = 0.0;       ///< (1-eps) |X| |X̄| d / (|E(X:X̄)| n)
  double measured = 0.0;
  bool holds = false;
  bool binding = false;
  double mean_cutspace_worst = 0.0;  ///< max_t mean over X̄ starts of ||P_C U^t a||^2
  double mean_cutspace_bound = 0.0;  ///< |E(X:X̄)| / (|X̄| d)
  bool mean_cutspace_holds = false;
  long leakage_checks = 0;       ///< per-state per-step inequalities evaluated
  long leakage_violations = 0;   ///< count beyond 1e-10 (should be 0)
  double conjugation_max_diff = 0.0;  ///< shift-coin vs coin-shift agreement
  int cut_space_dim = 0;         ///< #{(b,v) : v in X̄, sigma_b(v) in X}
  long cut_edges = 0;
  std::vector<std::string> notes;
};

/// Coined-walk lower bound via the cut-edge space H_C (spanned by |b,v>,
/// v in X̄, sigma_b(v) in X). The per-step leakage inequality
///   ||P_X U'^k a||^2 <= ||P_X U'^{k-1} a||^2 + ||P_C U'^{k-1} a||^2
/// is verified in the shift-then-coin ordering U' = (C (x) I) S on seeded
/// random states (the stated start conjugation maps it back to S (C (x) I)).
CoinedLowerBoundReport coined_lower_bound_check(const WalkOperator& W,
                                                const Cut& cut, double eps,
                                                const MeasuredTime& measured_tau,
                                                int random_states, long steps,
                                                std::uint64_t seed = kDefaultSeed);

struct NonunitaryLowerBoundReport {
  double bound = 0.0;    ///< (1-3 eps) |X| / (2 (1+eps) |B|)
  double measured = 0.0;
  bool holds = false;
  bool vacuous = false;  ///< eps >= 1/3 makes the numerator nonpositive
  std::vector<std::string> notes;
};

/// Sampling-time lower bound for random-mixture walks with a uniform
/// limiting distribution, evaluated at the supplied (normally the
/// boundary-minimizing) cut.
NonunitaryLowerBoundReport nonunitary_lower_bound_check(
    const WalkOperator& W, const Cut& cut, double eps,
    const MeasuredTime& measured_S);

/// Haar-like random unit state from the given seeded generator; when
/// `support` is nonempty the state lives in the span of those basis indices.
WalkState random_state(int n, int d, std::mt19937_64& rng,
                       const std::vector<int>& support = {});

}  // namespace qwalk
