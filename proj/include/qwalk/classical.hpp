#pragma once

#include "qwalk/common.hpp"
#include "qwalk/graph.hpp"

namespace qwalk {

/// Row-stochastic transition matrix of the simple random walk:
/// P(u,v) = 1/deg(u) iff (u,v) is a true edge (padding self-loops excluded).
struct StochasticMatrix {
  RMat P;
  int n() const { return static_cast<int>(P.rows()); }
};

StochasticMatrix transition_matrix(const LabeledGraph& g);

/// D_t = P^t D_0 by exact matrix-vector iteration (no eigen-approximation).
Distribution evolve(const StochasticMatrix& P, const Distribution& d0, long t);

/// pi(v) = deg(v) / 2|E| (true degrees; padding self-loops excluded).
Distribution stationary(const LabeledGraph& g);

struct SpectralGapResult {
  double lambda2 = 0.0;     ///< second-largest eigenvalue of P
  double gap = 0.0;         ///< 1 - lambda2
  double lambda_min = 0.0;  ///< smallest eigenvalue (=-1 exactly iff bipartite)
};

/// Real spectrum obtained via the pi-symmetrized form of P.
SpectralGapResult spectral_gap(const StochasticMatrix& P);

/// Subset family for the "for all X" quantifiers of the set-based measures.
/// Exhaustive families are swept implicitly over all 2^n subsets; restricted
/// families list their member sets.
struct SubsetFamily {
  bool exhaustive = false;
  std::vector<std::vector<int>> sets;  ///< used when !exhaustive
  std::string description;
};

/// Exhaustive when n <= kExhaustiveCutLimit; otherwise singletons +
/// contiguous arcs + the full vertex set + extras.
SubsetFamily default_subset_family(const LabeledGraph& g,
                                   const std::vector<std::vector<int>>& extra = {});

/// Classical measures, all with the "for all t >= T" quantifier swept over
/// every point-mass initial distribution up to t_max:
///   mixing:     ||D_t - pi|| <= eps
///   filling:    D_t(X) >= (1-eps) pi(X) for all X in the family
///   dispersion: D_t(X) <= (1+eps) pi(X) for all X in the family
MeasuredTime classical_mixing_time(const StochasticMatrix& P,
                                   const Distribution& pi, double eps,
                                   long t_max);
MeasuredTime classical_filling_time(const StochasticMatrix& P,
                                    const Distribution& pi, double eps,
                                    long t_max, const SubsetFamily& family);
MeasuredTime classical_dispersion_time(const StochasticMatrix& P,
                                       const Distribution& pi, double eps,
                                       long t_max, const SubsetFamily& family);

/// Default classical sweep horizon: 50 n^2.
long classical_default_t_max(int n);

/// Sandwich lambda2/((1-lambda2) log 2eps) <= M_eps <= (max_i log 1/pi_i +
/// log 1/eps)/(1-lambda2), evaluated literally with natural logarithms.
/// The lower side is only reported when log(2 eps) < 0 (it is the regime the
/// statement is meant for); otherwise it is skipped and flagged in notes.
BoundCheck check_spect_bounds(const LabeledGraph& g, double eps, long t_max);

/// Conductance sandwich Phi^2/2 <= 1 - lambda2 <= 2 Phi (exhaustive cuts).
BoundCheck check_cond_bounds(const LabeledGraph& g);

}  // namespace qwalk
