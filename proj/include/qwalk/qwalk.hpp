#pragma once

#include <random>

#include "qwalk/common.hpp"
#include "qwalk/graph.hpp"

namespace qwalk {

/// Unit-norm amplitude vector over (label, vertex) basis pairs.
/// Index layout: (a, v) -> a*n + v. This layout is fixed and used by every
/// serialization and matrix representation.
struct WalkState {
  CVec amp;  ///< dimension d*n
  int n = 0;
  int d = 0;

  int dim() const { return n * d; }
  double norm() const { return amp.norm(); }
  /// Throws std::invalid_argument when | ||amp|| - 1 | > tol.
  void check_norm(double tol = 1e-10) const;
};

WalkState basis_state(int n, int d, int a, int v);

/// d x d unitary acting on the label register.
struct CoinOperator {
  CMat C;
  int d() const { return static_cast<int>(C.rows()); }
};

/// The 2x2 matrix (1 1; 1 -1)/sqrt(2).
CoinOperator hadamard_coin();

/// Discrete Fourier coin: C(j,k) = w^{jk}/sqrt(d), w = exp(2 pi i/d).
/// An unbiased coin for any degree; equals hadamard_coin() at d = 2.
CoinOperator dft_coin(int d);

/// Permutation matrix S |a,v> = |a, sigma_a(v)>.
CMat shift_operator(const LabeledGraph& g);

/// One-step evolution: a coined walk S(C (x) I), an arbitrary unitary on the
/// (label, vertex) space, or a random mixture of such walks (one constituent
/// sampled per step).
struct WalkOperator {
  enum class Kind { Coined, GeneralUnitary, RandomMixture };

  Kind kind = Kind::Coined;
  LabeledGraph g;
  CoinOperator coin;                ///< Coined only
  CMat U;                           ///< GeneralUnitary only
  std::vector<WalkOperator> parts;  ///< RandomMixture only
  std::vector<double> probs;        ///< RandomMixture only

  int n() const { return g.n; }
  int d() const { return g.d; }
  int dim() const { return g.n * g.d; }

  /// Explicit dn x dn matrix. For Coined this materializes S(C (x) I);
  /// for RandomMixture it throws (there is no single matrix).
  CMat matrix() const;
};

/// Validates coin unitarity (1e-12) and dimension match.
WalkOperator coined_walk(const LabeledGraph& g, const CoinOperator& coin);

/// Validates unitarity (1e-12). Locality is NOT required here; use
/// locality_check to test it.
WalkOperator general_walk(const LabeledGraph& g, const CMat& U);

/// Validates probabilities (nonnegative, sum 1 within 1e-12) and that all
/// constituents share one graph. Constituents must not themselves be mixtures.
WalkOperator random_mixture(std::vector<WalkOperator> parts,
                            std::vector<double> probs);

/// Applies one step. Coined walks run register-wise in O(n d^2) (coin per
/// vertex block, then shift); general walks multiply by the matrix; mixtures
/// sample one constituent from rng (required, no global randomness).
WalkState step(const WalkOperator& W, const WalkState& s,
               std::mt19937_64* rng = nullptr);

/// P(v) = sum_a |<a,v|s>|^2. Throws if the state norm is off by > 1e-8.
Distribution node_distribution(const WalkState& s);

/// Mean of P_0..P_{T-1} along the trajectory from alpha0, computed in one
/// pass holding a single state vector. Mixtures need rng (samples one
/// trajectory).
Distribution average_distribution(const WalkOperator& W, const WalkState& alpha0,
                                  long T, std::mt19937_64* rng = nullptr);

/// True iff every matrix entry <a',v'|U|a,v> with v' not adjacent-or-equal
/// to v has magnitude <= 1e-14. Mixtures check every constituent.
bool locality_check(const WalkOperator& W);

struct ProjectionCheckReport {
  double p_x_after = 0.0;   ///< P_X(U alpha)
  double p_x_before = 0.0;  ///< P_X(alpha)
  double p_b_before = 0.0;  ///< P_B(alpha)
  bool holds = false;       ///< P_X(U alpha) <= P_X(alpha) + P_B(alpha) + 1e-10
};

/// Checks that probability can enter X only through its boundary B_X in one
/// step of a local walk.
ProjectionCheckReport projection_inequality_check(const WalkOperator& W,
                                                  const Cut& cut,
                                                  const WalkState& alpha);

struct CompleteMixtureReport {
  bool uniform_at_all_t = false;
  long first_bad_t = -1;     ///< earliest violating t, or -1
  double worst_deviation = 0.0;  ///< max_t max_v |p_t(v) - 1/n|
};

/// Starting from the uniform mixture over all nd basis states (realized as
/// the average of node distributions over all basis initial states), checks
/// the induced node distribution is uniform at every t <= t_max within 1e-10.
/// Requires a unitary walk (not RandomMixture).
CompleteMixtureReport complete_mixture_check(const WalkOperator& W, long t_max);

/// JSON helpers: states as arrays of [re, im] pairs in index order.
std::string state_to_json(const WalkState& s);
WalkState state_from_json(const std::string& text);

}  // namespace qwalk
