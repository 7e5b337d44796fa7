#pragma once

#include "qwalk/common.hpp"
#include "qwalk/qwalk.hpp"

namespace qwalk {

/// Two eigenvalues within this distance are treated as equal when grouping
/// into classes.
inline constexpr double kEigEqualTol = 1e-9;

/// Dense decomposition is refused above this dimension (O(dim^3) cost).
inline constexpr int kDenseCap = 4096;

/// Unit-circle eigensystem of a walk unitary with eigenvalues sorted by
/// argument in [0, 2pi) and grouped into equal-eigenvalue classes. The
/// grouping is circular: a cluster stretching across the 0/2pi seam (an
/// eigenvalue whose argument straddles 0) forms a single class.
struct SpectralDecomposition {
  int n = 0;
  int d = 0;
  CVec eigvals;                          ///< sorted by argument
  CMat eigvecs;                          ///< orthonormal columns
  std::vector<std::vector<int>> classes; ///< index groups, equal eigenvalue

  int dim() const { return n * d; }
  /// a_j = <phi_j | alpha0>.
  CVec amplitudes(const WalkState& alpha0) const;
};

/// Full eigendecomposition of a dn x dn unitary via the complex Schur form
/// (whose basis is orthonormal by construction, degenerate or not).
/// Throws when: dimension exceeds kDenseCap, U is not unitary within 1e-12,
/// or any residual ||U phi - lambda phi|| exceeds 1e-8.
SpectralDecomposition decompose(const CMat& U, int n, int d);
SpectralDecomposition decompose(const WalkOperator& W);

/// One eigenvalue pair of the momentum-k block of the Hadamard walk on an
/// odd cycle: theta1 in [-pi/4, pi/4] and theta2 = pi - theta1 solve
/// sin(theta) = sin(2 pi k/n)/sqrt(2); the eigenvectors are coin parts
/// tensored with the momentum character chi_k(v) = w^{-kv}/sqrt(n).
struct AnalyticCyclePair {
  int k = 0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  cxd lambda1;
  cxd lambda2;
  CVec vec1;  ///< dimension 2n, index layout a*n + v
  CVec vec2;
};

/// Closed-form spectrum of the Hadamard walk on the n-cycle. Requires odd
/// n >= 3 (the construction's distinctness argument is odd-only; even n is
/// rejected).
std::vector<AnalyticCyclePair> cycle_analytic_spectrum(int n);

/// Cesaro limiting distribution
///   pi(v | alpha0) = sum_{classes} sum_a | sum_{j in class} a_j phi_j(a,v) |^2,
/// i.e. interference terms are kept exactly within equal-eigenvalue classes
/// and dropped across classes. Throws if any entry drops below -1e-8 (a
/// symptom of wrong class grouping); clamps tiny negatives to 0.
Distribution limiting_distribution(const SpectralDecomposition& dec,
                                   const WalkState& alpha0);

struct SpacingReport {
  double delta = 0.0;        ///< min |lambda_i - lambda_j| over distinct pairs
  double delta_param = 0.0;  ///< the requested good/bad parameter
  double delta_good = 0.0;   ///< min spacing among delta-good eigenvalues
  std::vector<int> good_indices;
  std::vector<int> bad_indices;
  double bad_mass = 0.0;     ///< squared projection of alpha0 on bad eigenvectors
};

/// Minimum spacings and the good/bad split for the Hadamard cycle walk.
/// delta = 0 requests plain spacing (everything good). For delta in (0,1)
/// an eigenvalue with argument theta is classified by its recovered coin
/// parameter u = asin(clamp(sqrt(2) sin theta)) folded to [0, 2pi): bad iff
/// u lies within pi*delta/2 of pi/2 or within 3*pi*delta/2 of 3*pi/2 (the
/// excluded windows around the spectrum's accumulation points), with exact
/// boundary points resolved as good (1e-9 slack). Throws if fewer than two
/// eigenvalues are good.
SpacingReport spacing_report(const SpectralDecomposition& dec, double delta,
                             const WalkState& alpha0);

/// Pairwise convergence bound: for T >= 1,
///   ||avg_T - pi|| <= 2 sum_{i,j : lambda_i != lambda_j} |a_i|^2 / (T |lambda_i - lambda_j|)
/// (ordered pairs; exact pairwise distances).
double convergence_bound_pairs(const SpectralDecomposition& dec,
                               const WalkState& alpha0, long T);

/// Distinct-spectrum bound pi(ln(nd/2) + 1)/(T Delta). Throws when
/// Delta <= 0 (callers must fall back to the pairwise bound with classes).
double convergence_bound_uniform_spacing(int n, int d, double Delta, long T);

/// Explicit horizon T = ceil(4 n (ln n + 2)/(eps * delta)), delta = (eps/16)^2/2.
/// For odd cycles this T guarantees ||avg_T - uniform|| <= eps from any basis
/// start. The closed form itself is evaluable for any n >= 2 and 0 < eps <= 1
/// (scaling identities use even arguments too).
long cycle_mixing_bound(int n, double eps);

struct StateDistanceReport {
  double distribution_distance = 0.0;  ///< ||avg_T^alpha - avg_T^beta||
  double state_distance = 0.0;         ///< ||alpha0 - beta0||_2
  double bound = 0.0;                  ///< 2 * state_distance
  bool holds = false;
};

/// Checks ||avg_T(alpha0) - avg_T(beta0)|| <= 2 ||alpha0 - beta0||.
StateDistanceReport state_distance_vs_distribution_distance(
    const WalkState& alpha0, const WalkState& beta0, const WalkOperator& W,
    long T);

/// CSV export with columns: index (k when analytic labels are meaningful),
/// re(lambda), im(lambda), arg(lambda), class_id.
std::string spectrum_to_csv(const SpectralDecomposition& dec);

}  // namespace qwalk
