#include "qwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace qwalk {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double arg_in_2pi(cxd z) {
  double a = std::arg(z);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

/// Distance between two angles on the circle, result in [0, pi].
double circ_dist(double a, double b) {
  double diff = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return std::min(diff, 2.0 * std::numbers::pi - diff);
}

}  // namespace

CVec SpectralDecomposition::amplitudes(const WalkState& alpha0) const {
  if (alpha0.amp.size() != eigvecs.rows()) {
    throw std::invalid_argument("amplitudes: state dimension mismatch");
  }
  return eigvecs.adjoint() * alpha0.amp;
}

SpectralDecomposition decompose(const CMat& U, int n, int d) {
  const Eigen::Index dim = U.rows();
  require(U.cols() == dim, "decompose: matrix must be square");
  require(dim == static_cast<Eigen::Index>(n) * d, "decompose: dimension must be n*d");
  require(dim <= kDenseCap, "decompose: dimension exceeds the dense cap");
  {
    CMat gram = U.adjoint() * U;
    gram.diagonal().array() -= 1.0;
    require(gram.cwiseAbs().maxCoeff() <= 1e-12,
            "decompose: matrix is not unitary within tolerance");
  }

  // The Schur basis is orthonormal by construction (unlike a generic dense
  // eigensolver, whose degenerate-cluster columns need not be), and for a
  // normal matrix the Schur form is diagonal, so Q's columns are eigenvectors.
  Eigen::ComplexSchur<CMat> schur(U, /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw std::runtime_error("decompose: Schur factorization failed");
  }
  CVec raw_vals = schur.matrixT().diagonal();
  const CMat& raw_vecs = schur.matrixU();

  std::vector<int> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> args(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) args[static_cast<std::size_t>(i)] = arg_in_2pi(raw_vals[i]);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return args[static_cast<std::size_t>(a)] < args[static_cast<std::size_t>(b)]; });

  SpectralDecomposition dec;
  dec.n = n;
  dec.d = d;
  dec.eigvals.resize(dim);
  dec.eigvecs.resize(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    dec.eigvals[i] = raw_vals[order[static_cast<std::size_t>(i)]];
    dec.eigvecs.col(i) = raw_vecs.col(order[static_cast<std::size_t>(i)]);
  }

  for (Eigen::Index i = 0; i < dim; ++i) {
    if (std::abs(std::abs(dec.eigvals[i]) - 1.0) > 1e-10) {
      throw std::runtime_error("decompose: eigenvalue off the unit circle");
    }
  }

  // Group equal eigenvalues by chaining along the argument-sorted order ...
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i == 0 ||
        std::abs(dec.eigvals[i] - dec.eigvals[i - 1]) > kEigEqualTol) {
      dec.classes.emplace_back();
    }
    dec.classes.back().push_back(static_cast<int>(i));
  }
  // ... and close the circle: an eigenvalue sitting exactly on the 0/2pi seam
  // shows up as two clusters at the two ends of the sort. Dropping the merge
  // would silently discard their interference terms downstream.
  if (dec.classes.size() >= 2) {
    const auto& first = dec.classes.front();
    const auto& last = dec.classes.back();
    if (std::abs(dec.eigvals[last.back()] - dec.eigvals[first.front()]) <=
        kEigEqualTol) {
      std::vector<int> merged = last;
      merged.insert(merged.end(), first.begin(), first.end());
      dec.classes.front() = std::move(merged);
      dec.classes.pop_back();
    }
  }

  // Re-orthonormalize each degenerate cluster; the cluster spans an invariant
  // subspace, so a QR inside it cannot disturb orthogonality to the rest.
  for (const auto& cls : dec.classes) {
    if (cls.size() < 2) continue;
    CMat block(dim, static_cast<Eigen::Index>(cls.size()));
    for (std::size_t j = 0; j < cls.size(); ++j) block.col(static_cast<Eigen::Index>(j)) = dec.eigvecs.col(cls[j]);
    Eigen::HouseholderQR<CMat> qr(block);
    CMat q = qr.householderQ() * CMat::Identity(dim, static_cast<Eigen::Index>(cls.size()));
    for (std::size_t j = 0; j < cls.size(); ++j) dec.eigvecs.col(cls[j]) = q.col(static_cast<Eigen::Index>(j));
  }

  for (Eigen::Index j = 0; j < dim; ++j) {
    double residual = (U * dec.eigvecs.col(j) - dec.eigvals[j] * dec.eigvecs.col(j)).norm();
    if (residual > 1e-8) {
      throw std::runtime_error("decompose: eigenpair residual exceeds 1e-8");
    }
  }
  return dec;
}

SpectralDecomposition decompose(const WalkOperator& W) {
  return decompose(W.matrix(), W.n(), W.d());
}

std::vector<AnalyticCyclePair> cycle_analytic_spectrum(int n) {
  require(n >= 3 && n % 2 == 1,
          "cycle_analytic_spectrum: requires an odd cycle (even n has "
          "degenerate momenta and no distinctness guarantee)");
  const double pi = std::numbers::pi;
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<AnalyticCyclePair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    AnalyticCyclePair p;
    p.k = k;
    double s = std::sin(2.0 * pi * k / n) / std::numbers::sqrt2;
    p.theta1 = std::asin(s);
    p.theta2 = pi - p.theta1;
    p.lambda1 = cxd(std::cos(p.theta1), std::sin(p.theta1));
    p.lambda2 = cxd(std::cos(p.theta2), std::sin(p.theta2));
    // Coin-register eigenvector of H_k = diag(w^k, w^-k) H for eigenvalue
    // lambda: c = (1, lambda*sqrt(2)*w^-k - 1), tensored with the momentum
    // character chi_k(v) = w^{-kv}/sqrt(n).
    const cxd w_mk = std::polar(1.0, -2.0 * pi * k / n);
    auto build = [&](cxd lambda) {
      Eigen::Vector2cd c;
      c << 1.0, lambda * std::numbers::sqrt2 * w_mk - 1.0;
      c.normalize();
      CVec vec(2 * n);
      for (int v = 0; v < n; ++v) {
        cxd chi = std::polar(1.0 / root_n, -2.0 * pi * k * v / n);
        vec[v] = c[0] * chi;
        vec[n + v] = c[1] * chi;
      }
      return vec;
    };
    p.vec1 = build(p.lambda1);
    p.vec2 = build(p.lambda2);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

Distribution limiting_distribution(const SpectralDecomposition& dec,
                                   const WalkState& alpha0) {
  const CVec a = dec.amplitudes(alpha0);
  if (std::abs(a.squaredNorm() - 1.0) > 1e-10) {
    throw std::invalid_argument(
        "limiting_distribution: initial state is not normalized");
  }
  Distribution dist = Distribution::Zero(dec.n);
  for (const auto& cls : dec.classes) {
    CVec w = CVec::Zero(dec.dim());
    for (int j : cls) w += a[j] * dec.eigvecs.col(j);
    for (int lab = 0; lab < dec.d; ++lab) {
      for (int v = 0; v < dec.n; ++v) {
        dist[v] += std::norm(w[static_cast<Eigen::Index>(lab) * dec.n + v]);
      }
    }
  }
  for (int v = 0; v < dec.n; ++v) {
    if (dist[v] < -1e-8) {
      throw std::runtime_error(
          "limiting_distribution: negative entry (wrong eigenvalue class "
          "grouping)");
    }
    dist[v] = std::max(dist[v], 0.0);
  }
  return dist;
}

SpacingReport spacing_report(const SpectralDecomposition& dec, double delta,
                             const WalkState& alpha0) {
  require(delta >= 0.0 && delta < 1.0, "spacing_report: delta must lie in [0, 1)");
  const double pi = std::numbers::pi;
  const Eigen::Index dim = dec.eigvals.size();
  require(dim >= 2, "spacing_report: need at least two eigenvalues");

  SpacingReport report;
  report.delta_param = delta;

  // Classify each eigenvalue by the coin-walk momentum angle it encodes:
  // arg(lambda) = theta with sin(theta) = sin(u)/sqrt(2), so u is recovered
  // as asin(sqrt(2) sin theta). The classification windows sit around u =
  // pi/2 (half-width pi*delta/2) and u = 3pi/2 (half-width 3*pi*delta/2) —
  // together an excluded 2*delta fraction of the circle — and are invariant
  // under the u <-> pi-u branch ambiguity, so the fold is harmless.
  std::vector<bool> good(static_cast<std::size_t>(dim), true);
  if (delta > 0.0) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      double theta = std::arg(dec.eigvals[i]);
      double s = std::clamp(std::numbers::sqrt2 * std::sin(theta), -1.0, 1.0);
      double u = std::asin(s);
      if (u < 0.0) u += 2.0 * pi;
      bool bad = circ_dist(u, pi / 2.0) < pi * delta / 2.0 - 1e-9 ||
                 circ_dist(u, 3.0 * pi / 2.0) < 3.0 * pi * delta / 2.0 - 1e-9;
      good[static_cast<std::size_t>(i)] = !bad;
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    (good[static_cast<std::size_t>(i)] ? report.good_indices : report.bad_indices)
        .push_back(static_cast<int>(i));
  }

  const CVec a = dec.amplitudes(alpha0);
  for (int i : report.bad_indices) report.bad_mass += std::norm(a[i]);

  // Equal eigenvalues share one class (and one classification), so spacings
  // run over class representatives.
  std::vector<int> reps;
  std::vector<bool> rep_good;
  for (const auto& cls : dec.classes) {
    reps.push_back(cls.front());
    rep_good.push_back(good[static_cast<std::size_t>(cls.front())]);
  }
  int good_classes = static_cast<int>(std::count(rep_good.begin(), rep_good.end(), true));
  if (good_classes < 2) {
    throw std::runtime_error(
        "spacing_report: fewer than two distinct good eigenvalues");
  }

  double delta_all = std::numeric_limits<double>::infinity();
  double delta_good = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      double dist = std::abs(dec.eigvals[reps[i]] - dec.eigvals[reps[j]]);
      delta_all = std::min(delta_all, dist);
      if (rep_good[i] && rep_good[j]) delta_good = std::min(delta_good, dist);
    }
  }
  report.delta = delta_all;
  report.delta_good = delta_good;
  return report;
}

double convergence_bound_pairs(const SpectralDecomposition& dec,
                               const WalkState& alpha0, long T) {
  require(T >= 1, "convergence_bound_pairs: T must be >= 1");
  const Eigen::Index dim = dec.eigvals.size();
  const CVec a = dec.amplitudes(alpha0);
  std::vector<int> class_of(static_cast<std::size_t>(dim), -1);
  for (std::size_t c = 0; c < dec.classes.size(); ++c) {
    for (int j : dec.classes[c]) class_of[static_cast<std::size_t>(j)] = static_cast<int>(c);
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    double weight = std::norm(a[i]);
    if (weight == 0.0) continue;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (class_of[static_cast<std::size_t>(i)] == class_of[static_cast<std::size_t>(j)]) continue;
      total += weight / std::abs(dec.eigvals[i] - dec.eigvals[j]);
    }
  }
  return 2.0 * total / static_cast<double>(T);
}

double convergence_bound_uniform_spacing(int n, int d, double Delta, long T) {
  require(n >= 1 && d >= 1, "convergence_bound_uniform_spacing: bad dimensions");
  require(T >= 1, "convergence_bound_uniform_spacing: T must be >= 1");
  if (Delta <= 0.0) {
    throw std::invalid_argument(
        "convergence_bound_uniform_spacing: needs a positive minimum spacing; "
        "with degenerate eigenvalues use the pairwise bound over classes");
  }
  return std::numbers::pi *
         (std::log(static_cast<double>(n) * d / 2.0) + 1.0) /
         (static_cast<double>(T) * Delta);
}

long cycle_mixing_bound(int n, double eps) {
  require(n >= 2, "cycle_mixing_bound: n must be >= 2");
  require(eps > 0.0 && eps <= 1.0, "cycle_mixing_bound: eps must lie in (0, 1]");
  double delta = (eps / 16.0) * (eps / 16.0) / 2.0;
  double t = std::ceil(4.0 * n * (std::log(static_cast<double>(n)) + 2.0) /
                       (eps * delta));
  if (!(t < 9.0e18)) {
    throw std::overflow_error("cycle_mixing_bound: horizon does not fit a long");
  }
  return static_cast<long>(t);
}

StateDistanceReport state_distance_vs_distribution_distance(
    const WalkState& alpha0, const WalkState& beta0, const WalkOperator& W,
    long T) {
  alpha0.check_norm(1e-10);
  beta0.check_norm(1e-10);
  StateDistanceReport report;
  Distribution pa = average_distribution(W, alpha0, T);
  Distribution pb = average_distribution(W, beta0, T);
  report.distribution_distance = tv_distance(pa, pb);
  report.state_distance = (alpha0.amp - beta0.amp).norm();
  report.bound = 2.0 * report.state_distance;
  report.holds = report.distribution_distance <= report.bound + kIneqSlack;
  return report;
}

std::string spectrum_to_csv(const SpectralDecomposition& dec) {
  std::ostringstream out;
  out << "index,re,im,arg,class_id\n";
  std::vector<int> class_of(static_cast<std::size_t>(dec.eigvals.size()), -1);
  for (std::size_t c = 0; c < dec.classes.size(); ++c) {
    for (int j : dec.classes[c]) class_of[static_cast<std::size_t>(j)] = static_cast<int>(c);
  }
  for (Eigen::Index i = 0; i < dec.eigvals.size(); ++i) {
    out << i << ',' << format17(dec.eigvals[i].real()) << ','
        << format17(dec.eigvals[i].imag()) << ','
        << format17(std::arg(dec.eigvals[i])) << ','
        << class_of[static_cast<std::size_t>(i)] << '\n';
  }
  return out.str();
}

}  // namespace qwalk
