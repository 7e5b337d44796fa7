#include "qwalk/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sweep_detail.hpp"

namespace qwalk {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

StochasticMatrix transition_matrix(const LabeledGraph& g) {
  require(g.connected(), "transition_matrix: graph must be connected");
  StochasticMatrix result;
  result.P = RMat::Zero(g.n, g.n);
  for (int v = 0; v < g.n; ++v) {
    require(g.degree(v) > 0, "transition_matrix: isolated vertex");
    double p = 1.0 / g.degree(v);
    for (int u : g.adj[v]) result.P(v, u) = p;
  }
  return result;
}

Distribution evolve(const StochasticMatrix& P, const Distribution& d0, long t) {
  require(d0.size() == P.P.rows(), "evolve: dimension mismatch");
  require(t >= 0, "evolve: negative time");
  Distribution d = d0;
  for (long s = 0; s < t; ++s) d = P.P.transpose() * d;
  return d;
}

Distribution stationary(const LabeledGraph& g) {
  require(g.connected(), "stationary: graph must be connected");
  Distribution pi(g.n);
  double two_e = 2.0 * static_cast<double>(g.edge_count());
  for (int v = 0; v < g.n; ++v) pi[v] = g.degree(v) / two_e;
  return pi;
}

SpectralGapResult spectral_gap(const StochasticMatrix& P) {
  const int n = P.n();
  // P = D^{-1} A is similar to the symmetric D^{-1/2} A D^{-1/2}, so the
  // spectrum is real; recover it from the symmetrized form.
  RVec sqrt_deg(n);
  for (int v = 0; v < n; ++v) {
    double max_entry = P.P.row(v).maxCoeff();  // = 1/deg(v)
    require(max_entry > 0, "spectral_gap: zero row");
    sqrt_deg[v] = std::sqrt(1.0 / max_entry);
  }
  // sym = D^{1/2} P D^{-1/2}: entry (u,v) = sqrt(deg_u) P(u,v) / sqrt(deg_v).
  RMat sym(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      sym(u, v) = sqrt_deg[u] * P.P(u, v) / sqrt_deg[v];
    }
  }
  Eigen::SelfAdjointEigenSolver<RMat> solver(0.5 * (sym + sym.transpose()));
  require(solver.info() == Eigen::Success, "spectral_gap: eigensolver failed");
  RVec ev = solver.eigenvalues();  // ascending
  SpectralGapResult result;
  result.lambda2 = ev[n - 2];
  result.gap = 1.0 - result.lambda2;
  result.lambda_min = ev[0];
  return result;
}

SubsetFamily default_subset_family(const LabeledGraph& g,
                                   const std::vector<std::vector<int>>& extra) {
  SubsetFamily family;
  if (g.n <= kExhaustiveCutLimit) {
    family.exhaustive = true;
    family.description = "exhaustive";
    return family;
  }
  family.exhaustive = false;
  family.description = "singletons+arcs+V+user";
  for (int v = 0; v < g.n; ++v) family.sets.push_back({v});
  for (int len = 2; len < g.n; ++len) {
    for (int first = 0; first < g.n; ++first) {
      std::vector<int> arc(len);
      for (int i = 0; i < len; ++i) arc[i] = (first + i) % g.n;
      std::sort(arc.begin(), arc.end());
      family.sets.push_back(std::move(arc));
    }
  }
  std::vector<int> all(g.n);
  for (int v = 0; v < g.n; ++v) all[v] = v;
  family.sets.push_back(std::move(all));
  for (const auto& set : extra) {
    auto s = set;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    family.sets.push_back(std::move(s));
  }
  return family;
}

long classical_default_t_max(int n) { return 50L * n * n; }

MeasuredTime classical_mixing_time(const StochasticMatrix& P,
                                   const Distribution& pi, double eps,
                                   long t_max) {
  const int n = P.n();
  require(pi.size() == n, "classical_mixing_time: dimension mismatch");
  RMat powers = RMat::Identity(n, n);  // row u = D_t from point mass at u
  detail::ForAllTailSweep sweep;
  for (long t = 0; t <= t_max; ++t) {
    if (t > 0) powers = powers * P.P;
    double worst = 0.0;
    for (int u = 0; u < n; ++u) {
      worst = std::max(worst, (powers.row(u).transpose() - pi).cwiseAbs().sum());
    }
    sweep.observe(t, worst > eps);
  }
  return sweep.finish(t_max);
}

namespace {

MeasuredTime classical_set_measure(const StochasticMatrix& P,
                                   const Distribution& pi, double eps,
                                   long t_max, const SubsetFamily& family,
                                   bool filling) {
  const int n = P.n();
  detail::SubsetChecker checker(pi, family);
  RMat powers = RMat::Identity(n, n);
  detail::ForAllTailSweep sweep;
  for (long t = 0; t <= t_max; ++t) {
    if (t > 0) powers = powers * P.P;
    bool violated = false;
    for (int u = 0; u < n && !violated; ++u) {
      Distribution d = powers.row(u).transpose();
      violated = filling ? !checker.filling_ok(d, eps)
                         : !checker.dispersion_ok(d, eps);
    }
    sweep.observe(t, violated);
  }
  return sweep.finish(t_max);
}

}  // namespace

MeasuredTime classical_filling_time(const StochasticMatrix& P,
                                    const Distribution& pi, double eps,
                                    long t_max, const SubsetFamily& family) {
  return classical_set_measure(P, pi, eps, t_max, family, true);
}

MeasuredTime classical_dispersion_time(const StochasticMatrix& P,
                                       const Distribution& pi, double eps,
                                       long t_max, const SubsetFamily& family) {
  return classical_set_measure(P, pi, eps, t_max, family, false);
}

BoundCheck check_spect_bounds(const LabeledGraph& g, double eps, long t_max) {
  require(eps > 0, "check_spect_bounds: eps must be positive");
  StochasticMatrix P = transition_matrix(g);
  Distribution pi = stationary(g);
  SpectralGapResult gap = spectral_gap(P);

  BoundCheck check;
  check.quantity = "classical_mixing_time";

  // Convergence of a non-lazy chain is governed by the second-largest
  // eigenvalue magnitude; the signed lambda2 alone understates the rate on
  // bipartite-like spectra (odd cycles, cliques).
  double lambda = std::max(gap.lambda2, std::abs(gap.lambda_min));
  check.notes.push_back("eigenvalue magnitude used: " + format17(lambda) +
                        " (signed lambda2 = " + format17(gap.lambda2) + ")");

  MeasuredTime measured = classical_mixing_time(P, pi, eps, t_max);
  check.measured = measured.exceeds_horizon ? static_cast<double>(t_max)
                                            : static_cast<double>(measured.value);

  if (std::abs(gap.lambda_min + 1.0) <= 1e-9) {
    check.notes.push_back("bipartite spectrum (lambda_min = -1): mixing does not converge; sandwich not applicable");
    check.holds = true;
    return check;
  }

  bool ok = true;
  double log2eps = std::log(2.0 * eps);
  if (log2eps < 0.0) {
    check.lower_bound = lambda / ((1.0 - lambda) * log2eps);
  } else {
    check.notes.push_back("lower bound skipped: log(2 eps) >= 0");
  }
  double max_log_inv_pi = 0.0;
  for (int v = 0; v < g.n; ++v) {
    max_log_inv_pi = std::max(max_log_inv_pi, std::log(1.0 / pi[v]));
  }
  check.upper_bound = (max_log_inv_pi + std::log(1.0 / eps)) / (1.0 - lambda);

  if (measured.exceeds_horizon) {
    check.notes.push_back("measured mixing time exceeds horizon; upper side not certified");
    ok = false;
  } else {
    if (check.lower_bound && !(*check.lower_bound <= measured.value + kIneqSlack)) ok = false;
    if (!(measured.value <= *check.upper_bound + kIneqSlack)) ok = false;
  }
  check.holds = ok;
  return check;
}

BoundCheck check_cond_bounds(const LabeledGraph& g) {
  StochasticMatrix P = transition_matrix(g);
  SpectralGapResult gap = spectral_gap(P);
  ConductanceResult phi = conductance(g, default_cut_family(g));

  BoundCheck check;
  check.quantity = "spectral_gap";  // sandwiched between Phi^2/2 and 2 Phi
  check.measured = gap.gap;
  check.lower_bound = phi.value * phi.value / 2.0;
  check.upper_bound = 2.0 * phi.value;
  check.holds = (*check.lower_bound <= gap.gap + kIneqSlack) &&
                (gap.gap <= *check.upper_bound + kIneqSlack);
  check.notes.push_back("phi = " + format17(phi.value));
  return check;
}

}  // namespace qwalk
