#include "qwalk/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sweep_detail.hpp"

namespace qwalk {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

/// Portable uniform double in [0, 1) from the top 53 bits of the generator.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Coin application (label register only): out[a'n+v] = sum_a C(a',a) in[an+v].
void apply_coin(const CMat& C, const CVec& in, int n, int d, CVec& out) {
  out.setZero();
  for (int v = 0; v < n; ++v) {
    for (int ap = 0; ap < d; ++ap) {
      cxd acc = 0.0;
      for (int a = 0; a < d; ++a) acc += C(ap, a) * in[a * n + v];
      out[ap * n + v] = acc;
    }
  }
}

/// One step of the shift-then-coin ordering (C (x) I) S, register-wise.
void step_shift_then_coin(const WalkOperator& W, CVec& amp, CVec& buf) {
  const int n = W.n(), d = W.d();
  buf.setZero();
  for (int a = 0; a < d; ++a) {
    for (int v = 0; v < n; ++v) buf[a * n + W.g.sigma[a][v]] = amp[a * n + v];
  }
  apply_coin(W.coin.C, buf, n, d, amp);
}

Distribution density_node_distribution(const CMat& rho, int n, int d) {
  Distribution p = Distribution::Zero(n);
  for (int a = 0; a < d; ++a) {
    for (int v = 0; v < n; ++v) p[v] += rho(a * n + v, a * n + v).real();
  }
  return p;
}

CMat apply_mixture_channel(const std::vector<CMat>& part_matrices,
                           const std::vector<double>& probs, const CMat& rho) {
  CMat out = CMat::Zero(rho.rows(), rho.cols());
  for (std::size_t i = 0; i < part_matrices.size(); ++i) {
    out.noalias() += probs[i] * (part_matrices[i] * rho * part_matrices[i].adjoint());
  }
  return out;
}

/// Everything one initial state contributes to the four measures.
struct StartSweepResult {
  long mixing_last = -1;    ///< last averaged t violating the TV condition
  long sampling_last = -1;  ///< last averaged t violating the relative condition
  std::vector<int> sampling_X;
  long filling_worst = 0;  ///< max over subsets of the first filling time
  std::vector<int> filling_X;
  bool filling_pending = false;
  std::vector<int> filling_pending_X;
  long dispersion_worst = 0;
  std::vector<int> dispersion_X;
  bool dispersion_pending = false;
  std::vector<int> dispersion_pending_X;
};

/// Sweeps one start through t = 0..t_max, feeding the instantaneous
/// distribution P_t and the running average avg_t = mean(P_0..P_{t-1}) to the
/// four measure conditions. `next` advances the trajectory by one step and
/// `current` reads P_t; both close over the unitary state or the mixed
/// density of the caller.
StartSweepResult sweep_one_start(const Distribution& pi, double eps, long t_max,
                                 const detail::SubsetChecker& checker,
                                 const std::function<Distribution()>& current,
                                 const std::function<void()>& next) {
  const std::size_t count = checker.count();
  StartSweepResult r;
  std::vector<long> first_fill(count, -1), first_disp(count, -1);
  std::vector<std::size_t> pend_fill(count), pend_disp(count);
  for (std::size_t id = 0; id < count; ++id) pend_fill[id] = pend_disp[id] = id;
  std::vector<double> mass_buf;
  Distribution acc = Distribution::Zero(pi.size());
  Distribution avg(pi.size());
  for (long t = 0; t <= t_max; ++t) {
    Distribution pt = current();
    if (!pend_fill.empty() || !pend_disp.empty()) {
      checker.masses(pt, mass_buf);
      auto fill_ok = [&](std::size_t id) {
        bool ok = mass_buf[id] - (1 - eps) * checker.pi_of(id) >= -1e-15;
        if (ok) first_fill[id] = t;
        return ok;
      };
      pend_fill.erase(std::remove_if(pend_fill.begin(), pend_fill.end(), fill_ok),
                      pend_fill.end());
      auto disp_ok = [&](std::size_t id) {
        bool ok = (1 + eps) * checker.pi_of(id) - mass_buf[id] >= -1e-15;
        if (ok) first_disp[id] = t;
        return ok;
      };
      pend_disp.erase(std::remove_if(pend_disp.begin(), pend_disp.end(), disp_ok),
                      pend_disp.end());
    }
    acc += pt;
    long tp = t + 1;  // averaged index: avg over P_0..P_t is the t+1 average
    if (tp <= t_max) {
      avg = acc / static_cast<double>(tp);
      if (tv_distance(avg, pi) > eps) r.mixing_last = tp;
      if (!checker.sampling_ok(avg, eps)) {
        r.sampling_last = tp;
        checker.sampling_slack(avg, eps, &r.sampling_X);
      }
    }
    if (t < t_max) next();
  }
  for (std::size_t id = 0; id < count; ++id) {
    if (first_fill[id] > r.filling_worst) {
      r.filling_worst = first_fill[id];
      r.filling_X = checker.vertices(id);
    }
    if (first_disp[id] > r.dispersion_worst) {
      r.dispersion_worst = first_disp[id];
      r.dispersion_X = checker.vertices(id);
    }
  }
  if (!pend_fill.empty()) {
    r.filling_pending = true;
    r.filling_pending_X = checker.vertices(pend_fill.front());
  }
  if (!pend_disp.empty()) {
    r.dispersion_pending = true;
    r.dispersion_pending_X = checker.vertices(pend_disp.front());
  }
  return r;
}

MeasuredTime tail_time(long last_violation, long t_max) {
  detail::ForAllTailSweep sweep;
  sweep.last_violation = last_violation;
  return sweep.finish(t_max);
}

}  // namespace

InitialFamily default_initial_family(const LabeledGraph& g) {
  InitialFamily fam;
  if (g.vertex_transitive) {
    for (int a = 0; a < g.d; ++a) fam.states.emplace_back(a, 0);
    fam.description = "coin labels at vertex 0 (vertex-transitive reduction)";
  } else {
    for (int a = 0; a < g.d; ++a) {
      for (int v = 0; v < g.n; ++v) fam.states.emplace_back(a, v);
    }
    fam.description = "all basis states";
  }
  return fam;
}

long quantum_default_t_max(int n) {
  return std::max<long>(
      1, static_cast<long>(200.0 * n * std::log(static_cast<double>(n))));
}

MixingReport measure_mixing(const WalkOperator& W, double eps, long t_max,
                            const SubsetFamily& subsets,
                            const InitialFamily& starts,
                            const Distribution* pi_override) {
  const int n = W.n(), d = W.d();
  require(eps >= 0, "measure_mixing: eps must be nonnegative");
  require(t_max >= 1, "measure_mixing: t_max must be >= 1");
  require(!starts.states.empty(), "measure_mixing: empty initial family");
  for (auto [a, v] : starts.states) {
    require(a >= 0 && a < d && v >= 0 && v < n,
            "measure_mixing: initial state out of range");
  }
  if (pi_override) {
    require(pi_override->size() == n,
            "measure_mixing: pi_override dimension mismatch");
  } else {
    require(W.kind != WalkOperator::Kind::RandomMixture,
            "measure_mixing: random mixtures have no spectral reference; "
            "pass pi_override");
  }

  // Reference distribution per start: the spectral limit unless overridden.
  SpectralDecomposition dec;
  if (!pi_override) dec = decompose(W);
  std::vector<CMat> part_matrices;
  if (W.kind == WalkOperator::Kind::RandomMixture) {
    for (const auto& part : W.parts) part_matrices.push_back(part.matrix());
  }

  const long n_starts = static_cast<long>(starts.states.size());
  std::vector<StartSweepResult> results(starts.states.size());
  parallel_for(n_starts, [&](long si) {
    auto [a, v] = starts.states[static_cast<std::size_t>(si)];
    WalkState alpha0 = basis_state(n, d, a, v);
    Distribution pi =
        pi_override ? *pi_override : limiting_distribution(dec, alpha0);
    detail::SubsetChecker checker(pi, subsets);
    StartSweepResult r;
    if (W.kind == WalkOperator::Kind::RandomMixture) {
      CMat rho = alpha0.amp * alpha0.amp.adjoint();
      r = sweep_one_start(
          pi, eps, t_max, checker,
          [&] { return density_node_distribution(rho, n, d); },
          [&] { rho = apply_mixture_channel(part_matrices, W.probs, rho); });
    } else {
      WalkState state = alpha0;
      r = sweep_one_start(
          pi, eps, t_max, checker, [&] { return node_distribution(state); },
          [&] { state = step(W, state); });
    }
    results[static_cast<std::size_t>(si)] = std::move(r);
  });

  MixingReport report;
  report.eps = eps;
  report.t_max = t_max;
  report.subset_family = subsets.description;
  report.initial_family = starts.description;

  long mixing_last = -1, sampling_last = -1, filling_worst = 0,
       dispersion_worst = 0;
  bool filling_pending = false, dispersion_pending = false;
  for (std::size_t si = 0; si < results.size(); ++si) {
    const StartSweepResult& r = results[si];
    auto [a, v] = starts.states[si];
    if (r.mixing_last > mixing_last) {
      mixing_last = r.mixing_last;
      report.mixing_witness = Witness{r.mixing_last, {}, a, v};
    }
    if (r.sampling_last > sampling_last) {
      sampling_last = r.sampling_last;
      report.sampling_witness = Witness{r.sampling_last, r.sampling_X, a, v};
    }
    if (!filling_pending) {
      if (r.filling_pending) {
        filling_pending = true;
        report.filling_witness = Witness{-1, r.filling_pending_X, a, v};
      } else if (r.filling_worst > filling_worst ||
                 (si == 0 && !r.filling_X.empty())) {
        filling_worst = r.filling_worst;
        report.filling_witness = Witness{r.filling_worst, r.filling_X, a, v};
      }
    }
    if (!dispersion_pending) {
      if (r.dispersion_pending) {
        dispersion_pending = true;
        report.dispersion_witness = Witness{-1, r.dispersion_pending_X, a, v};
      } else if (r.dispersion_worst > dispersion_worst ||
                 (si == 0 && !r.dispersion_X.empty())) {
        dispersion_worst = r.dispersion_worst;
        report.dispersion_witness = Witness{r.dispersion_worst, r.dispersion_X, a, v};
      }
    }
  }
  report.mixing = tail_time(mixing_last, t_max);
  report.sampling = tail_time(sampling_last, t_max);
  report.filling.t_max = t_max;
  report.filling.exceeds_horizon = filling_pending;
  if (!filling_pending) report.filling.value = filling_worst;
  report.dispersion.t_max = t_max;
  report.dispersion.exceeds_horizon = dispersion_pending;
  if (!dispersion_pending) report.dispersion.value = dispersion_worst;

  if (!report.sampling.finite()) {
    report.ordering_holds = true;  // vacuous: no finite S to compare against
  } else {
    report.ordering_holds =
        report.mixing.finite() && report.filling.finite() &&
        report.dispersion.finite() &&
        std::max({report.mixing.value, report.filling.value,
                  report.dispersion.value}) <= report.sampling.value;
  }
  return report;
}

MeasuredTime estimate_mixing_time(const WalkOperator& W, double eps, long t_max,
                                  const InitialFamily& starts,
                                  const Distribution* pi_override) {
  SubsetFamily none;
  none.description = "none";
  return measure_mixing(W, eps, t_max, none, starts, pi_override).mixing;
}

MeasuredTime estimate_sampling_time(const WalkOperator& W, double eps,
                                    long t_max, const SubsetFamily& subsets,
                                    const InitialFamily& starts,
                                    const Distribution* pi_override) {
  return measure_mixing(W, eps, t_max, subsets, starts, pi_override).sampling;
}

MeasuredTime estimate_filling_time(const WalkOperator& W, double eps,
                                   long t_max, const SubsetFamily& subsets,
                                   const InitialFamily& starts,
                                   const Distribution* pi_override) {
  return measure_mixing(W, eps, t_max, subsets, starts, pi_override).filling;
}

MeasuredTime estimate_dispersion_time(const WalkOperator& W, double eps,
                                      long t_max, const SubsetFamily& subsets,
                                      const InitialFamily& starts,
                                      const Distribution* pi_override) {
  return measure_mixing(W, eps, t_max, subsets, starts, pi_override).dispersion;
}

std::string mixing_curve_csv(const WalkOperator& W, const WalkState& start,
                             const Distribution& pi, long T) {
  const int n = W.n(), d = W.d();
  require(start.n == n && start.d == d, "mixing_curve_csv: state dimension mismatch");
  require(pi.size() == n, "mixing_curve_csv: distribution dimension mismatch");
  require(T >= 1, "mixing_curve_csv: T must be >= 1");
  start.check_norm();
  std::ostringstream out;
  out << "t,tv\n";
  Distribution acc = Distribution::Zero(n);
  if (W.kind == WalkOperator::Kind::RandomMixture) {
    std::vector<CMat> part_matrices;
    for (const auto& part : W.parts) part_matrices.push_back(part.matrix());
    CMat rho = start.amp * start.amp.adjoint();
    for (long t = 0; t < T; ++t) {
      acc += density_node_distribution(rho, n, d);
      out << (t + 1) << ","
          << format17(tv_distance(acc / static_cast<double>(t + 1), pi)) << "\n";
      if (t < T - 1) rho = apply_mixture_channel(part_matrices, W.probs, rho);
    }
  } else {
    WalkState state = start;
    for (long t = 0; t < T; ++t) {
      acc += node_distribution(state);
      out << (t + 1) << ","
          << format17(tv_distance(acc / static_cast<double>(t + 1), pi)) << "\n";
      if (t < T - 1) state = step(W, state);
    }
  }
  return out.str();
}

// ---- Amplification -----------------------------------------------------------

AmplificationResult amplify(const WalkOperator& W, long stage_length, int k,
                            std::uint64_t seed, long mc_trials) {
  const int n = W.n(), d = W.d();
  require(W.kind != WalkOperator::Kind::RandomMixture,
          "amplify: requires a unitary walk");
  require(stage_length >= 1, "amplify: stage_length must be >= 1");
  require(k >= 1, "amplify: stage count must be >= 1");
  require(mc_trials >= 0, "amplify: mc_trials must be >= 0");

  // The scheme is sound only when every basis start shares one limit.
  SpectralDecomposition dec = decompose(W);
  Distribution pi = limiting_distribution(dec, basis_state(n, d, 0, 0));
  for (int a = 0; a < d; ++a) {
    for (int v = 0; v < n; ++v) {
      Distribution pv = limiting_distribution(dec, basis_state(n, d, a, v));
      double dev = tv_distance(pv, pi);
      if (dev > 1e-10) {
        std::ostringstream msg;
        msg << "amplify: limiting distribution depends on the initial basis "
               "state (start a=" << a << ", v=" << v
            << " deviates from a=0, v=0 by " << format17(dev) << ")";
        throw std::invalid_argument(msg.str());
      }
    }
  }

  AmplificationResult res;
  res.k = k;
  res.stage_length = stage_length;
  res.pi = pi;
  res.seed = seed;

  // P(v,u) = (1/d) sum_a (1/L) sum_{t<L} P_t(u | a,v).
  const long L = stage_length;
  RMat P = RMat::Zero(n, n);
  parallel_for(n, [&](long v) {
    Distribution row = Distribution::Zero(n);
    for (int a = 0; a < d; ++a) {
      WalkState state = basis_state(n, d, a, static_cast<int>(v));
      for (long t = 0; t < L; ++t) {
        row += node_distribution(state);
        if (t < L - 1) state = step(W, state);
      }
    }
    P.row(v) = row.transpose() / static_cast<double>(d * L);
  });
  res.P_amp = P;

  res.row_sum_error = (P.rowwise().sum() - RVec::Ones(n)).cwiseAbs().maxCoeff();
  res.fixpoint_error = ((P.transpose() * pi) - pi).cwiseAbs().sum();
  double eps0 = 0.0;
  for (int v = 0; v < n; ++v) {
    eps0 = std::max(eps0, tv_distance(P.row(v).transpose(), pi));
  }
  res.eps0 = eps0;

  RMat Pk = P;
  for (int stage = 2; stage <= k; ++stage) Pk = Pk * P;
  double final_distance = 0.0;
  for (int v = 0; v < n; ++v) {
    final_distance = std::max(final_distance, tv_distance(Pk.row(v).transpose(), pi));
  }
  res.final_distance = final_distance;

  // Contraction on the zero-sum proof basis v_i = e_i - (1/n) 1.
  res.contraction_ok = true;
  for (int i = 0; i < n; ++i) {
    RVec vi = RVec::Constant(n, -1.0 / n);
    vi[i] += 1.0;
    double lhs = (P.transpose() * vi).cwiseAbs().sum();
    double rhs = eps0 * vi.cwiseAbs().sum();
    if (lhs > rhs + kIneqSlack) res.contraction_ok = false;
  }

  res.mc_trials = mc_trials;
  if (mc_trials > 0) {
    // Snapshot node CDFs for every (a, v, t): a k-stage trial then only
    // samples coin, time, and node, never re-evolving the walk.
    require(static_cast<double>(n) * d * L * n <= 1e8,
            "amplify: Monte Carlo snapshot table too large");
    std::vector<std::vector<double>> cdf(
        static_cast<std::size_t>(n) * d * static_cast<std::size_t>(L));
    parallel_for(static_cast<long>(n) * d, [&](long av) {
      int a = static_cast<int>(av / n), v = static_cast<int>(av % n);
      WalkState state = basis_state(n, d, a, v);
      for (long t = 0; t < L; ++t) {
        Distribution pt = node_distribution(state);
        std::vector<double> c(static_cast<std::size_t>(n));
        double run = 0.0;
        for (int u = 0; u < n; ++u) {
          run += pt[u];
          c[static_cast<std::size_t>(u)] = run;
        }
        cdf[static_cast<std::size_t>(av) * static_cast<std::size_t>(L) +
            static_cast<std::size_t>(t)] = std::move(c);
        if (t < L - 1) state = step(W, state);
      }
    });
    std::mt19937_64 rng(seed);
    std::vector<long> counts(static_cast<std::size_t>(n), 0);
    for (long trial = 0; trial < mc_trials; ++trial) {
      int v = 0;
      for (int stage = 0; stage < k; ++stage) {
        int a = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
        long t = static_cast<long>(rng() % static_cast<std::uint64_t>(L));
        const std::vector<double>& c =
            cdf[(static_cast<std::size_t>(a) * n + static_cast<std::size_t>(v)) *
                    static_cast<std::size_t>(L) +
                static_cast<std::size_t>(t)];
        double u01 = uniform01(rng);
        int u = 0;
        while (u + 1 < n && u01 >= c[static_cast<std::size_t>(u)]) ++u;
        v = u;
      }
      ++counts[static_cast<std::size_t>(v)];
    }
    res.mc_estimate = Distribution::Zero(n);
    double max_z = 0.0;
    for (int u = 0; u < n; ++u) {
      double est = static_cast<double>(counts[static_cast<std::size_t>(u)]) /
                   static_cast<double>(mc_trials);
      res.mc_estimate[u] = est;
      double p = Pk(0, u);
      double se = std::sqrt(std::max(p * (1 - p), 0.0) /
                            static_cast<double>(mc_trials));
      double diff = std::abs(est - p);
      if (se > 0) {
        max_z = std::max(max_z, diff / se);
      } else if (diff > 0) {
        max_z = std::numeric_limits<double>::infinity();
      }
    }
    res.mc_max_z = max_z;
  }
  return res;
}

AmplifiedSamplingReport amplified_sampling_bound(const WalkOperator& W,
                                                 double eps, long M_eps,
                                                 std::uint64_t seed) {
  require(eps > 0 && eps < 1, "amplified_sampling_bound: eps must be in (0, 1)");
  require(M_eps >= 1, "amplified_sampling_bound: stage length must be >= 1");
  // One stage just to obtain pi and validate start-independence; the real
  // stage count k follows from it.
  AmplificationResult one = amplify(W, M_eps, 1, seed);
  double min_pi = one.pi.minCoeff();
  require(min_pi > 0,
          "amplified_sampling_bound: limiting distribution has a zero entry");
  int k = std::max(
      1, static_cast<int>(
             std::ceil(std::log(1.0 / min_pi) / std::log(1.0 / eps) - 1e-12)));

  AmplifiedSamplingReport rep;
  rep.k = k;
  rep.T = static_cast<long>(k) * M_eps;

  RMat Pk = one.P_amp;
  for (int stage = 2; stage <= k; ++stage) Pk = Pk * one.P_amp;
  detail::SubsetChecker checker(one.pi, default_subset_family(W.g));
  std::vector<double> mass_buf;
  double worst = 0.0;
  for (int v = 0; v < W.n(); ++v) {
    Distribution row = Pk.row(v).transpose();
    checker.masses(row, mass_buf);
    for (std::size_t id = 0; id < checker.count(); ++id) {
      double px = checker.pi_of(id);
      if (px > 0) worst = std::max(worst, std::abs(mass_buf[id] - px) / px);
    }
  }
  rep.worst_relative_dev = worst;
  rep.meets_condition = worst <= eps + kIneqSlack;
  return rep;
}

// ---- Lower bounds --------------------------------------------------------------

namespace {

void validate_cut(const WalkOperator& W, const Cut& cut, const char* who) {
  const int n = W.n();
  require(!cut.X.empty() && static_cast<int>(cut.X.size()) < n,
          std::string(who) + ": cut must be nonempty and proper");
  for (int v : cut.X) require(v >= 0 && v < n, std::string(who) + ": cut vertex out of range");
  for (int v : cut.boundary) {
    require(v >= 0 && v < n, std::string(who) + ": boundary vertex out of range");
  }
}

/// measured value with the horizon standing in when the sweep was cut off.
double measured_or_horizon(const MeasuredTime& m, std::vector<std::string>& notes,
                           const char* name) {
  if (m.finite()) return static_cast<double>(m.value);
  notes.push_back(std::string(name) +
                  " exceeded the sweep horizon; using t_max as a lower proxy");
  return static_cast<double>(m.t_max);
}

/// Evolves the normalized projector onto `indices` and reports the maximum
/// over t <= t_end of the mean squared projection onto `target_indices`.
/// For unitary walks this is a column-wise Frobenius evaluation (the mean
/// over basis starts is exact, not sampled); mixtures evolve the density
/// rho_0 = P_indices / (|indices|) through the channel.
double max_mean_projection(const WalkOperator& W,
                           const std::vector<int>& start_indices,
                           const std::vector<int>& target_indices, long t_end) {
  const int dim = W.dim();
  std::vector<char> target_mask(static_cast<std::size_t>(dim), 0);
  for (int i : target_indices) target_mask[static_cast<std::size_t>(i)] = 1;
  const double m = static_cast<double>(start_indices.size());
  double worst = 0.0;
  if (W.kind == WalkOperator::Kind::RandomMixture) {
    std::vector<CMat> part_matrices;
    for (const auto& part : W.parts) part_matrices.push_back(part.matrix());
    CMat rho = CMat::Zero(dim, dim);
    for (int i : start_indices) rho(i, i) = 1.0 / m;
    for (long t = 0; t <= t_end; ++t) {
      double mean = 0.0;
      for (int i = 0; i < dim; ++i) {
        if (target_mask[static_cast<std::size_t>(i)]) mean += rho(i, i).real();
      }
      worst = std::max(worst, mean);
      if (t < t_end) rho = apply_mixture_channel(part_matrices, W.probs, rho);
    }
    return worst;
  }
  CMat block(dim, static_cast<int>(start_indices.size()));
  block.setZero();
  for (std::size_t c = 0; c < start_indices.size(); ++c) {
    block(start_indices[c], static_cast<int>(c)) = 1.0;
  }
  CMat U;
  if (W.kind == WalkOperator::Kind::GeneralUnitary) U = W.matrix();
  for (long t = 0; t <= t_end; ++t) {
    double frob = 0.0;
    for (int c = 0; c < block.cols(); ++c) {
      for (int i = 0; i < dim; ++i) {
        if (target_mask[static_cast<std::size_t>(i)]) frob += std::norm(block(i, c));
      }
    }
    worst = std::max(worst, frob / m);
    if (t < t_end) {
      if (W.kind == WalkOperator::Kind::GeneralUnitary) {
        block = U * block;
      } else {
        for (int c = 0; c < block.cols(); ++c) {
          WalkState s{block.col(c), W.n(), W.d()};
          s = step(W, s);
          block.col(c) = s.amp;
        }
      }
    }
  }
  return worst;
}

std::vector<int> complement_of(const std::vector<int>& X, int n) {
  std::vector<char> in_x(static_cast<std::size_t>(n), 0);
  for (int v : X) in_x[static_cast<std::size_t>(v)] = 1;
  std::vector<int> comp;
  for (int v = 0; v < n; ++v) {
    if (!in_x[static_cast<std::size_t>(v)]) comp.push_back(v);
  }
  return comp;
}

std::vector<int> flat_indices(const std::vector<int>& vertices, int n, int d) {
  std::vector<int> idx;
  idx.reserve(vertices.size() * static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    for (int v : vertices) idx.push_back(a * n + v);
  }
  return idx;
}

double subset_prob(const CVec& amp, const std::vector<int>& indices) {
  double p = 0.0;
  for (int i : indices) p += std::norm(amp[i]);
  return p;
}

}  // namespace

FillingLowerBoundReport lower_bound_filling_check(const WalkOperator& W,
                                                  const Cut& cut, double eps,
                                                  const MeasuredTime& measured_tau) {
  validate_cut(W, cut, "lower_bound_filling_check");
  const int n = W.n(), d = W.d();
  const double x = static_cast<double>(cut.X.size());
  const double xbar = static_cast<double>(n) - x;
  const double b = static_cast<double>(cut.boundary.size());
  require(b > 0, "lower_bound_filling_check: cut has an empty boundary");

  FillingLowerBoundReport rep;
  rep.bound = (1 - eps) * x * xbar / (b * n);
  rep.binding = rep.bound >= 1.0;
  if (!rep.binding) {
    rep.notes.push_back("bound below 1: non-binding for an integer time");
  }
  rep.measured = measured_or_horizon(measured_tau, rep.notes, "filling time");
  rep.holds = rep.measured >= rep.bound - kIneqSlack;

  std::vector<int> comp = complement_of(cut.X, n);
  rep.mean_boundary_bound = b / xbar;
  long t_end = static_cast<long>(rep.measured);
  rep.mean_boundary_worst = max_mean_projection(
      W, flat_indices(comp, n, d), flat_indices(cut.boundary, n, d), t_end);
  rep.mean_boundary_holds =
      rep.mean_boundary_worst <= rep.mean_boundary_bound + 1e-10;
  return rep;
}

CoinedLowerBoundReport coined_lower_bound_check(const WalkOperator& W,
                                                const Cut& cut, double eps,
                                                const MeasuredTime& measured_tau,
                                                int random_states, long steps,
                                                std::uint64_t seed) {
  require(W.kind == WalkOperator::Kind::Coined,
          "coined_lower_bound_check: requires a coined walk");
  validate_cut(W, cut, "coined_lower_bound_check");
  require(random_states >= 0 && steps >= 0,
          "coined_lower_bound_check: negative sample parameters");
  const int n = W.n(), d = W.d();
  const double x = static_cast<double>(cut.X.size());
  const double xbar = static_cast<double>(n) - x;

  std::vector<char> in_x(static_cast<std::size_t>(n), 0);
  for (int v : cut.X) in_x[static_cast<std::size_t>(v)] = 1;
  std::vector<int> comp = complement_of(cut.X, n);

  // Cut space: labelled positions in the complement whose shift enters X.
  std::vector<int> cut_space;
  for (int b = 0; b < d; ++b) {
    for (int w : comp) {
      if (in_x[static_cast<std::size_t>(W.g.sigma[b][w])]) {
        cut_space.push_back(b * n + w);
      }
    }
  }

  CoinedLowerBoundReport rep;
  rep.cut_space_dim = static_cast<int>(cut_space.size());
  rep.cut_edges = cut.cut_edges;
  double denom = static_cast<double>(rep.cut_edges);
  if (rep.cut_space_dim > rep.cut_edges) {
    denom = static_cast<double>(rep.cut_space_dim);
    rep.notes.push_back(
        "several labels cover one cut edge; the cut-space dimension replaces "
        "the edge count in the bound and the mean projection cap");
  }
  require(denom > 0, "coined_lower_bound_check: cut has no crossing edges");

  rep.bound = (1 - eps) * x * xbar * d / (denom * n);
  rep.binding = rep.bound >= 1.0;
  if (!rep.binding) {
    rep.notes.push_back("bound below 1: non-binding for an integer time");
  }
  rep.measured = measured_or_horizon(measured_tau, rep.notes, "filling time");
  rep.holds = rep.measured >= rep.bound - kIneqSlack;

  // Mean squared projection on the cut space, shift-then-coin dynamics,
  // evaluated exactly over all complement basis starts.
  long t_end = static_cast<long>(rep.measured);
  std::vector<int> start_idx = flat_indices(comp, n, d);
  rep.mean_cutspace_bound = static_cast<double>(rep.cut_space_dim) /
                            (xbar * static_cast<double>(d));
  {
    const int dim = W.dim();
    std::vector<char> target_mask(static_cast<std::size_t>(dim), 0);
    for (int i : cut_space) target_mask[static_cast<std::size_t>(i)] = 1;
    CMat block(dim, static_cast<int>(start_idx.size()));
    block.setZero();
    for (std::size_t c = 0; c < start_idx.size(); ++c) {
      block(start_idx[c], static_cast<int>(c)) = 1.0;
    }
    CVec buf(dim);
    double worst = 0.0;
    for (long t = 0; t <= t_end; ++t) {
      double frob = 0.0;
      for (int c = 0; c < block.cols(); ++c) {
        for (int i = 0; i < dim; ++i) {
          if (target_mask[static_cast<std::size_t>(i)]) frob += std::norm(block(i, c));
        }
      }
      worst = std::max(worst, frob / static_cast<double>(start_idx.size()));
      if (t < t_end) {
        for (int c = 0; c < block.cols(); ++c) {
          CVec col = block.col(c);
          step_shift_then_coin(W, col, buf);
          block.col(c) = col;
        }
      }
    }
    rep.mean_cutspace_worst = worst;
  }
  rep.mean_cutspace_holds =
      rep.mean_cutspace_worst <= rep.mean_cutspace_bound + 1e-10;

  // Per-step leakage on seeded random states: probability can enter X only
  // through X itself or the cut space, one shift-then-coin step at a time.
  std::vector<int> x_idx = flat_indices(cut.X, n, d);
  std::mt19937_64 rng(seed);
  CVec buf(W.dim());
  for (int s = 0; s < random_states; ++s) {
    WalkState psi = random_state(n, d, rng);
    CVec amp = psi.amp;
    double px_prev = subset_prob(amp, x_idx);
    double pc_prev = subset_prob(amp, cut_space);
    for (long t = 1; t <= steps; ++t) {
      step_shift_then_coin(W, amp, buf);
      double px = subset_prob(amp, x_idx);
      ++rep.leakage_checks;
      if (px > px_prev + pc_prev + 1e-10) ++rep.leakage_violations;
      px_prev = px;
      pc_prev = subset_prob(amp, cut_space);
    }
  }

  // Orderings agree under conjugation: evolving the coined state through
  // shift-then-coin equals coining after the standard evolution.
  if (random_states > 0) {
    long k_max = std::min<long>(steps, 20);
    for (int s = 0; s < 3; ++s) {
      WalkState psi = random_state(n, d, rng);
      CVec primed(W.dim());
      apply_coin(W.coin.C, psi.amp, n, d, primed);
      WalkState plain = psi;
      for (long k = 1; k <= k_max; ++k) {
        step_shift_then_coin(W, primed, buf);
        plain = step(W, plain);
        CVec coined_plain(W.dim());
        apply_coin(W.coin.C, plain.amp, n, d, coined_plain);
        rep.conjugation_max_diff = std::max(rep.conjugation_max_diff,
                                            (primed - coined_plain).norm());
      }
    }
  }
  return rep;
}

NonunitaryLowerBoundReport nonunitary_lower_bound_check(
    const WalkOperator& W, const Cut& cut, double eps,
    const MeasuredTime& measured_S) {
  validate_cut(W, cut, "nonunitary_lower_bound_check");
  const double x = static_cast<double>(cut.X.size());
  const double b = static_cast<double>(cut.boundary.size());
  require(b > 0, "nonunitary_lower_bound_check: cut has an empty boundary");

  NonunitaryLowerBoundReport rep;
  rep.bound = (1 - 3 * eps) * x / (2 * (1 + eps) * b);
  rep.vacuous = (1 - 3 * eps) <= 0;
  if (rep.vacuous) {
    rep.notes.push_back("eps >= 1/3 makes the bound nonpositive (vacuous)");
  }
  rep.measured = measured_or_horizon(measured_S, rep.notes, "sampling time");
  rep.holds = rep.measured >= rep.bound - kIneqSlack;
  return rep;
}

WalkState random_state(int n, int d, std::mt19937_64& rng,
                       const std::vector<int>& support) {
  require(n >= 1 && d >= 1, "random_state: dimensions must be positive");
  const int dim = n * d;
  std::vector<int> indices = support;
  if (indices.empty()) {
    indices.resize(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) indices[static_cast<std::size_t>(i)] = i;
  } else {
    for (int i : indices) {
      require(i >= 0 && i < dim, "random_state: support index out of range");
    }
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  WalkState s;
  s.n = n;
  s.d = d;
  s.amp = CVec::Zero(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i : indices) s.amp[i] = cxd(gauss(rng), gauss(rng));
    norm = s.amp.norm();
  }
  s.amp /= norm;
  return s;
}

}  // namespace qwalk
