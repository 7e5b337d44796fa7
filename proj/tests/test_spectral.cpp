#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qwalk/graph.hpp"
#include "qwalk/qwalk.hpp"
#include "qwalk/spectral.hpp"

using namespace qwalk;

namespace {

WalkOperator hadamard_cycle(int n) { return coined_walk(cycle(n), hadamard_coin()); }

}  // namespace

TEST_CASE("decomposition of the identity collapses to one class") {
  SpectralDecomposition dec = decompose(CMat::Identity(6, 6), 3, 2);
  CHECK(dec.dim() == 6);
  CHECK(dec.classes.size() == 1);
  CHECK(dec.classes[0].size() == 6);
  CHECK((dec.eigvecs.adjoint() * dec.eigvecs - CMat::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("odd-cycle walk spectrum is simple; even cycles are degenerate") {
  SpectralDecomposition d5 = decompose(hadamard_cycle(5));
  CHECK(d5.classes.size() == 10);
  for (const auto& cls : d5.classes) CHECK(cls.size() == 1);
  // Eigenvalues sorted by argument in [0, 2pi).
  double prev = -1.0;
  for (int i = 0; i < 10; ++i) {
    double t = std::arg(d5.eigvals[i]);
    if (t < 0) t += 2.0 * std::numbers::pi;
    CHECK(t >= prev);
    prev = t;
    CHECK(std::abs(std::abs(d5.eigvals[i]) - 1.0) <= 1e-12);
  }

  SpectralDecomposition d4 = decompose(hadamard_cycle(4));
  bool has_multi = false;
  for (const auto& cls : d4.classes) has_multi = has_multi || cls.size() > 1;
  CHECK(has_multi);

  CHECK_THROWS_AS(decompose(CMat::Identity(4, 4) * 2.0, 2, 2),
                  std::invalid_argument);
}

TEST_CASE("closed-form cycle spectrum: frozen angle, residuals, multiset match") {
  auto pairs = cycle_analytic_spectrum(5);
  REQUIRE(pairs.size() == 5);
  CHECK(pairs[1].k == 1);
  CHECK(std::abs(pairs[1].theta1 - 0.7375795499956223) <= 1e-15);
  CHECK(std::abs(pairs[1].theta2 - (std::numbers::pi - pairs[1].theta1)) <= 1e-15);

  CHECK_THROWS_AS(cycle_analytic_spectrum(6), std::invalid_argument);
  CHECK_THROWS_AS(cycle_analytic_spectrum(1), std::invalid_argument);

  for (int n : {5, 9, 21, 51, 101}) {
    WalkOperator W = hadamard_cycle(n);
    CMat U = W.matrix();
    std::vector<cxd> analytic;
    for (const auto& p : cycle_analytic_spectrum(n)) {
      analytic.push_back(p.lambda1);
      analytic.push_back(p.lambda2);
      CHECK((U * p.vec1 - p.lambda1 * p.vec1).norm() <= 1e-8);
      CHECK((U * p.vec2 - p.lambda2 * p.vec2).norm() <= 1e-8);
    }
    SpectralDecomposition dec = decompose(W);
    // Greedy nearest-neighbor matching (argument sorting is unstable at the
    // 0/2pi seam, where lambda = 1 lands on either side numerically).
    std::vector<char> used(analytic.size(), 0);
    double worst = 0.0;
    for (int i = 0; i < dec.dim(); ++i) {
      double best = 1e9;
      int best_j = -1;
      for (std::size_t j = 0; j < analytic.size(); ++j) {
        if (used[j]) continue;
        double dist = std::abs(dec.eigvals(i) - analytic[j]);
        if (dist < best) {
          best = dist;
          best_j = static_cast<int>(j);
        }
      }
      used[static_cast<std::size_t>(best_j)] = 1;
      worst = std::max(worst, best);
    }
    CHECK(worst <= 1e-10);
    // All 2n eigenvalues pairwise distinct.
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      for (std::size_t j = i + 1; j < analytic.size(); ++j) {
        CHECK(std::abs(analytic[i] - analytic[j]) > 1e-9);
      }
    }
  }
}

TEST_CASE("limiting distribution is uniform on odd cycles and matches the simple-spectrum formula") {
  WalkOperator W = hadamard_cycle(7);
  SpectralDecomposition dec = decompose(W);
  for (int a = 0; a < 2; ++a) {
    WalkState s = basis_state(7, 2, a, 0);
    Distribution pi = limiting_distribution(dec, s);
    for (int v = 0; v < 7; ++v) {
      CHECK(std::abs(pi(v) - 1.0 / 7.0) <= 1e-10);
    }
    // Simple spectrum: pi(v) = sum_j |a_j|^2 sum_a |phi_j(a, v)|^2.
    CVec amps = dec.amplitudes(s);
    Distribution direct = Distribution::Zero(7);
    for (int j = 0; j < dec.dim(); ++j) {
      for (int v = 0; v < 7; ++v) {
        double w = std::norm(dec.eigvecs(v, j)) + std::norm(dec.eigvecs(7 + v, j));
        direct(v) += std::norm(amps(j)) * w;
      }
    }
    CHECK(tv_distance(pi, direct) <= 1e-12);
  }
}

TEST_CASE("limiting distribution is invariant under eigenbasis rotation within a class") {
  LabeledGraph g = pad_regular(bridged_cliques_adjacency(4));
  WalkOperator W = coined_walk(g, dft_coin(g.d));
  SpectralDecomposition dec = decompose(W);
  auto largest = std::max_element(
      dec.classes.begin(), dec.classes.end(),
      [](const auto& a, const auto& b) { return a.size() < b.size(); });
  REQUIRE(largest->size() >= 2);

  WalkState s = basis_state(g.n, g.d, 0, 0);
  Distribution before = limiting_distribution(dec, s);

  // Rotate the degenerate columns by a random unitary; the class projector
  // (and hence the limit) must not move.
  int m = static_cast<int>(largest->size());
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat a(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = cxd(gauss(rng), gauss(rng));
  }
  CMat q = Eigen::HouseholderQR<CMat>(a).householderQ();
  CMat cols(dec.dim(), m);
  for (int j = 0; j < m; ++j) cols.col(j) = dec.eigvecs.col((*largest)[j]);
  cols = cols * q;
  SpectralDecomposition rotated = dec;
  for (int j = 0; j < m; ++j) rotated.eigvecs.col((*largest)[j]) = cols.col(j);

  Distribution after = limiting_distribution(rotated, s);
  CHECK(tv_distance(before, after) <= 1e-10);
}

TEST_CASE("time average approaches the limit at the pairwise rate") {
  WalkOperator W = hadamard_cycle(7);
  SpectralDecomposition dec = decompose(W);
  WalkState s = basis_state(7, 2, 0, 0);
  Distribution pi = limiting_distribution(dec, s);

  const long T = 100000;
  Distribution avg = average_distribution(W, s, T);
  double bound = convergence_bound_pairs(dec, s, T);
  CHECK(tv_distance(avg, pi) <= bound + kIneqSlack);

  // The bound scales exactly like 1/T.
  double twice = convergence_bound_pairs(dec, s, 2 * T);
  CHECK(std::abs(2.0 * twice - bound) <= 1e-12 * bound);

  // An exact eigenvector never moves: its average equals the limit already
  // at T = 1 (the pairwise bound stays valid, if far from tight here).
  WalkState eig;
  eig.n = 7;
  eig.d = 2;
  eig.amp = dec.eigvecs.col(3);
  Distribution avg1 = average_distribution(W, eig, 1);
  CHECK(tv_distance(avg1, limiting_distribution(dec, eig)) <= 1e-10);
}

TEST_CASE("uniform-spacing convergence bound") {
  const double pi = std::numbers::pi;
  double b = convergence_bound_uniform_spacing(5, 2, 0.25, 1000);
  CHECK(b == doctest::Approx(pi * (std::log(5.0) + 1.0) / (1000.0 * 0.25))
                 .epsilon(1e-14));
  CHECK(convergence_bound_uniform_spacing(5, 2, 0.25, 2000) ==
        doctest::Approx(b / 2.0).epsilon(1e-14));
  CHECK(convergence_bound_uniform_spacing(5, 2, 0.5, 1000) < b);
  CHECK_THROWS_AS(convergence_bound_uniform_spacing(5, 2, 0.0, 1000),
                  std::invalid_argument);
}

TEST_CASE("spacing report: plain spacing, lower bound, and bad-mass control") {
  const double pi = std::numbers::pi;

  SpectralDecomposition d9 = decompose(hadamard_cycle(9));
  WalkState s9 = basis_state(9, 2, 0, 0);
  SpacingReport plain = spacing_report(d9, 0.0, s9);
  CHECK(plain.delta_good == plain.delta);
  CHECK(plain.bad_indices.empty());
  CHECK(plain.good_indices.size() == 18);
  CHECK(plain.bad_mass == 0.0);
  CHECK(plain.delta > 1e-9);

  for (int n : {5, 9, 13, 21, 51}) {
    SpectralDecomposition dec = decompose(hadamard_cycle(n));
    WalkState s = basis_state(n, 2, 0, 0);
    for (double delta : {0.05, 0.1, 0.2}) {
      SpacingReport rep = spacing_report(dec, delta, s);
      CHECK(rep.delta_good >= pi * delta / (std::numbers::sqrt2 * n) - 1e-12);
      CHECK(rep.good_indices.size() + rep.bad_indices.size() ==
            static_cast<std::size_t>(2 * n));
    }
  }

  // Projection mass on the excluded eigenvectors stays below 2*delta for
  // coin-basis starts.
  struct Inst {
    int n;
    double delta;
  };
  for (const Inst& inst : {Inst{5, 0.05}, Inst{5, 0.1}, Inst{9, 0.1},
                           Inst{13, 0.2}, Inst{21, 0.1}, Inst{51, 0.05},
                           Inst{51, 0.2}}) {
    SpectralDecomposition dec = decompose(hadamard_cycle(inst.n));
    for (int a = 0; a < 2; ++a) {
      WalkState s = basis_state(inst.n, 2, a, 0);
      SpacingReport rep = spacing_report(dec, inst.delta, s);
      CHECK(rep.bad_mass <= 2.0 * inst.delta + 1e-12);
      // good mass + bad mass exhausts the state.
      CVec amps = dec.amplitudes(s);
      double good_mass = 0.0;
      for (int j : rep.good_indices) good_mass += std::norm(amps(j));
      CHECK(std::abs(good_mass + rep.bad_mass - 1.0) <= 1e-12);
    }
  }

  // Everything bad: a data-dependent failure, reported as a runtime error.
  CHECK_THROWS_WITH_AS(spacing_report(d9, 0.99, s9),
                       doctest::Contains("fewer than two"), std::runtime_error);
  CHECK_THROWS_AS(spacing_report(d9, 1.0, s9), std::invalid_argument);
  CHECK_THROWS_AS(spacing_report(d9, -0.1, s9), std::invalid_argument);
}

TEST_CASE("good eigenvalues separate linearly with index distance within a sweep") {
  // Within each monotone half of the dispersion curve (split by the sign of
  // cos(arg)), the i-th and j-th good eigenvalues are at least
  // (2 sqrt(2)/pi) |i - j| Delta apart.
  const double pi = std::numbers::pi;
  for (int n : {5, 9, 21, 51}) {
    SpectralDecomposition dec = decompose(hadamard_cycle(n));
    WalkState s = basis_state(n, 2, 0, 0);
    for (double delta : {0.05, 0.1, 0.2}) {
      SpacingReport rep = spacing_report(dec, delta, s);
      std::vector<std::pair<double, cxd>> regime_a, regime_b;
      for (int j : rep.good_indices) {
        cxd lam = dec.eigvals(j);
        double theta = std::arg(lam);
        if (theta < 0) theta += 2.0 * pi;
        if (std::cos(theta) > 0) {
          regime_a.emplace_back(std::fmod(theta + pi / 2.0, 2.0 * pi), lam);
        } else {
          regime_b.emplace_back(theta, lam);
        }
      }
      for (auto* regime : {&regime_a, &regime_b}) {
        std::sort(regime->begin(), regime->end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (std::size_t i = 0; i < regime->size(); ++i) {
          for (std::size_t j = i + 1; j < regime->size(); ++j) {
            double lo = (2.0 * std::numbers::sqrt2 / pi) *
                        static_cast<double>(j - i) * rep.delta_good;
            CHECK(std::abs((*regime)[i].second - (*regime)[j].second) >=
                  lo - 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("explicit cycle horizon: scaling identities") {
  for (int n : {11, 25, 99}) {
    long t1 = cycle_mixing_bound(n, 0.1);
    long t2 = cycle_mixing_bound(2 * n, 0.1);
    double ratio = static_cast<double>(t2) / static_cast<double>(t1);
    CHECK(ratio >= 2.0);
    CHECK(ratio <= 2.4);
  }
  long te = cycle_mixing_bound(9, 0.2);
  long th = cycle_mixing_bound(9, 0.1);
  CHECK(std::llabs(th - 8 * te) <= 8);
  CHECK(cycle_mixing_bound(5, 0.5) > 0);
  CHECK_THROWS_AS(cycle_mixing_bound(9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cycle_mixing_bound(9, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(cycle_mixing_bound(1, 0.1), std::invalid_argument);
}

TEST_CASE("close starting states give close time-averaged distributions") {
  WalkOperator W = hadamard_cycle(9);

  WalkState a = basis_state(9, 2, 0, 0);
  StateDistanceReport same = state_distance_vs_distribution_distance(a, a, W, 50);
  CHECK(same.state_distance == 0.0);
  CHECK(same.distribution_distance <= 1e-15);
  CHECK(same.holds);

  std::mt19937_64 rng(9090);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (long T : {10L, 100L}) {
    for (int trial = 0; trial < 3; ++trial) {
      WalkState x, y;
      x.n = y.n = 9;
      x.d = y.d = 2;
      x.amp = CVec(18);
      y.amp = CVec(18);
      for (int i = 0; i < 18; ++i) {
        x.amp(i) = cxd(gauss(rng), gauss(rng));
        y.amp(i) = cxd(gauss(rng), gauss(rng));
      }
      x.amp.normalize();
      y.amp.normalize();
      StateDistanceReport rep = state_distance_vs_distribution_distance(x, y, W, T);
      CHECK(rep.holds);
      CHECK(rep.bound == doctest::Approx(2.0 * rep.state_distance).epsilon(1e-14));
      CHECK(rep.distribution_distance <= rep.bound + kIneqSlack);
    }
  }

  // Dropping the delta-bad eigenvector components moves the state by at most
  // sqrt(bad_mass) <= sqrt(2 delta); after renormalizing, the two averages
  // stay within the advertised factor-2 bound.
  const double delta = 0.1;
  SpectralDecomposition dec = decompose(W);
  SpacingReport rep = spacing_report(dec, delta, a);
  CVec amps = dec.amplitudes(a);
  CVec good = CVec::Zero(18);
  for (int j : rep.good_indices) good += amps(j) * dec.eigvecs.col(j);
  WalkState b;
  b.n = 9;
  b.d = 2;
  b.amp = good / good.norm();
  double sd = (a.amp - b.amp).norm();
  CHECK(sd <= 2.0 * std::sqrt(2.0 * delta));
  StateDistanceReport proj = state_distance_vs_distribution_distance(a, b, W, 100);
  CHECK(proj.holds);
  CHECK(proj.bound <= 4.0 * std::sqrt(2.0 * delta) + 1e-12);
}

TEST_CASE("spectrum CSV export") {
  SpectralDecomposition dec = decompose(hadamard_cycle(5));
  std::string csv = spectrum_to_csv(dec);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "index,re,im,arg,class_id");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 10);
}
