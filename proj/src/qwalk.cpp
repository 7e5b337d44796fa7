#include "qwalk/qwalk.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace qwalk {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_unitary(const CMat& U, double tol, const char* what) {
  CMat gram = U.adjoint() * U;
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument(std::string(what) + ": matrix is not unitary within tolerance");
  }
}

}  // namespace

void WalkState::check_norm(double tol) const {
  if (std::abs(amp.norm() - 1.0) > tol) {
    throw std::invalid_argument("walk state norm deviates from 1 beyond tolerance");
  }
}

WalkState basis_state(int n, int d, int a, int v) {
  require(n >= 1 && d >= 1, "basis_state: bad dimensions");
  require(a >= 0 && a < d && v >= 0 && v < n, "basis_state: index out of range");
  WalkState s;
  s.n = n;
  s.d = d;
  s.amp = CVec::Zero(static_cast<Eigen::Index>(n) * d);
  s.amp[static_cast<Eigen::Index>(a) * n + v] = 1.0;
  return s;
}

CoinOperator hadamard_coin() {
  CoinOperator coin;
  coin.C.resize(2, 2);
  const double r = 1.0 / std::numbers::sqrt2;
  coin.C << r, r, r, -r;
  return coin;
}

CoinOperator dft_coin(int d) {
  require(d >= 2, "dft_coin: d must be >= 2");
  CoinOperator coin;
  coin.C.resize(d, d);
  const double r = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      double phase = 2.0 * std::numbers::pi * j * k / d;
      coin.C(j, k) = r * cxd(std::cos(phase), std::sin(phase));
    }
  }
  return coin;
}

CMat shift_operator(const LabeledGraph& g) {
  const Eigen::Index dim = static_cast<Eigen::Index>(g.n) * g.d;
  CMat S = CMat::Zero(dim, dim);
  for (int a = 0; a < g.d; ++a) {
    for (int v = 0; v < g.n; ++v) {
      S(static_cast<Eigen::Index>(a) * g.n + g.sigma[a][v],
        static_cast<Eigen::Index>(a) * g.n + v) = 1.0;
    }
  }
  return S;
}

CMat WalkOperator::matrix() const {
  switch (kind) {
    case Kind::GeneralUnitary:
      return U;
    case Kind::Coined: {
      const Eigen::Index dim = static_cast<Eigen::Index>(g.n) * g.d;
      CMat M = CMat::Zero(dim, dim);
      for (int a = 0; a < g.d; ++a) {
        for (int v = 0; v < g.n; ++v) {
          Eigen::Index col = static_cast<Eigen::Index>(a) * g.n + v;
          for (int ap = 0; ap < g.d; ++ap) {
            M(static_cast<Eigen::Index>(ap) * g.n + g.sigma[ap][v], col) +=
                coin.C(ap, a);
          }
        }
      }
      return M;
    }
    case Kind::RandomMixture:
      throw std::invalid_argument("matrix(): a random mixture has no single matrix");
  }
  throw std::logic_error("matrix(): unreachable");
}

WalkOperator coined_walk(const LabeledGraph& g, const CoinOperator& coin) {
  require(coin.d() == g.d, "coined_walk: coin dimension must equal graph degree");
  require_unitary(coin.C, 1e-12, "coined_walk");
  WalkOperator w;
  w.kind = WalkOperator::Kind::Coined;
  w.g = g;
  w.coin = coin;
  return w;
}

WalkOperator general_walk(const LabeledGraph& g, const CMat& U) {
  require(U.rows() == U.cols(), "general_walk: matrix must be square");
  require(U.rows() == static_cast<Eigen::Index>(g.n) * g.d,
          "general_walk: dimension must be n*d");
  require_unitary(U, 1e-12, "general_walk");
  WalkOperator w;
  w.kind = WalkOperator::Kind::GeneralUnitary;
  w.g = g;
  w.U = U;
  return w;
}

WalkOperator random_mixture(std::vector<WalkOperator> parts,
                            std::vector<double> probs) {
  require(!parts.empty(), "random_mixture: need at least one constituent");
  require(parts.size() == probs.size(), "random_mixture: probability count mismatch");
  double total = 0.0;
  for (double p : probs) {
    require(p >= 0.0, "random_mixture: negative probability");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "random_mixture: probabilities must sum to 1");
  for (const auto& part : parts) {
    require(part.kind != WalkOperator::Kind::RandomMixture,
            "random_mixture: constituents must be unitary walks");
    require(part.g.n == parts[0].g.n && part.g.d == parts[0].g.d &&
                part.g.sigma == parts[0].g.sigma,
            "random_mixture: constituents must share one graph");
  }
  WalkOperator w;
  w.kind = WalkOperator::Kind::RandomMixture;
  w.g = parts[0].g;
  w.parts = std::move(parts);
  w.probs = std::move(probs);
  return w;
}

WalkState step(const WalkOperator& W, const WalkState& s, std::mt19937_64* rng) {
  require(s.n == W.n() && s.d == W.d(), "step: state/operator dimension mismatch");
  switch (W.kind) {
    case WalkOperator::Kind::Coined: {
      const int n = W.n(), d = W.d();
      WalkState out;
      out.n = n;
      out.d = d;
      out.amp = CVec::Zero(s.amp.size());
      // Coin acts on the label register of every vertex block, then the
      // shift routes each label along its permutation: O(n d^2).
      CVec coin_in(d), coin_out(d);
      for (int v = 0; v < n; ++v) {
        for (int a = 0; a < d; ++a) coin_in[a] = s.amp[static_cast<Eigen::Index>(a) * n + v];
        coin_out.noalias() = W.coin.C * coin_in;
        for (int a = 0; a < d; ++a) {
          out.amp[static_cast<Eigen::Index>(a) * n + W.g.sigma[a][v]] = coin_out[a];
        }
      }
      return out;
    }
    case WalkOperator::Kind::GeneralUnitary: {
      WalkState out;
      out.n = s.n;
      out.d = s.d;
      out.amp = W.U * s.amp;
      return out;
    }
    case WalkOperator::Kind::RandomMixture: {
      require(rng != nullptr, "step: a random mixture needs a seeded generator");
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double r = unif(*rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < W.parts.size(); ++i) {
        acc += W.probs[i];
        if (r < acc || i + 1 == W.parts.size()) return step(W.parts[i], s, rng);
      }
      return step(W.parts.back(), s, rng);
    }
  }
  throw std::logic_error("step: unreachable");
}

Distribution node_distribution(const WalkState& s) {
  if (std::abs(s.amp.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("node_distribution: state norm off beyond 1e-8");
  }
  Distribution p = Distribution::Zero(s.n);
  for (int a = 0; a < s.d; ++a) {
    for (int v = 0; v < s.n; ++v) {
      p[v] += std::norm(s.amp[static_cast<Eigen::Index>(a) * s.n + v]);
    }
  }
  return p;
}

Distribution average_distribution(const WalkOperator& W, const WalkState& alpha0,
                                  long T, std::mt19937_64* rng) {
  require(T >= 1, "average_distribution: T must be >= 1");
  WalkState state = alpha0;
  Distribution acc = node_distribution(state);
  for (long t = 1; t < T; ++t) {
    state = step(W, state, rng);
    acc += node_distribution(state);
  }
  return acc / static_cast<double>(T);
}

bool locality_check(const WalkOperator& W) {
  if (W.kind == WalkOperator::Kind::RandomMixture) {
    for (const auto& part : W.parts) {
      if (!locality_check(part)) return false;
    }
    return true;
  }
  const CMat U = W.matrix();
  const int n = W.n(), d = W.d();
  for (int v = 0; v < n; ++v) {
    for (int vp = 0; vp < n; ++vp) {
      if (vp == v || W.g.adjacent(v, vp)) continue;
      for (int a = 0; a < d; ++a) {
        for (int ap = 0; ap < d; ++ap) {
          if (std::abs(U(static_cast<Eigen::Index>(ap) * n + vp,
                         static_cast<Eigen::Index>(a) * n + v)) > 1e-14) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

namespace {

double subset_probability(const WalkState& s, const std::vector<int>& vertices) {
  double p = 0.0;
  for (int a = 0; a < s.d; ++a) {
    for (int v : vertices) {
      p += std::norm(s.amp[static_cast<Eigen::Index>(a) * s.n + v]);
    }
  }
  return p;
}

}  // namespace

ProjectionCheckReport projection_inequality_check(const WalkOperator& W,
                                                  const Cut& cut,
                                                  const WalkState& alpha) {
  alpha.check_norm(1e-8);
  ProjectionCheckReport report;
  report.p_x_before = subset_probability(alpha, cut.X);
  report.p_b_before = subset_probability(alpha, cut.boundary);
  if (W.kind == WalkOperator::Kind::RandomMixture) {
    // The inequality holds for every constituent, hence for any mixture;
    // check the worst constituent.
    double worst = 0.0;
    for (const auto& part : W.parts) {
      WalkState next = step(part, alpha);
      worst = std::max(worst, subset_probability(next, cut.X));
    }
    report.p_x_after = worst;
  } else {
    WalkState next = step(W, alpha);
    report.p_x_after = subset_probability(next, cut.X);
  }
  report.holds =
      report.p_x_after <= report.p_x_before + report.p_b_before + 1e-10;
  return report;
}

CompleteMixtureReport complete_mixture_check(const WalkOperator& W, long t_max) {
  require(W.kind != WalkOperator::Kind::RandomMixture,
          "complete_mixture_check: requires a unitary walk");
  const int n = W.n(), d = W.d();
  std::vector<WalkState> columns;
  columns.reserve(static_cast<std::size_t>(n) * d);
  for (int a = 0; a < d; ++a) {
    for (int v = 0; v < n; ++v) columns.push_back(basis_state(n, d, a, v));
  }
  CompleteMixtureReport report;
  report.uniform_at_all_t = true;
  for (long t = 0; t <= t_max; ++t) {
    if (t > 0) {
      for (auto& col : columns) col = step(W, col);
    }
    Distribution avg = Distribution::Zero(n);
    for (const auto& col : columns) avg += node_distribution(col);
    avg /= static_cast<double>(columns.size());
    double dev = (avg.array() - 1.0 / n).abs().maxCoeff();
    report.worst_deviation = std::max(report.worst_deviation, dev);
    if (dev > 1e-10 && report.uniform_at_all_t) {
      report.uniform_at_all_t = false;
      report.first_bad_t = t;
    }
  }
  return report;
}

std::string state_to_json(const WalkState& s) {
  nlohmann::json amp = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.amp.size(); ++i) {
    amp.push_back({s.amp[i].real(), s.amp[i].imag()});
  }
  nlohmann::json j{{"n", s.n}, {"d", s.d}, {"amp", std::move(amp)}};
  return j.dump();
}

WalkState state_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  WalkState s;
  s.n = j.at("n").get<int>();
  s.d = j.at("d").get<int>();
  const auto& amp = j.at("amp");
  require(static_cast<Eigen::Index>(amp.size()) ==
              static_cast<Eigen::Index>(s.n) * s.d,
          "state_from_json: amplitude count mismatch");
  s.amp.resize(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i) {
    s.amp[static_cast<Eigen::Index>(i)] =
        cxd(amp[i][0].get<double>(), amp[i][1].get<double>());
  }
  return s;
}

}  // namespace qwalk
