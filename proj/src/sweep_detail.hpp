#pragma once

// Internal sweep machinery shared by the classical and quantum measure
// implementations. Not installed; include only from src/.

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qwalk/classical.hpp"
#include "qwalk/common.hpp"

namespace qwalk::detail {

/// Last t in [0, t_max] violating a condition determines a "for all t >= T"
/// measure: the answer is last_violation + 1 (0 when no t violates), or
/// horizon-exceeded when the last scanned step itself still violates (the
/// tail beyond it is then uncertified).
struct ForAllTailSweep {
  long last_violation = -1;
  void observe(long t, bool violated) {
    if (violated) last_violation = t;
  }
  MeasuredTime finish(long t_max) const {
    MeasuredTime result;
    result.t_max = t_max;
    if (last_violation >= t_max) {
      result.exceeds_horizon = true;
    } else {
      result.value = last_violation + 1;
    }
    return result;
  }
};

/// Worst relative deficiency/excess of subset masses over a subset family,
/// via the sorted-prefix trick for uniform pi, a subset-sum table otherwise.
/// Exhaustive families are swept implicitly: subset id i stands for the
/// nonempty mask i+1 over {0..n-1} (the full vertex set included).
class SubsetChecker {
 public:
  SubsetChecker(const Distribution& pi, const SubsetFamily& family)
      : pi_(pi), family_(family), n_(static_cast<int>(pi.size())) {
    uniform_ = true;
    for (int v = 0; v < n_; ++v) {
      if (std::abs(pi_[v] - pi_[0]) > 1e-12) uniform_ = false;
    }
    if (family_.exhaustive) {
      require(n_ <= kExhaustiveCutLimit,
              "subset sweep: exhaustive family beyond the enumeration limit");
      if (!uniform_) {
        pi_mask_.assign(std::size_t(1) << n_, 0.0);
        for (unsigned mask = 1; mask < pi_mask_.size(); ++mask) {
          unsigned low = mask & (mask - 1);
          int bit = std::countr_zero(mask);
          pi_mask_[mask] = pi_mask_[low] + pi_[bit];
        }
      }
    } else {
      for (const auto& set : family_.sets) {
        double mass = 0.0;
        for (int v : set) mass += pi_[v];
        set_pi_.push_back(mass);
      }
    }
  }

  bool uniform_pi() const { return uniform_; }
  bool exhaustive() const { return family_.exhaustive; }
  int n() const { return n_; }

  /// Number of subsets swept (ids 0..count-1).
  std::size_t count() const {
    return family_.exhaustive ? (std::size_t(1) << n_) - 1
                              : family_.sets.size();
  }

  double pi_of(std::size_t id) const {
    if (!family_.exhaustive) return set_pi_[id];
    unsigned mask = static_cast<unsigned>(id) + 1;
    return uniform_ ? pi_[0] * std::popcount(mask) : pi_mask_[mask];
  }

  std::vector<int> vertices(std::size_t id) const {
    if (!family_.exhaustive) return family_.sets[id];
    std::vector<int> set;
    for (unsigned mask = static_cast<unsigned>(id) + 1; mask;
         mask &= mask - 1) {
      set.push_back(std::countr_zero(mask));
    }
    return set;
  }

  /// D(X) for every subset id, in one pass.
  void masses(const Distribution& d, std::vector<double>& out) const {
    out.resize(count());
    if (family_.exhaustive) {
      for (unsigned mask = 1; mask <= out.size(); ++mask) {
        unsigned low = mask & (mask - 1);
        int bit = std::countr_zero(mask);
        out[mask - 1] = (low ? out[low - 1] : 0.0) + d[bit];
      }
    } else {
      for (std::size_t i = 0; i < family_.sets.size(); ++i) {
        double mass = 0.0;
        for (int v : family_.sets[i]) mass += d[v];
        out[i] = mass;
      }
    }
  }

  double mass_of(const Distribution& d, std::size_t id) const {
    double mass = 0.0;
    if (family_.exhaustive) {
      for (unsigned mask = static_cast<unsigned>(id) + 1; mask;
           mask &= mask - 1) {
        mass += d[std::countr_zero(mask)];
      }
    } else {
      for (int v : family_.sets[id]) mass += d[v];
    }
    return mass;
  }

  // True iff D(X) >= (1-eps) pi(X) for every X in the family.
  bool filling_ok(const Distribution& d, double eps) const {
    return worst_filling_slack(d, eps) >= -1e-15;
  }
  // min over X of D(X) - (1-eps) pi(X); optionally reports the minimizer.
  double worst_filling_slack(const Distribution& d, double eps,
                             std::vector<int>* witness = nullptr) const {
    if (family_.exhaustive && uniform_) {
      // Worst X of each size k: the k smallest entries of D.
      std::vector<int> order = ascending_order(d);
      double prefix = 0.0, worst = kInf;
      int worst_k = 0;
      for (int k = 1; k <= n_; ++k) {
        prefix += d[order[k - 1]];
        double slack = prefix - (1 - eps) * k * pi_[0];
        if (slack < worst) {
          worst = slack;
          worst_k = k;
        }
      }
      if (witness) sorted_head(order, worst_k, *witness);
      return worst;
    }
    if (family_.exhaustive) {
      return dp_worst(
          d, [&](double dx, double px) { return dx - (1 - eps) * px; },
          witness);
    }
    return set_worst(
        d, [&](double dx, double px) { return dx - (1 - eps) * px; }, witness);
  }

  bool dispersion_ok(const Distribution& d, double eps) const {
    return worst_dispersion_slack(d, eps) >= -1e-15;
  }
  // min over X of (1+eps) pi(X) - D(X); optionally reports the minimizer.
  double worst_dispersion_slack(const Distribution& d, double eps,
                                std::vector<int>* witness = nullptr) const {
    if (family_.exhaustive && uniform_) {
      // Worst X of each size k: the k largest entries of D.
      std::vector<int> order = ascending_order(d);
      std::reverse(order.begin(), order.end());
      double prefix = 0.0, worst = kInf;
      int worst_k = 0;
      for (int k = 1; k <= n_; ++k) {
        prefix += d[order[k - 1]];
        double slack = (1 + eps) * k * pi_[0] - prefix;
        if (slack < worst) {
          worst = slack;
          worst_k = k;
        }
      }
      if (witness) sorted_head(order, worst_k, *witness);
      return worst;
    }
    if (family_.exhaustive) {
      return dp_worst(
          d, [&](double dx, double px) { return (1 + eps) * px - dx; },
          witness);
    }
    return set_worst(
        d, [&](double dx, double px) { return (1 + eps) * px - dx; }, witness);
  }

  // True iff |D(X) - pi(X)| <= eps pi(X) for every X.
  bool sampling_ok(const Distribution& d, double eps) const {
    return sampling_slack(d, eps) >= -1e-15;
  }
  // min over X of eps pi(X) - |D(X) - pi(X)|; optionally the minimizer.
  double sampling_slack(const Distribution& d, double eps,
                        std::vector<int>* witness = nullptr) const {
    if (family_.exhaustive) {
      // |D(X) - pi(X)| - eps pi(X) is maximized either by the set where D
      // exceeds (1+eps) pi or the set where D falls below (1-eps) pi; both
      // reduce to per-vertex sums.
      double worst_over = 0.0, worst_under = 0.0;
      for (int v = 0; v < n_; ++v) {
        double over = d[v] - (1 + eps) * pi_[v];
        double under = (1 - eps) * pi_[v] - d[v];
        if (over > 0) worst_over += over;
        if (under > 0) worst_under += under;
      }
      if (witness) {
        witness->clear();
        bool over_side = worst_over >= worst_under;
        for (int v = 0; v < n_; ++v) {
          double excess = over_side ? d[v] - (1 + eps) * pi_[v]
                                    : (1 - eps) * pi_[v] - d[v];
          if (excess > 0) witness->push_back(v);
        }
      }
      return -std::max(worst_over, worst_under);
    }
    return set_worst(
        d, [&](double dx, double px) { return eps * px - std::abs(dx - px); },
        witness);
  }

 private:
  static constexpr double kInf = 1e300;

  static void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
  }

  std::vector<int> ascending_order(const Distribution& d) const {
    std::vector<int> order(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) order[static_cast<std::size_t>(v)] = v;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return d[a] < d[b]; });
    return order;
  }

  static void sorted_head(const std::vector<int>& order, int k,
                          std::vector<int>& out) {
    out.assign(order.begin(), order.begin() + k);
    std::sort(out.begin(), out.end());
  }

  template <typename Slack>
  double dp_worst(const Distribution& d, Slack&& slack,
                  std::vector<int>* witness) const {
    std::vector<double> d_mask(std::size_t(1) << n_, 0.0);
    double worst = kInf;
    unsigned worst_mask = 0;
    for (unsigned mask = 1; mask < d_mask.size(); ++mask) {
      unsigned low = mask & (mask - 1);
      int bit = std::countr_zero(mask);
      d_mask[mask] = d_mask[low] + d[bit];
      double s = slack(d_mask[mask], pi_mask_[mask]);
      if (s < worst) {
        worst = s;
        worst_mask = mask;
      }
    }
    if (witness) {
      witness->clear();
      for (unsigned m = worst_mask; m; m &= m - 1) {
        witness->push_back(std::countr_zero(m));
      }
    }
    return worst;
  }

  template <typename Slack>
  double set_worst(const Distribution& d, Slack&& slack,
                   std::vector<int>* witness) const {
    double worst = kInf;
    std::size_t worst_id = 0;
    for (std::size_t i = 0; i < family_.sets.size(); ++i) {
      double dx = 0.0;
      for (int v : family_.sets[i]) dx += d[v];
      double s = slack(dx, set_pi_[i]);
      if (s < worst) {
        worst = s;
        worst_id = i;
      }
    }
    if (witness) {
      *witness = family_.sets.empty() ? std::vector<int>{}
                                      : family_.sets[worst_id];
    }
    return worst;
  }

  Distribution pi_;
  const SubsetFamily family_;
  int n_;
  bool uniform_ = false;
  std::vector<double> pi_mask_;  // exhaustive non-uniform
  std::vector<double> set_pi_;   // restricted family
};

}  // namespace qwalk::detail
