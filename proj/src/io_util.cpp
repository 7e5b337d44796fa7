#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "qwalk/common.hpp"
#include "qwalk/serialize.hpp"

namespace qwalk {

double tv_distance(const Distribution& d1, const Distribution& d2) {
  if (d1.size() != d2.size()) {
    throw std::invalid_argument("tv_distance: dimension mismatch");
  }
  return (d1 - d2).cwiseAbs().sum();
}

int thread_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("QWALK_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1 && cap < hw) hw = cap;
  }
  return hw;
}

void parallel_for(long count, const std::function<void(long)>& fn) {
  int workers = thread_budget();
  if (workers <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  if (workers > count) workers = static_cast<int>(count);
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);  // stop handing out work
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string format17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

// ---- JSON serialization ------------------------------------------------------

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) {
  if (v.has_value()) return *v;
  return nullptr;
}

}  // namespace

json to_json(const BoundCheck& check) {
  json j{{"quantity", check.quantity},
         {"measured", check.measured},
         {"lower_bound", optional_number(check.lower_bound)},
         {"upper_bound", optional_number(check.upper_bound)},
         {"holds", check.holds}};
  if (!check.notes.empty()) j["notes"] = check.notes;
  return j;
}

json to_json(const MeasuredTime& t) {
  return json{{"value", t.exceeds_horizon ? json(nullptr) : json(t.value)},
              {"t_max", t.t_max},
              {"exceeds_horizon", t.exceeds_horizon}};
}

json to_json(const Witness& w) {
  json j{{"t", w.t}};
  j["X"] = w.X;
  if (w.a >= 0) {
    j["start"] = json{{"a", w.a}, {"v", w.v}};
  } else {
    j["start"] = nullptr;
  }
  return j;
}

json to_json(const MixingReport& report) {
  return json{{"eps", report.eps},
              {"t_max", report.t_max},
              {"mixing_time", to_json(report.mixing)},
              {"sampling_time", to_json(report.sampling)},
              {"filling_time", to_json(report.filling)},
              {"dispersion_time", to_json(report.dispersion)},
              {"mixing_witness", to_json(report.mixing_witness)},
              {"sampling_witness", to_json(report.sampling_witness)},
              {"filling_witness", to_json(report.filling_witness)},
              {"dispersion_witness", to_json(report.dispersion_witness)},
              {"subset_family", report.subset_family},
              {"initial_family", report.initial_family},
              {"ordering_holds", report.ordering_holds}};
}

json to_json(const Cut& cut) {
  return json{{"X", cut.X}, {"boundary", cut.boundary}, {"cut_edges", cut.cut_edges}};
}

json to_json(const ConductanceResult& result) {
  return json{{"value", result.value}, {"argmin", to_json(result.argmin)}};
}

json to_json(const PhiComparisonReport& report) {
  return json{{"phi", report.phi},
              {"phi_prime", report.phi_prime},
              {"d", report.d},
              {"slack", report.slack},
              {"holds", report.holds}};
}

json to_json(const SpectralGapResult& result) {
  return json{{"lambda2", result.lambda2},
              {"gap", result.gap},
              {"lambda_min", result.lambda_min}};
}

json to_json(const SpacingReport& report) {
  return json{{"delta", report.delta},
              {"delta_param", report.delta_param},
              {"delta_good", report.delta_good},
              {"good_indices", report.good_indices},
              {"bad_indices", report.bad_indices},
              {"bad_mass", report.bad_mass}};
}

json to_json(const Distribution& dist) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < dist.size(); ++i) arr.push_back(dist[i]);
  return arr;
}

json to_json(const AmplificationResult& result) {
  json rows = json::array();
  for (Eigen::Index v = 0; v < result.P_amp.rows(); ++v) {
    json row = json::array();
    for (Eigen::Index u = 0; u < result.P_amp.cols(); ++u) {
      row.push_back(result.P_amp(v, u));
    }
    rows.push_back(std::move(row));
  }
  json j{{"k", result.k},
         {"stage_length", result.stage_length},
         {"P_amp", std::move(rows)},
         {"pi", to_json(result.pi)},
         {"eps0", result.eps0},
         {"final_distance", result.final_distance},
         {"row_sum_error", result.row_sum_error},
         {"fixpoint_error", result.fixpoint_error},
         {"contraction_ok", result.contraction_ok},
         {"seed", result.seed},
         {"mc_trials", result.mc_trials}};
  if (result.mc_trials > 0) {
    j["mc_max_z"] = result.mc_max_z;
    j["mc_estimate"] = to_json(result.mc_estimate);
  }
  return j;
}

json to_json(const AmplifiedSamplingReport& report) {
  return json{{"T", report.T},
              {"k", report.k},
              {"worst_relative_dev", report.worst_relative_dev},
              {"meets_condition", report.meets_condition}};
}

json to_json(const FillingLowerBoundReport& report) {
  return json{{"quantity", "filling_time_lower_bound"},
              {"bound", report.bound},
              {"measured", report.measured},
              {"holds", report.holds},
              {"binding", report.binding},
              {"mean_boundary_worst", report.mean_boundary_worst},
              {"mean_boundary_bound", report.mean_boundary_bound},
              {"mean_boundary_holds", report.mean_boundary_holds},
              {"notes", report.notes}};
}

json to_json(const CoinedLowerBoundReport& report) {
  return json{{"quantity", "coined_filling_time_lower_bound"},
              {"bound", report.bound},
              {"measured", report.measured},
              {"holds", report.holds},
              {"binding", report.binding},
              {"mean_cutspace_worst", report.mean_cutspace_worst},
              {"mean_cutspace_bound", report.mean_cutspace_bound},
              {"mean_cutspace_holds", report.mean_cutspace_holds},
              {"leakage_checks", report.leakage_checks},
              {"leakage_violations", report.leakage_violations},
              {"conjugation_max_diff", report.conjugation_max_diff},
              {"cut_space_dim", report.cut_space_dim},
              {"cut_edges", report.cut_edges},
              {"notes", report.notes}};
}

json to_json(const NonunitaryLowerBoundReport& report) {
  return json{{"quantity", "nonunitary_sampling_time_lower_bound"},
              {"bound", report.bound},
              {"measured", report.measured},
              {"holds", report.holds},
              {"vacuous", report.vacuous},
              {"notes", report.notes}};
}

json to_json(const StateDistanceReport& report) {
  return json{{"distribution_distance", report.distribution_distance},
              {"state_distance", report.state_distance},
              {"bound", report.bound},
              {"holds", report.holds}};
}

json to_json(const ProjectionCheckReport& report) {
  return json{{"p_x_after", report.p_x_after},
              {"p_x_before", report.p_x_before},
              {"p_b_before", report.p_b_before},
              {"holds", report.holds}};
}

json to_json(const CompleteMixtureReport& report) {
  return json{{"uniform_at_all_t", report.uniform_at_all_t},
              {"first_bad_t", report.first_bad_t},
              {"worst_deviation", report.worst_deviation}};
}

}  // namespace qwalk
