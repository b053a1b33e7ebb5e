#pragma once

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "unisat/episode.hpp"

namespace unisat {

// Sample mean and 95% margin of error (1.96 * s / sqrt(n)).
inline std::pair<double, double> summarize(const std::vector<double>& values) {
  const std::size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sample_std = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, 1.96 * sample_std / std::sqrt(static_cast<double>(n))};
}

struct RunSummary {
  std::string scenario_digest;
  std::uint64_t base_seed = 0;
  int runs = 0;
  int failed = 0;
  double mean_final_ospa2 = 0.0;
  double margin95_final_ospa2 = 0.0;
  std::vector<double> final_values;       // per successful episode, by index
  std::vector<double> per_step_mean;      // OSPA2 total
  std::vector<double> per_step_margin95;
};

inline Json run_summary_to_json(const RunSummary& s) {
  Json j;
  j["scenario_digest"] = s.scenario_digest;
  j["base_seed"] = s.base_seed;
  j["runs"] = s.runs;
  j["failed"] = s.failed;
  j["mean_final_ospa2"] = s.mean_final_ospa2;
  j["margin95_final_ospa2"] = s.margin95_final_ospa2;
  j["final_values"] = s.final_values;
  j["per_step_mean"] = s.per_step_mean;
  j["per_step_margin95"] = s.per_step_margin95;
  return j;
}

// Seeded Monte Carlo batch: episode i runs with seed base_seed + i. Episodes
// are distributed over a worker pool; aggregation is keyed by episode index,
// so the result is identical for any parallelism degree.
inline RunSummary run_monte_carlo(const Scenario& scenario, int n_runs, std::uint64_t base_seed,
                                  int jobs, PolicyKind policy = PolicyKind::unisat,
                                  std::vector<EpisodeLog>* logs_out = nullptr) {
  std::vector<EpisodeLog> logs(static_cast<std::size_t>(n_runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_runs) return;
      try {
        logs[static_cast<std::size_t>(i)] = run_episode(scenario, base_seed + static_cast<std::uint64_t>(i), policy);
      } catch (const std::exception& e) {
        logs[static_cast<std::size_t>(i)].failed = true;
        logs[static_cast<std::size_t>(i)].failure = e.what();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunSummary summary;
  summary.scenario_digest = scenario_digest(scenario);
  summary.base_seed = base_seed;
  summary.runs = n_runs;
  std::vector<std::vector<double>> per_step;
  for (const auto& log : logs) {
    if (log.failed) {
      summary.failed += 1;
      continue;
    }
    summary.final_values.push_back(log.final_ospa2());
    if (per_step.empty()) per_step.resize(log.records.size());
    for (std::size_t k = 0; k < log.records.size(); ++k) {
      per_step[k].push_back(log.records[k].ospa2.total);
    }
  }
  if (!summary.final_values.empty()) {
    const auto [mean, margin] = summarize(summary.final_values);
    summary.mean_final_ospa2 = mean;
    summary.margin95_final_ospa2 = margin;
    for (const auto& column : per_step) {
      const auto [m, g] = summarize(column);
      summary.per_step_mean.push_back(m);
      summary.per_step_margin95.push_back(g);
    }
  }
  if (logs_out) *logs_out = std::move(logs);
  return summary;
}

}  // namespace unisat
