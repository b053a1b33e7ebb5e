// Command-line front end: scenario generation, single episodes, Monte Carlo
// batches, and OSPA2 evaluation of trajectory files.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "unisat/unisat.hpp"

namespace fs = std::filesystem;
using namespace unisat;

namespace {

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Json j;
  in >> j;
  return scenario_from_json(j);
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write: " + path.string());
  out << content;
}

ScenarioKind parse_kind(const std::string& s) {
  for (ScenarioKind k :
       {ScenarioKind::BaseConfig, ScenarioKind::Bimodal, ScenarioKind::HighVariance,
        ScenarioKind::Overestimate, ScenarioKind::Underestimate, ScenarioKind::Random}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown scenario kind: " + s +
                    " (expected base_config|bimodal|high_variance|overestimate|underestimate|random)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unisat - unified search-and-track simulation lab"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write a scenario configuration file");
  std::string gen_kind;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "scenario.json";
  gen->add_option("kind", gen_kind, "scenario kind")->required();
  gen->add_option("--seed", gen_seed, "scenario seed");
  gen->add_option("--out", gen_out, "output config path");

  auto* run = app.add_subcommand("run", "run a single episode");
  std::string run_config;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  std::string run_out = "episode_out";
  run->add_option("--config", run_config, "scenario config JSON")->required();
  run->add_option("--seed", run_seed, "episode seed (default: scenario seed)")
      ->each([&](const std::string&) { run_seed_set = true; });
  run->add_option("--out", run_out, "output directory");

  auto* mc = app.add_subcommand("mc", "run a seeded Monte Carlo batch");
  std::string mc_config;
  int mc_runs = 100;
  std::uint64_t mc_base_seed = 0;
  int mc_jobs = 1;
  std::string mc_out = "mc_out";
  std::string mc_policy = "unisat";
  mc->add_option("--config", mc_config, "scenario config JSON")->required();
  mc->add_option("--runs", mc_runs, "number of episodes");
  mc->add_option("--base-seed", mc_base_seed, "episode i uses seed base+i");
  mc->add_option("--jobs", mc_jobs, "worker threads");
  mc->add_option("--out", mc_out, "output directory");
  mc->add_option("--policy", mc_policy, "unisat|random_action|lawnmower");

  auto* met = app.add_subcommand("metrics", "OSPA2 series for truth/estimate trajectory CSVs");
  std::string met_truth, met_est, met_out;
  double met_cutoff = 50.0;
  double met_order = 1.0;
  int met_window = 10;
  met->add_option("--truth", met_truth, "truth trajectory CSV")->required();
  met->add_option("--est", met_est, "estimate trajectory CSV")->required();
  met->add_option("--cutoff", met_cutoff, "OSPA cutoff c (m)");
  met->add_option("--order", met_order, "OSPA order p");
  met->add_option("--window", met_window, "OSPA2 window (steps)");
  met->add_option("--out", met_out, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const Scenario sc = generate_scenario(parse_kind(gen_kind), gen_seed);
      write_file(gen_out, scenario_to_json(sc).dump(2) + "\n");
      std::cout << "wrote " << gen_out << " (digest " << scenario_digest(sc) << ")\n";
    } else if (run->parsed()) {
      const Scenario sc = load_scenario(run_config);
      const std::uint64_t seed = run_seed_set ? run_seed : sc.seed;
      const EpisodeLog log = run_episode(sc, seed);
      const fs::path dir(run_out);
      write_file(dir / "episode.csv", episode_csv(log));
      write_file(dir / "truth.csv", truth_csv(log));
      write_file(dir / "estimates.csv", estimates_csv(log));
      std::cout << "episode seed " << seed << ": final ospa2 " << log.final_ospa2() << ", "
                << log.records.size() << " steps -> " << run_out << "\n";
    } else if (mc->parsed()) {
      const Scenario sc = load_scenario(mc_config);
      PolicyKind policy = PolicyKind::unisat;
      if (mc_policy == "random_action") policy = PolicyKind::random_action;
      else if (mc_policy == "lawnmower") policy = PolicyKind::lawnmower;
      else if (mc_policy != "unisat") throw ConfigError("unknown policy: " + mc_policy);
      std::vector<EpisodeLog> logs;
      const RunSummary summary = run_monte_carlo(sc, mc_runs, mc_base_seed, mc_jobs, policy, &logs);
      const fs::path dir(mc_out);
      write_file(dir / "summary.json", run_summary_to_json(summary).dump(2) + "\n");
      for (std::size_t i = 0; i < logs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "ep_%04zu.csv", i);
        write_file(dir / "episodes" / name, episode_csv(logs[i]));
      }
      std::cout << "mc: " << summary.runs - summary.failed << "/" << summary.runs
                << " episodes, mean final ospa2 " << summary.mean_final_ospa2 << " +/- "
                << summary.margin95_final_ospa2 << " -> " << mc_out << "\n";
    } else if (met->parsed()) {
      std::ifstream tin(met_truth), ein(met_est);
      if (!tin) throw ConfigError("cannot open: " + met_truth);
      if (!ein) throw ConfigError("cannot open: " + met_est);
      const TrajectorySet truth = read_trajectories_csv(tin);
      const TrajectorySet est = read_trajectories_csv(ein);
      int duration = 0;
      for (const auto& tr : truth) {
        if (!tr.empty()) duration = std::max(duration, tr.rbegin()->first + 1);
      }
      for (const auto& tr : est) {
        if (!tr.empty()) duration = std::max(duration, tr.rbegin()->first + 1);
      }
      const MetricConfig cfg{met_cutoff, met_order, met_window};
      std::ostringstream out;
      out << "step,ospa2_total,ospa2_loc,ospa2_card\n";
      const auto series = ospa2_window(truth, est, duration, cfg);
      for (int k = 0; k < duration; ++k) {
        out << k << ',' << series[static_cast<std::size_t>(k)].total << ','
            << series[static_cast<std::size_t>(k)].loc << ','
            << series[static_cast<std::size_t>(k)].card << "\n";
      }
      if (met_out.empty()) std::cout << out.str();
      else write_file(met_out, out.str());
    }
  } catch (const std::exception& e) {
    Json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
