#pragma once

#include <nlohmann/json.hpp>
#include <set>
#include <string>

#include "unisat/sim.hpp"

namespace unisat {

using Json = nlohmann::ordered_json;

namespace detail {

inline void require_keys(const Json& j, const std::string& section,
                         const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(section + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(section + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

inline Mat2 parse_mat2(const Json& j, const std::string& section) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2) {
    throw ConfigError(section + ": expected a 2x2 matrix");
  }
  Mat2 m;
  m << j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(), j[1][1].get<double>();
  return m;
}

inline Json dump_mat2(const Mat2& m) {
  return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

}  // namespace detail

inline Json scenario_to_json(const Scenario& sc) {
  Json j;
  j["workspace"] = {{"min_x", sc.workspace.min_x},
                    {"min_y", sc.workspace.min_y},
                    {"max_x", sc.workspace.max_x},
                    {"max_y", sc.workspace.max_y}};
  j["duration"] = sc.duration;
  j["seed"] = sc.seed;
  Json clusters = Json::array();
  for (const auto& c : sc.prior.clusters) {
    Json jc;
    if (const auto* u = std::get_if<UniformRect>(&c.spatial)) {
      jc["spatial"] = {{"kind", "uniform"},
                       {"min_x", u->rect.min_x},
                       {"min_y", u->rect.min_y},
                       {"max_x", u->rect.max_x},
                       {"max_y", u->rect.max_y}};
    } else {
      const auto& gm = std::get<GaussianMixture2d>(c.spatial);
      Json comps = Json::array();
      for (const auto& g : gm.components) {
        comps.push_back({{"weight", g.weight},
                         {"mean", Json::array({g.mean.x(), g.mean.y()})},
                         {"cov", detail::dump_mat2(g.cov)}});
      }
      jc["spatial"] = {{"kind", "gaussian_mixture"}, {"components", comps}};
    }
    jc["cardinality"] = c.cardinality;
    if (!c.truth_cardinality.empty()) jc["truth_cardinality"] = c.truth_cardinality;
    clusters.push_back(std::move(jc));
  }
  j["clusters"] = std::move(clusters);
  j["sensor"] = {{"detection_plateau", sc.sensor.detection_plateau},
                 {"inner_radius", sc.sensor.inner_radius},
                 {"outer_radius", sc.sensor.outer_radius},
                 {"clutter_rate", sc.sensor.clutter_rate},
                 {"noise_cov", detail::dump_mat2(sc.sensor.noise_cov)}};
  j["motion"] = {{"position_noise_std", sc.motion.position_noise_std},
                 {"velocity_noise_std", sc.motion.velocity_noise_std},
                 {"survival_smc", sc.motion.survival_smc},
                 {"survival_gm", sc.motion.survival_gm}};
  j["planner"] = {{"horizon", sc.planner.horizon},
                  {"sampling_interval", sc.planner.sampling_interval},
                  {"hypervolume_unit", sc.planner.hypervolume_unit},
                  {"action_count", sc.planner.action_count},
                  {"step_length", sc.planner.step_length},
                  {"entropy_sign_convention",
                   sc.planner.entropy_sign == EntropySign::paper ? "paper" : "shannon"}};
  j["filter_caps"] = {{"max_hypotheses", sc.filter_caps.max_hypotheses},
                      {"k_best", sc.filter_caps.k_best},
                      {"min_existence", sc.filter_caps.min_existence},
                      {"particles_per_track", sc.filter_caps.particles_per_track},
                      {"promotion_trace_threshold", sc.filter_caps.promotion_trace_threshold},
                      {"birth_probability", sc.filter_caps.birth_probability},
                      {"birth_assoc_threshold", sc.filter_caps.birth_assoc_threshold},
                      {"prior_merge_cap", sc.filter_caps.prior_merge_cap}};
  j["metric"] = {{"cutoff", sc.metric.cutoff}, {"order", sc.metric.order}, {"window", sc.metric.window}};
  return j;
}

inline Scenario scenario_from_json(const Json& j) {
  detail::require_keys(j, "config",
                       {"workspace", "duration", "seed", "clusters", "sensor", "motion", "planner",
                        "filter_caps", "metric"});
  Scenario sc;

  const Json& w = j.at("workspace");
  detail::require_keys(w, "workspace", {"min_x", "min_y", "max_x", "max_y"});
  sc.workspace = {w.at("min_x").get<double>(), w.at("min_y").get<double>(),
                  w.at("max_x").get<double>(), w.at("max_y").get<double>()};
  if (sc.workspace.area() <= 0.0) throw ConfigError("workspace: must have positive area");

  sc.duration = j.at("duration").get<int>();
  if (sc.duration < 1) throw ConfigError("duration: must be >= 1");
  sc.seed = detail::get_or<std::uint64_t>(j, "seed", 0);

  for (const Json& jc : j.at("clusters")) {
    detail::require_keys(jc, "cluster", {"spatial", "cardinality", "truth_cardinality"});
    Cluster c;
    const Json& sp = jc.at("spatial");
    const std::string kind = sp.at("kind").get<std::string>();
    if (kind == "uniform") {
      detail::require_keys(sp, "spatial", {"kind", "min_x", "min_y", "max_x", "max_y"});
      c.spatial = UniformRect{{sp.at("min_x").get<double>(), sp.at("min_y").get<double>(),
                               sp.at("max_x").get<double>(), sp.at("max_y").get<double>()}};
    } else if (kind == "gaussian_mixture") {
      detail::require_keys(sp, "spatial", {"kind", "components"});
      GaussianMixture2d gm;
      for (const Json& jg : sp.at("components")) {
        detail::require_keys(jg, "spatial component", {"weight", "mean", "cov"});
        Gaussian2d g;
        g.weight = jg.at("weight").get<double>();
        g.mean = {jg.at("mean")[0].get<double>(), jg.at("mean")[1].get<double>()};
        g.cov = detail::parse_mat2(jg.at("cov"), "spatial component cov");
        gm.components.push_back(g);
      }
      c.spatial = std::move(gm);
    } else {
      throw ConfigError("spatial: unknown kind '" + kind + "'");
    }
    c.cardinality = jc.at("cardinality").get<std::vector<double>>();
    double total = 0.0;
    for (double p : c.cardinality) total += p;
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("cardinality: pmf must sum to 1");
    if (jc.contains("truth_cardinality")) {
      c.truth_cardinality = jc.at("truth_cardinality").get<std::vector<double>>();
      total = 0.0;
      for (double p : c.truth_cardinality) total += p;
      if (std::abs(total - 1.0) > 1e-9) throw ConfigError("truth_cardinality: pmf must sum to 1");
    }
    sc.prior.clusters.push_back(std::move(c));
  }

  const Json& s = j.at("sensor");
  detail::require_keys(s, "sensor",
                       {"detection_plateau", "inner_radius", "outer_radius", "clutter_rate", "noise_cov"});
  sc.sensor.detection_plateau = s.at("detection_plateau").get<double>();
  sc.sensor.inner_radius = s.at("inner_radius").get<double>();
  sc.sensor.outer_radius = s.at("outer_radius").get<double>();
  sc.sensor.clutter_rate = s.at("clutter_rate").get<double>();
  sc.sensor.noise_cov = detail::parse_mat2(s.at("noise_cov"), "sensor noise_cov");

  const Json& mo = j.at("motion");
  detail::require_keys(mo, "motion",
                       {"position_noise_std", "velocity_noise_std", "survival_smc", "survival_gm"});
  sc.motion.position_noise_std = mo.at("position_noise_std").get<double>();
  sc.motion.velocity_noise_std = mo.at("velocity_noise_std").get<double>();
  sc.motion.survival_smc = mo.at("survival_smc").get<double>();
  sc.motion.survival_gm = mo.at("survival_gm").get<double>();

  const Json& p = j.at("planner");
  detail::require_keys(p, "planner",
                       {"horizon", "sampling_interval", "hypervolume_unit", "action_count",
                        "step_length", "entropy_sign_convention"});
  sc.planner.horizon = p.at("horizon").get<int>();
  sc.planner.sampling_interval = p.at("sampling_interval").get<int>();
  sc.planner.hypervolume_unit = p.at("hypervolume_unit").get<double>();
  sc.planner.action_count = p.at("action_count").get<int>();
  sc.planner.step_length = p.at("step_length").get<double>();
  const std::string sign = p.at("entropy_sign_convention").get<std::string>();
  if (sign == "paper") sc.planner.entropy_sign = EntropySign::paper;
  else if (sign == "shannon") sc.planner.entropy_sign = EntropySign::shannon;
  else throw ConfigError("planner: unknown entropy_sign_convention '" + sign + "'");
  if (sc.planner.sampling_interval < 1 || sc.planner.horizon % sc.planner.sampling_interval != 0) {
    throw ConfigError("planner: horizon must be a positive multiple of sampling_interval");
  }
  if (sc.planner.hypervolume_unit <= 0.0) throw ConfigError("planner: hypervolume_unit must be > 0");

  const Json& fc = j.at("filter_caps");
  detail::require_keys(fc, "filter_caps",
                       {"max_hypotheses", "k_best", "min_existence", "particles_per_track",
                        "promotion_trace_threshold", "birth_probability", "birth_assoc_threshold",
                        "prior_merge_cap"});
  sc.filter_caps.max_hypotheses = fc.at("max_hypotheses").get<int>();
  sc.filter_caps.k_best = fc.at("k_best").get<int>();
  sc.filter_caps.min_existence = fc.at("min_existence").get<double>();
  sc.filter_caps.particles_per_track = fc.at("particles_per_track").get<int>();
  sc.filter_caps.promotion_trace_threshold = fc.at("promotion_trace_threshold").get<double>();
  sc.filter_caps.birth_probability = fc.at("birth_probability").get<double>();
  sc.filter_caps.birth_assoc_threshold = fc.at("birth_assoc_threshold").get<double>();
  sc.filter_caps.prior_merge_cap = fc.at("prior_merge_cap").get<int>();

  const Json& me = j.at("metric");
  detail::require_keys(me, "metric", {"cutoff", "order", "window"});
  sc.metric.cutoff = me.at("cutoff").get<double>();
  sc.metric.order = me.at("order").get<double>();
  sc.metric.window = me.at("window").get<int>();
  if (sc.metric.cutoff <= 0.0 || sc.metric.order < 1.0 || sc.metric.window < 1) {
    throw ConfigError("metric: require cutoff > 0, order >= 1, window >= 1");
  }
  return sc;
}

// Hash of the canonical serialized scenario; changes iff any field changes.
inline std::string scenario_digest(const Scenario& sc) {
  const std::string dump = scenario_to_json(sc).dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(dump)));
  return buf;
}

}  // namespace unisat
