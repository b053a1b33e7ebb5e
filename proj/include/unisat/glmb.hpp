#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <vector>

#include "unisat/track_state.hpp"
#include "unisat/types.hpp"

namespace unisat {

// One row of the track table: a label plus its state density under one
// association history. Hypotheses reference rows by index, so the row index
// doubles as the (label, history) key; rows may be shared between hypotheses
// that agree on the history of that label.
struct Track {
  Label label;
  std::shared_ptr<const TrackState> state;
};

// GLMB component: a claimed set of existing tracks with a weight.
struct Hypothesis {
  std::vector<int> tracks;  // sorted indices into GlmbDensity::table
  double weight = 0.0;
};

struct GlmbDensity {
  std::vector<Track> table;
  std::vector<Hypothesis> hypotheses;

  double total_weight() const {
    double s = 0.0;
    for (const auto& h : hypotheses) s += h.weight;
    return s;
  }

  double expected_cardinality() const {
    double s = 0.0;
    for (const auto& h : hypotheses) s += h.weight * static_cast<double>(h.tracks.size());
    return s;
  }

  // Marginal existence probability per label.
  std::map<Label, double> label_marginals() const {
    std::map<Label, double> r;
    for (const auto& h : hypotheses) {
      for (int t : h.tracks) r[table[t].label] += h.weight;
    }
    return r;
  }

  int max_label_index(int birth_step) const {
    int m = -1;
    for (const auto& t : table) {
      if (t.label.birth_step == birth_step) m = std::max(m, t.label.index);
    }
    return m;
  }
};

inline bool operator==(const GlmbDensity& a, const GlmbDensity& b) {
  if (a.table.size() != b.table.size() || a.hypotheses.size() != b.hypotheses.size()) return false;
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    if (!(a.table[i].label == b.table[i].label)) return false;
    if (!(*a.table[i].state == *b.table[i].state)) return false;
  }
  for (std::size_t i = 0; i < a.hypotheses.size(); ++i) {
    if (a.hypotheses[i].tracks != b.hypotheses[i].tracks) return false;
    if (a.hypotheses[i].weight != b.hypotheses[i].weight) return false;
  }
  return true;
}

struct LmbTrack {
  double existence = 0.0;
  TrackState state;
};

// Labeled multi-Bernoulli density: independent (r, p) per label.
struct LmbDensity {
  std::map<Label, LmbTrack> tracks;
};

// Scales hypothesis weights to sum to 1, preserving ratios and order.
inline GlmbDensity normalize_hypotheses(GlmbDensity density) {
  const double total = density.total_weight();
  if (total <= 0.0) throw AllZeroWeights();
  for (auto& h : density.hypotheses) h.weight /= total;
  return density;
}

// Sums weights of hypotheses with identical track-index sets. Keeps first
// occurrence order.
inline GlmbDensity merge_duplicate_hypotheses(GlmbDensity density) {
  std::map<std::vector<int>, std::size_t> seen;
  std::vector<Hypothesis> out;
  out.reserve(density.hypotheses.size());
  for (auto& h : density.hypotheses) {
    auto [it, inserted] = seen.emplace(h.tracks, out.size());
    if (inserted) {
      out.push_back(std::move(h));
    } else {
      out[it->second].weight += h.weight;
    }
  }
  density.hypotheses = std::move(out);
  return density;
}

// Drops table rows no hypothesis references and remaps indices.
inline GlmbDensity compact(GlmbDensity density) {
  std::vector<int> remap(density.table.size(), -1);
  std::vector<Track> table;
  for (auto& h : density.hypotheses) {
    for (int& t : h.tracks) {
      if (remap[t] < 0) {
        remap[t] = static_cast<int>(table.size());
        table.push_back(std::move(density.table[t]));
      }
      t = remap[t];
    }
    std::sort(h.tracks.begin(), h.tracks.end(),
              [&](int a, int b) { return table[a].label < table[b].label; });
  }
  density.table = std::move(table);
  return density;
}

namespace detail {

// Appends `src` scaled by `w` to a mixture accumulator. Particle clouds are
// concatenated with reweighting; Gaussian components are merged
// component-wise. Mixed-type accumulation moment-matches the cloud side.
struct MixtureAccumulator {
  std::vector<std::pair<double, const TrackState*>> parts;

  void add(double w, const TrackState& s) { parts.emplace_back(w, &s); }

  TrackState finish() const {
    bool all_clouds = true, all_gm = true;
    for (const auto& [w, s] : parts) {
      if (is_cloud(*s)) all_gm = false;
      else all_clouds = false;
    }
    if (all_clouds) {
      int n = 0;
      for (const auto& [w, s] : parts) n += std::get<ParticleCloud>(*s).size();
      ParticleCloud out;
      out.states.resize(kStateDim, n);
      out.weights.resize(n);
      int at = 0;
      for (const auto& [w, s] : parts) {
        const auto& c = std::get<ParticleCloud>(*s);
        out.states.middleCols(at, c.size()) = c.states;
        out.weights.segment(at, c.size()) = w * c.weights;
        at += c.size();
      }
      return out;
    }
    GaussianMixture out;
    for (const auto& [w, s] : parts) {
      if (is_cloud(*s)) {
        GaussianComponent g = moment_match(std::get<ParticleCloud>(*s));
        g.weight = w;
        out.components.push_back(g);
      } else {
        for (const auto& comp : std::get<GaussianMixture>(*s).components) {
          GaussianComponent g = comp;
          g.weight *= w;
          out.components.push_back(g);
        }
      }
    }
    return out;
  }
};

}  // namespace detail

// Marginalizes a (normalized) GLMB to its LMB approximation: existence is
// the summed weight of hypotheses containing the label, state the
// existence-normalized mixture over histories. Preserves the first moment.
inline LmbDensity glmb_to_lmb(const GlmbDensity& density) {
  std::map<Label, double> existence;
  std::map<Label, detail::MixtureAccumulator> mix;
  // Weight attached to each table row = sum of weights of hypotheses using it.
  std::vector<double> row_weight(density.table.size(), 0.0);
  for (const auto& h : density.hypotheses) {
    for (int t : h.tracks) row_weight[t] += h.weight;
  }
  for (std::size_t i = 0; i < density.table.size(); ++i) {
    if (row_weight[i] <= 0.0) continue;
    const auto& row = density.table[i];
    existence[row.label] += row_weight[i];
    mix[row.label].add(row_weight[i], *row.state);
  }
  LmbDensity lmb;
  for (auto& [label, r] : existence) {
    TrackState state = mix[label].finish();
    const double inv = 1.0 / r;
    if (auto* c = std::get_if<ParticleCloud>(&state)) {
      c->weights *= inv;
    } else {
      for (auto& comp : std::get<GaussianMixture>(state).components) comp.weight *= inv;
    }
    lmb.tracks.emplace(label, LmbTrack{std::min(r, 1.0), std::move(state)});
  }
  return lmb;
}

// MAP-cardinality estimate: picks the most probable cardinality, then the
// heaviest hypothesis of that cardinality, and reports each member track's
// mean state.
inline std::vector<std::pair<Label, Vec4>> map_estimate(const GlmbDensity& density) {
  std::map<std::size_t, double> card_weight;
  for (const auto& h : density.hypotheses) card_weight[h.tracks.size()] += h.weight;
  std::size_t best_card = 0;
  double best_w = -1.0;
  for (const auto& [card, w] : card_weight) {
    if (w > best_w) {
      best_w = w;
      best_card = card;
    }
  }
  const Hypothesis* best = nullptr;
  for (const auto& h : density.hypotheses) {
    if (h.tracks.size() != best_card) continue;
    if (!best || h.weight > best->weight) best = &h;
  }
  std::vector<std::pair<Label, Vec4>> out;
  if (!best) return out;
  for (int t : best->tracks) {
    out.emplace_back(density.table[t].label, mean_state(*density.table[t].state));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace unisat
