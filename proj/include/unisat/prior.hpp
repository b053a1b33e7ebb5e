#pragma once

#include <algorithm>
#include <queue>
#include <set>
#include <variant>
#include <vector>

#include "unisat/glmb.hpp"
#include "unisat/rng.hpp"

namespace unisat {

struct Gaussian2d {
  double weight = 1.0;
  Vec2 mean = Vec2::Zero();
  Mat2 cov = Mat2::Identity();
};

struct GaussianMixture2d {
  std::vector<Gaussian2d> components;
};

struct UniformRect {
  Rect rect;
};

// Spatial part of a population-count prior: where objects are likely to be.
using SpatialDensity = std::variant<GaussianMixture2d, UniformRect>;

// One prior cluster: a spatial density over position plus a cardinality pmf
// rho(n) over how many objects the cluster holds.
struct Cluster {
  SpatialDensity spatial;
  std::vector<double> cardinality;        // rho(0), rho(1), ...
  std::vector<double> truth_cardinality;  // empty -> same as `cardinality`

  const std::vector<double>& truth_pmf() const {
    return truth_cardinality.empty() ? cardinality : truth_cardinality;
  }
};

struct PopulationPrior {
  std::vector<Cluster> clusters;
};

inline double pmf_expectation(const std::vector<double>& pmf) {
  double e = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) e += static_cast<double>(n) * pmf[n];
  return e;
}

// Largest n with rho(n) > 0; trailing exact zeros excluded.
inline int max_cardinality(const std::vector<double>& pmf) {
  for (int n = static_cast<int>(pmf.size()) - 1; n >= 0; --n) {
    if (pmf[static_cast<std::size_t>(n)] > 0.0) return n;
  }
  throw EmptyPmf();
}

inline Vec2 sample_position(const SpatialDensity& spatial, Rng& rng) {
  if (const auto* u = std::get_if<UniformRect>(&spatial)) {
    return {rng.uniform(u->rect.min_x, u->rect.max_x), rng.uniform(u->rect.min_y, u->rect.max_y)};
  }
  const auto& gm = std::get<GaussianMixture2d>(spatial);
  std::vector<double> w;
  w.reserve(gm.components.size());
  for (const auto& g : gm.components) w.push_back(g.weight);
  const auto& g = gm.components[static_cast<std::size_t>(rng.categorical(w))];
  const Eigen::LLT<Mat2> llt(g.cov);
  return rng.normal_vec<2>(g.mean, Mat2(llt.matrixL()));
}

// Equal-weight particle cloud drawn from the cluster's spatial density.
// Velocities start at zero; the random-walk process noise absorbs motion.
inline ParticleCloud sample_track_particles(const Cluster& cluster, int n_particles, Rng& rng) {
  ParticleCloud cloud;
  cloud.states.setZero(kStateDim, n_particles);
  cloud.weights.setConstant(n_particles, 1.0 / static_cast<double>(n_particles));
  for (int i = 0; i < n_particles; ++i) {
    cloud.states.col(i).head<2>() = sample_position(cluster.spatial, rng);
  }
  return cloud;
}

inline double binomial_coefficient(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Initial GLMB for one cluster: all subsets of {l_1..l_N}, with each k-subset
// carrying weight rho(k)/C(N,k) so the cardinality marginal equals rho.
// Every track's cloud is sampled independently from the cluster's spatial
// density.
inline GlmbDensity init_cluster_hypotheses(const Cluster& cluster, int label_base,
                                           int n_particles, Rng& rng) {
  const int n_max = max_cardinality(cluster.cardinality);
  GlmbDensity density;
  density.table.reserve(static_cast<std::size_t>(n_max));
  for (int i = 0; i < n_max; ++i) {
    density.table.push_back(Track{
        Label{0, label_base + i},
        std::make_shared<TrackState>(sample_track_particles(cluster, n_particles, rng))});
  }
  const auto& rho = cluster.cardinality;
  for (std::uint64_t mask = 0; mask < (1ull << n_max); ++mask) {
    Hypothesis h;
    for (int i = 0; i < n_max; ++i) {
      if (mask & (1ull << i)) h.tracks.push_back(i);
    }
    const int k = static_cast<int>(h.tracks.size());
    const double rho_k = k < static_cast<int>(rho.size()) ? rho[static_cast<std::size_t>(k)] : 0.0;
    h.weight = rho_k / binomial_coefficient(n_max, k);
    density.hypotheses.push_back(std::move(h));
  }
  return density;
}

// Product density over independent clusters, truncated to the `cap`
// highest-weight hypotheses and renormalized. Label ranges must be disjoint.
// The top-cap product hypotheses are enumerated lazily (best-first over
// per-cluster choice tuples), never materializing the full product.
inline GlmbDensity merge_cluster_priors(const std::vector<GlmbDensity>& per_cluster, int cap) {
  if (per_cluster.empty()) {
    GlmbDensity trivial;
    trivial.hypotheses.push_back(Hypothesis{{}, 1.0});
    return trivial;
  }
  const std::size_t n_clusters = per_cluster.size();

  // Per-cluster hypotheses sorted by descending weight (ties by track list).
  std::vector<std::vector<const Hypothesis*>> sorted(n_clusters);
  std::vector<int> offsets(n_clusters, 0);
  GlmbDensity merged;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    offsets[c] = static_cast<int>(merged.table.size());
    merged.table.insert(merged.table.end(), per_cluster[c].table.begin(),
                        per_cluster[c].table.end());
    for (const auto& h : per_cluster[c].hypotheses) sorted[c].push_back(&h);
    std::sort(sorted[c].begin(), sorted[c].end(), [](const Hypothesis* a, const Hypothesis* b) {
      if (a->weight != b->weight) return a->weight > b->weight;
      return a->tracks < b->tracks;
    });
  }

  struct Node {
    double weight;
    std::vector<int> choice;
    bool operator<(const Node& o) const {
      if (weight != o.weight) return weight < o.weight;
      return choice > o.choice;
    }
  };
  std::priority_queue<Node> heap;
  std::set<std::vector<int>> visited;
  std::vector<int> root(n_clusters, 0);
  auto tuple_weight = [&](const std::vector<int>& choice) {
    double w = 1.0;
    for (std::size_t c = 0; c < n_clusters; ++c) {
      w *= sorted[c][static_cast<std::size_t>(choice[c])]->weight;
    }
    return w;
  };
  visited.insert(root);
  heap.push({tuple_weight(root), root});
  while (!heap.empty() && static_cast<int>(merged.hypotheses.size()) < cap) {
    const Node node = heap.top();
    heap.pop();
    Hypothesis h;
    h.weight = node.weight;
    for (std::size_t c = 0; c < n_clusters; ++c) {
      for (int t : sorted[c][static_cast<std::size_t>(node.choice[c])]->tracks) {
        h.tracks.push_back(t + offsets[c]);
      }
    }
    std::sort(h.tracks.begin(), h.tracks.end());
    merged.hypotheses.push_back(std::move(h));
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (node.choice[c] + 1 >= static_cast<int>(sorted[c].size())) continue;
      std::vector<int> next = node.choice;
      next[c] += 1;
      if (visited.insert(next).second) heap.push({tuple_weight(next), next});
    }
  }
  return compact(normalize_hypotheses(std::move(merged)));
}

// Full belief initialization from a population-count prior.
inline GlmbDensity init_belief(const PopulationPrior& prior, int n_particles, int merge_cap,
                               Rng& rng) {
  std::vector<GlmbDensity> per_cluster;
  per_cluster.reserve(prior.clusters.size());
  int label_base = 0;
  for (const auto& cluster : prior.clusters) {
    per_cluster.push_back(init_cluster_hypotheses(cluster, label_base, n_particles, rng));
    label_base += max_cardinality(cluster.cardinality);
  }
  return merge_cluster_priors(per_cluster, merge_cap);
}

}  // namespace unisat
