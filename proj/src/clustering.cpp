#include "langlab/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "langlab/error.hpp"

namespace langlab::cluster {

namespace {

std::string fmt_num(double v) { return format_double(v); }

}  // namespace

DendroTree ward_cluster(const dist::DistanceMatrix& m) {
  const int n = m.size();
  if (n < 2) throw ValidationError("ward_cluster: need at least 2 items");

  struct Cluster {
    DendroNode node;
    double height = 0.0;  // merge height, 0 for leaves
    int size = 0;
  };
  std::vector<Cluster> clusters;
  clusters.reserve(static_cast<size_t>(2 * n - 1));
  for (int i = 0; i < n; ++i) {
    DendroNode leaf;
    leaf.name = m.languages()[static_cast<size_t>(i)];
    clusters.push_back({std::move(leaf), 0.0, 1});
  }

  // d[a][b] for alive cluster ids; grows as merges append new ids.
  std::vector<std::vector<double>> d(static_cast<size_t>(2 * n - 1),
                                     std::vector<double>(static_cast<size_t>(2 * n - 1), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d[static_cast<size_t>(i)][static_cast<size_t>(j)] = m.at(i, j);

  std::vector<int> alive;
  for (int i = 0; i < n; ++i) alive.push_back(i);

  while (alive.size() > 1) {
    int bi = -1, bj = -1;
    double best = 0.0;
    for (size_t a = 0; a < alive.size(); ++a)
      for (size_t b = a + 1; b < alive.size(); ++b) {
        const int i = alive[a], j = alive[b];
        const double dij = d[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (!std::isfinite(dij))
          throw ValidationError("ward_cluster: non-finite distance");
        if (bi < 0 || dij < best) {
          best = dij;
          bi = i;
          bj = j;
        }
      }

    const double h = best;
    const int ni = clusters[static_cast<size_t>(bi)].size;
    const int nj = clusters[static_cast<size_t>(bj)].size;
    DendroNode parent;
    for (int child_id : {bi, bj}) {
      Cluster& child = clusters[static_cast<size_t>(child_id)];
      child.node.length = std::max(0.0, (h - child.height) / 2.0);
      parent.children.push_back(std::move(child.node));
    }
    const int id = static_cast<int>(clusters.size());
    clusters.push_back({std::move(parent), h, ni + nj});

    // Ward update in distance space: squared distances obey Lance-Williams.
    for (int k : alive) {
      if (k == bi || k == bj) continue;
      const int nk = clusters[static_cast<size_t>(k)].size;
      const double dik = d[static_cast<size_t>(bi)][static_cast<size_t>(k)];
      const double djk = d[static_cast<size_t>(bj)][static_cast<size_t>(k)];
      const double sq =
          ((ni + nk) * dik * dik + (nj + nk) * djk * djk - nk * h * h) /
          static_cast<double>(ni + nj + nk);
      const double dnew = std::sqrt(std::max(0.0, sq));
      d[static_cast<size_t>(id)][static_cast<size_t>(k)] = dnew;
      d[static_cast<size_t>(k)][static_cast<size_t>(id)] = dnew;
    }

    std::vector<int> next;
    for (int k : alive)
      if (k != bi && k != bj) next.push_back(k);
    next.push_back(id);
    alive = std::move(next);
  }

  DendroTree tree;
  tree.root = std::move(clusters[static_cast<size_t>(alive.front())].node);
  return tree;
}

DendroTree ward_cluster(const std::vector<std::string>& languages,
                        const std::vector<Eigen::VectorXd>& vectors) {
  return ward_cluster(
      dist::cosine_distance_matrix(languages, vectors, "embedding"));
}

double tree_distance(const LeafPairDistances& a, const LeafPairDistances& b,
                     bool normalize) {
  if (a.leaves() != b.leaves()) {
    std::set<std::string> sa(a.leaves().begin(), a.leaves().end());
    std::set<std::string> sb(b.leaves().begin(), b.leaves().end());
    std::string only_a, only_b;
    for (const auto& l : sa)
      if (!sb.count(l)) only_a += " " + l;
    for (const auto& l : sb)
      if (!sa.count(l)) only_b += " " + l;
    throw ValidationError("tree_distance: leaf sets differ; only in first:" +
                          (only_a.empty() ? " (none)" : only_a) +
                          "; only in second:" +
                          (only_b.empty() ? " (none)" : only_b));
  }
  const int n = static_cast<int>(a.leaves().size());
  if (n < 2) throw ValidationError("tree_distance: need at least 2 leaves");
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;

  double scale_a = 1.0, scale_b = 1.0;
  if (normalize) {
    double sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        sum_a += a.at(i, j);
        sum_b += b.at(i, j);
      }
    if (sum_a <= 0.0 || sum_b <= 0.0)
      throw ValidationError("tree_distance: zero mean leaf-pair distance");
    scale_a = pairs / sum_a;
    scale_b = pairs / sum_b;
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double diff = a.at(i, j) * scale_a - b.at(i, j) * scale_b;
      total += diff * diff;
    }
  return normalize ? total / pairs : total;
}

double tree_distance(const DendroTree& gold, const DendroTree& generated,
                     bool normalize) {
  return tree_distance(leaf_pair_distances(gold),
                       leaf_pair_distances(generated), normalize);
}

DendroTree random_binary_tree(std::vector<std::string> leaves, Rng& rng) {
  if (leaves.size() < 2)
    throw ValidationError("random_binary_tree: need at least 2 leaves");
  std::vector<DendroNode> pool;
  pool.reserve(leaves.size());
  for (auto& name : leaves) {
    DendroNode leaf;
    leaf.name = std::move(name);
    pool.push_back(std::move(leaf));
  }
  while (pool.size() > 1) {
    const size_t i = static_cast<size_t>(rng.uniform_int(pool.size()));
    size_t j = static_cast<size_t>(rng.uniform_int(pool.size() - 1));
    if (j >= i) ++j;
    const size_t lo = std::min(i, j), hi = std::max(i, j);
    DendroNode parent;
    parent.children.push_back(std::move(pool[lo]));
    parent.children.push_back(std::move(pool[hi]));
    pool[lo] = std::move(parent);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  DendroTree tree;
  tree.root = std::move(pool.front());
  return tree;
}

BaselineResult random_tree_baseline(const DendroTree& gold, int trials,
                                    std::uint64_t seed) {
  return random_tree_baseline(leaf_pair_distances(gold), trials, seed);
}

BaselineResult random_tree_baseline(const LeafPairDistances& gold_lpd,
                                    int trials, std::uint64_t seed) {
  if (trials <= 0) throw ConfigError("random_tree_baseline: trials must be positive");
  const std::vector<std::string> leaves = gold_lpd.leaves();

  BaselineResult r;
  r.samples.reserve(static_cast<size_t>(trials));
  Rng master(seed);
  for (int t = 0; t < trials; ++t) {
    Rng trial = master.fork(static_cast<std::uint64_t>(t));
    DendroTree random = random_binary_tree(leaves, trial);
    r.samples.push_back(
        tree_distance(gold_lpd, leaf_pair_distances(random), true));
  }

  double sum = 0.0;
  for (double s : r.samples) sum += s;
  r.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double sq = 0.0;
    for (double s : r.samples) sq += (s - r.mean) * (s - r.mean);
    r.std_dev = std::sqrt(sq / static_cast<double>(trials - 1));
  }
  return r;
}

double percentile(std::vector<double> samples, double pct) {
  if (samples.empty()) throw ValidationError("percentile: no samples");
  if (pct < 0.0 || pct > 100.0)
    throw ConfigError("percentile: pct must be in [0, 100]");
  std::sort(samples.begin(), samples.end());
  const double pos = pct / 100.0 * static_cast<double>(samples.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

std::string baseline_csv(const BaselineResult& r) {
  std::string out = "trial,dist\n";
  for (size_t t = 0; t < r.samples.size(); ++t)
    out += std::to_string(t) + "," + fmt_num(r.samples[t]) + "\n";
  return out;
}

}  // namespace langlab::cluster
