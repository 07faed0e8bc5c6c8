#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "langlab/distances.hpp"
#include "langlab/tree.hpp"
#include "langlab/util.hpp"

namespace langlab::cluster {

// Agglomerative Ward clustering driven by Lance–Williams updates on the
// given distance matrix. Edge weights lay the tree out ultrametrically:
// each child edge spans half the gap between its merge heights. Ties break
// on the lowest cluster-index pair. Note Ward's variance interpretation
// assumes Euclidean distances; we run it on cosine distances by design.
DendroTree ward_cluster(const dist::DistanceMatrix& m);
DendroTree ward_cluster(const std::vector<std::string>& languages,
                        const std::vector<Eigen::VectorXd>& vectors);

// Sum over unordered leaf pairs of squared differences between the two
// trees' path lengths. Raw mode is exactly that sum; normalized mode first
// divides each tree's path lengths by their own mean and divides the sum by
// the pair count, making scores comparable across differently scaled trees.
double tree_distance(const LeafPairDistances& a, const LeafPairDistances& b,
                     bool normalize);
double tree_distance(const DendroTree& gold, const DendroTree& generated,
                     bool normalize);

// Uniformly random sequence of pair merges over the given leaves, every
// edge weight 1.
DendroTree random_binary_tree(std::vector<std::string> leaves, Rng& rng);

struct BaselineResult {
  double mean = 0.0;
  double std_dev = 0.0;  // sample std over trials
  std::vector<double> samples;
};

// Scores `trials` random trees against the gold tree (normalized mode).
// Per-trial RNG streams are forked from the seed, so results do not depend
// on evaluation order.
BaselineResult random_tree_baseline(const DendroTree& gold, int trials,
                                    std::uint64_t seed);
BaselineResult random_tree_baseline(const LeafPairDistances& gold, int trials,
                                    std::uint64_t seed);

// Linear-interpolation percentile, pct in [0,100].
double percentile(std::vector<double> samples, double pct);

std::string baseline_csv(const BaselineResult& r);

}  // namespace langlab::cluster
