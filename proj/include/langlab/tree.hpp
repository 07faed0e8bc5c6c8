#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

namespace langlab {

// Weighted rooted tree over named leaves. Parsed trees may be n-ary;
// generated (clustering) trees are strictly binary.
struct DendroNode {
  std::string name;                  // leaf name; may be empty for internal
  double length = 1.0;               // edge weight to parent; unused for root
  std::vector<DendroNode> children;  // empty for leaves

  bool is_leaf() const { return children.empty(); }
};

struct DendroTree {
  DendroNode root;

  // Leaf names in left-to-right order.
  std::vector<std::string> leaves() const;
};

// Newick with optional branch lengths, ';' terminated. Missing branch
// lengths default to 1.0. Quoted labels ('...', '' escapes a quote) are
// supported.
DendroTree parse_newick(std::string_view text);

// Inverse of parse_newick up to branch-length formatting (round-trips
// exactly; see format_double).
std::string emit_newick(const DendroTree& tree);

// Weighted path lengths between all leaf pairs, leaves in sorted order.
class LeafPairDistances {
 public:
  LeafPairDistances(std::vector<std::string> leaves, Eigen::MatrixXd d);

  const std::vector<std::string>& leaves() const { return leaves_; }
  int size() const { return static_cast<int>(leaves_.size()); }
  double at(int i, int j) const { return d_(i, j); }
  double at(const std::string& a, const std::string& b) const;
  int index_of(const std::string& leaf) const;  // -1 if absent
  const Eigen::MatrixXd& matrix() const { return d_; }

  // Restriction to a leaf subset (order preserved as given).
  LeafPairDistances restrict(const std::vector<std::string>& subset) const;

 private:
  std::vector<std::string> leaves_;
  Eigen::MatrixXd d_;
};

LeafPairDistances leaf_pair_distances(const DendroTree& tree);

}  // namespace langlab
