#pragma once

#include <Eigen/Core>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "langlab/corpus.hpp"
#include "langlab/tree.hpp"

namespace langlab::dist {

// Labelled symmetric matrix of pairwise language distances. Construction
// enforces symmetry (1e-12), zero diagonal, finite non-negative entries.
class DistanceMatrix {
 public:
  static DistanceMatrix make(std::vector<std::string> languages,
                             Eigen::MatrixXd values, std::string label);

  const std::vector<std::string>& languages() const { return languages_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::string& label() const { return label_; }
  int size() const { return static_cast<int>(languages_.size()); }
  double at(int i, int j) const { return values_(i, j); }
  int index_of(const std::string& lang) const;  // -1 if absent

  // Strict upper triangle, row-major (i<j).
  std::vector<double> upper_triangle() const;

  DistanceMatrix restrict(const std::vector<std::string>& subset) const;

 private:
  DistanceMatrix() = default;
  std::vector<std::string> languages_;
  Eigen::MatrixXd values_;
  std::string label_;
};

// CSV with a language-ID header row and column, 9 significant digits.
std::string to_csv(const DistanceMatrix& m);
DistanceMatrix distance_matrix_from_csv(std::string_view text,
                                        const std::string& label);

// 1 - cos(v_i, v_j) with a zero diagonal; errors on zero-norm vectors.
DistanceMatrix cosine_distance_matrix(std::vector<std::string> languages,
                                      const std::vector<Eigen::VectorXd>& vecs,
                                      std::string label);

// Dependency link key: head POS, dependent POS, relation, direction
// ('R' when the head is to the right of the dependent).
struct LinkKey {
  std::string head_upos;
  std::string dep_upos;
  std::string deprel;
  char dir = 'R';

  auto operator<=>(const LinkKey&) const = default;
};

// Relative frequencies of dependency links in one language.
struct StructVector {
  std::string language;
  std::map<LinkKey, double> features;
};

StructVector structural_vector(const Treebank& tb);

// Cosine distance over the union of observed keys (missing keys are 0).
DistanceMatrix structural_distance(const std::vector<StructVector>& vectors);

std::string struct_vectors_tsv(const std::vector<StructVector>& vectors);

// Streaming census of distinct link keys across treebanks.
class StructCensus {
 public:
  void add(const Treebank& tb);
  size_t size() const { return keys_.size(); }

 private:
  std::set<LinkKey> keys_;
};

struct GeoTable {
  std::map<std::string, std::pair<double, double>> coords;  // lang -> lat,lon
};

// CSV `lang,lat,lon` in decimal degrees; an optional header line starting
// with "lang" is skipped. Validates coordinate ranges.
GeoTable load_coordinates(std::string_view text);

double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Great-circle distances in kilometres; errors on languages missing from
// the table.
DistanceMatrix geo_distance(const GeoTable& table,
                            const std::vector<std::string>& languages);

// Weighted path length between gold-tree leaves; errors listing languages
// absent from the tree.
DistanceMatrix genetic_distance(const DendroTree& gold,
                                const std::vector<std::string>& languages);

}  // namespace langlab::dist
