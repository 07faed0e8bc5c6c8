#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "langlab/distances.hpp"

namespace langlab::causal {

// One row per observation (here: per unordered language pair), one column
// per measure. Row labels are optional bookkeeping.
struct SampleTable {
  std::vector<std::string> variables;
  std::vector<std::string> row_labels;  // empty or one per row
  Eigen::MatrixXd values;               // rows x variables

  int var_index(const std::string& name) const;  // -1 if absent
  std::string to_csv() const;
  static SampleTable from_csv(std::string_view text);
};

// Aligns the matrices on their (shared) language set and lays out one sample
// row per unordered pair; column names are the matrix labels.
SampleTable sample_table_from_matrices(
    const std::vector<dist::DistanceMatrix>& matrices);

struct CITestConfig {
  double alpha = 0.001;
  int max_cond = -1;  // conditioning-set size cap; -1 = variables - 2
  void validate() const;
};

struct CIResult {
  bool independent = false;
  double p = 0.0;
};

// Partial Spearman correlation of x and y given Z (via inversion of the
// rank-correlation submatrix), Fisher z with sqrt(n - |Z| - 3) scaling,
// two-sided normal p. Independent iff p >= alpha.
CIResult ci_test(const SampleTable& table, int x, int y,
                 const std::vector<int>& z, const CITestConfig& config);

enum class Mark { genuine, potential, spurious, undetermined };
std::string to_string(Mark m);

struct PDAGEdge {
  std::string from, to;  // for spurious/undetermined edges, from < to
  Mark mark = Mark::undetermined;
};

struct MarkedPDAG {
  std::vector<std::string> nodes;
  std::vector<PDAGEdge> edges;
  // Separating set per non-adjacent pair (pair keys ordered from < to).
  std::map<std::pair<std::string, std::string>, std::vector<std::string>>
      sepsets;

  const PDAGEdge* find_edge(const std::string& a, const std::string& b) const;
};

// Pearl & Verma's IC*: exhaustive sepset search per pair, collider
// orientation, then the two closure rules to a fixpoint. Deterministic:
// subsets are scanned smallest-first in index order.
MarkedPDAG ic_star(const SampleTable& table, const CITestConfig& config);

// DOT rendering: genuine = solid arrow, potential = dashed arrow,
// spurious = double-headed, undetermined = plain line.
std::string export_dot(const MarkedPDAG& graph);

// CSV `a,b,sepset` over non-adjacent pairs; empty set rendered as "".
std::string sepsets_csv(const MarkedPDAG& graph);

}  // namespace langlab::causal
