#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "langlab/distances.hpp"

namespace langlab::stats {

// Ranks 1..n with ties assigned the average of their positions.
std::vector<double> ranks_average(const std::vector<double>& x);

struct Corr {
  double rho = 0.0;
  double p = 1.0;
};

// Spearman rank correlation; two-sided p-value from the t approximation
// with n-2 degrees of freedom. Requires n >= 3 and rank variance in both
// arguments.
Corr spearman(const std::vector<double>& x, const std::vector<double>& y);

// Spearman over the strict upper triangles, with B's languages aligned to
// A's order first. Errors when the language sets differ.
Corr matrix_correlation(const dist::DistanceMatrix& a,
                        const dist::DistanceMatrix& b);

// Permutation test that relabels B's languages (rows and columns together),
// the appropriate null for correlations between distance matrices whose
// entries share languages. p = (1 + #{|rho_perm| >= |rho_obs|}) /
// (1 + permutations); zero permutations give p = 1. Per-permutation RNG
// streams are forked from the seed.
double mantel_test(const dist::DistanceMatrix& a, const dist::DistanceMatrix& b,
                   int permutations, std::uint64_t seed);

struct CorrTable {
  std::vector<std::string> labels;
  Eigen::MatrixXd rho;  // diagonal 1
  Eigen::MatrixXd p;    // diagonal 0
  bool starred(int i, int j) const { return i != j && p(i, j) < 1e-3; }
};

CorrTable correlation_table(const std::vector<dist::DistanceMatrix>& matrices);

// Long-form CSV `a,b,rho,p,significant` over unordered label pairs.
std::string corr_csv(const CorrTable& t);

// Fixed-width text heatmap with '*' marking p < 0.001.
std::string corr_heatmap(const CorrTable& t);

}  // namespace langlab::stats
