#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <string>
#include <vector>

#include "langlab/causal.hpp"
#include "langlab/distances.hpp"
#include "langlab/error.hpp"
#include "langlab/util.hpp"

using namespace langlab;
using namespace langlab::causal;

namespace {

SampleTable table_of(const std::vector<std::string>& vars,
                     const std::vector<std::vector<double>>& cols) {
  SampleTable t;
  t.variables = vars;
  const int n = static_cast<int>(cols[0].size());
  t.values.resize(n, static_cast<int>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c)
    for (int r = 0; r < n; ++r)
      t.values(r, static_cast<Eigen::Index>(c)) = cols[c][static_cast<size_t>(r)];
  return t;
}

// Linear-Gaussian chain A -> B -> C.
SampleTable chain_table(Rng& rng, int n) {
  std::vector<double> a(static_cast<size_t>(n)), b(a), c(a);
  for (int i = 0; i < n; ++i) {
    a[static_cast<size_t>(i)] = rng.normal();
    b[static_cast<size_t>(i)] = a[static_cast<size_t>(i)] + 0.5 * rng.normal();
    c[static_cast<size_t>(i)] = b[static_cast<size_t>(i)] + 0.5 * rng.normal();
  }
  return table_of({"A", "B", "C"}, {a, b, c});
}

// Collider A -> C <- B with A independent of B.
SampleTable collider_table(Rng& rng, int n) {
  std::vector<double> a(static_cast<size_t>(n)), b(a), c(a);
  for (int i = 0; i < n; ++i) {
    a[static_cast<size_t>(i)] = rng.normal();
    b[static_cast<size_t>(i)] = rng.normal();
    c[static_cast<size_t>(i)] = a[static_cast<size_t>(i)] +
                                b[static_cast<size_t>(i)] + 0.5 * rng.normal();
  }
  return table_of({"A", "B", "C"}, {a, b, c});
}

bool adjacent(const MarkedPDAG& g, const std::string& a,
              const std::string& b) {
  return g.find_edge(a, b) != nullptr;
}

}  // namespace

TEST_CASE("ci test flags an exact copy as dependent") {
  Rng rng(151);
  std::vector<double> x;
  for (int i = 0; i < 200; ++i) x.push_back(rng.normal());
  auto t = table_of({"x", "y"}, {x, x});
  auto r = ci_test(t, 0, 1, {}, {});
  CHECK_FALSE(r.independent);
  CHECK(r.p < 1e-10);
}

TEST_CASE("ci test accepts independent samples") {
  int indep = 0;
  for (int run = 0; run < 50; ++run) {
    Rng rng(300 + static_cast<uint64_t>(run));
    std::vector<double> x, y;
    for (int i = 0; i < 2000; ++i) {
      x.push_back(rng.uniform());
      y.push_back(rng.uniform());
    }
    auto t = table_of({"x", "y"}, {x, y});
    indep += ci_test(t, 0, 1, {}, {}).independent;
  }
  CHECK(indep >= 49);  // alpha 0.001 null acceptance
}

TEST_CASE("conditioning on a collider child opens the path") {
  Rng rng(157);
  auto t = collider_table(rng, 2000);
  auto marginal = ci_test(t, 0, 1, {}, {});
  CHECK(marginal.independent);
  auto given_c = ci_test(t, 0, 1, {2}, {});
  CHECK_FALSE(given_c.independent);
  CHECK(given_c.p < 0.001);
}

TEST_CASE("conditioning on a chain middle closes the path") {
  Rng rng(163);
  auto t = chain_table(rng, 2000);
  CHECK_FALSE(ci_test(t, 0, 2, {}, {}).independent);
  CHECK(ci_test(t, 0, 2, {1}, {}).independent);
}

TEST_CASE("ci test rejects oversized conditioning sets and bad alpha") {
  Rng rng(167);
  auto t = chain_table(rng, 5);
  CHECK_THROWS_AS(ci_test(t, 0, 1, {2}, {}), ValidationError);  // n too small
  CITestConfig bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.alpha = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("ci test rejects a singular conditioning submatrix") {
  Rng rng(173);
  std::vector<double> x, y;
  for (int i = 0; i < 100; ++i) {
    x.push_back(rng.normal());
    y.push_back(rng.normal());
  }
  // two identical conditioning columns make the submatrix singular
  auto t = table_of({"x", "y", "z1", "z2"}, {x, y, x, x});
  CHECK_THROWS_AS(ci_test(t, 0, 1, {2, 3}, {}), ValidationError);
}

TEST_CASE("ic_star on a chain leaves the ends separated by the middle") {
  Rng rng(179);
  auto g = ic_star(chain_table(rng, 2000), {});
  CHECK(adjacent(g, "A", "B"));
  CHECK(adjacent(g, "B", "C"));
  CHECK_FALSE(adjacent(g, "A", "C"));
  auto sep = g.sepsets.at({"A", "C"});
  CHECK(sep == std::vector<std::string>{"B"});
  // no collider at B: neither edge may be spurious (double-headed)
  CHECK(g.find_edge("A", "B")->mark != Mark::spurious);
  CHECK(g.find_edge("B", "C")->mark != Mark::spurious);
}

TEST_CASE("ic_star orients a collider with arrowheads into the child") {
  Rng rng(181);
  auto g = ic_star(collider_table(rng, 2000), {});
  CHECK(adjacent(g, "A", "C"));
  CHECK(adjacent(g, "B", "C"));
  CHECK_FALSE(adjacent(g, "A", "B"));
  // both arrows point into C and carry no genuine mark
  const auto* ac = g.find_edge("A", "C");
  const auto* bc = g.find_edge("B", "C");
  REQUIRE(ac != nullptr);
  REQUIRE(bc != nullptr);
  CHECK(ac->to == "C");
  CHECK(bc->to == "C");
  CHECK(ac->mark == Mark::potential);
  CHECK(bc->mark == Mark::potential);
}

TEST_CASE("a collider with a descendant yields a genuine edge") {
  // A -> C <- B, C -> D: rule one upgrades C -> D to genuine
  Rng rng(191);
  const int n = 2000;
  std::vector<double> a(n), b(n), c(n), d(n);
  for (int i = 0; i < n; ++i) {
    a[static_cast<size_t>(i)] = rng.normal();
    b[static_cast<size_t>(i)] = rng.normal();
    c[static_cast<size_t>(i)] = a[static_cast<size_t>(i)] +
                                b[static_cast<size_t>(i)] + 0.3 * rng.normal();
    d[static_cast<size_t>(i)] = c[static_cast<size_t>(i)] + 0.3 * rng.normal();
  }
  auto g = ic_star(table_of({"A", "B", "C", "D"}, {a, b, c, d}), {});
  const auto* cd = g.find_edge("C", "D");
  REQUIRE(cd != nullptr);
  CHECK(cd->from == "C");
  CHECK(cd->to == "D");
  CHECK(cd->mark == Mark::genuine);
}

TEST_CASE("ic_star on independent columns is edgeless") {
  Rng rng(193);
  const int n = 2000;
  std::vector<double> a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[static_cast<size_t>(i)] = rng.normal();
    b[static_cast<size_t>(i)] = rng.normal();
    c[static_cast<size_t>(i)] = rng.normal();
  }
  auto g = ic_star(table_of({"A", "B", "C"}, {a, b, c}), {});
  CHECK(g.edges.empty());
  CHECK(g.sepsets.size() == 3);
}

TEST_CASE("every non-adjacent pair records a sepset, adjacent pairs none") {
  Rng rng(197);
  auto g = ic_star(chain_table(rng, 2000), {});
  for (size_t i = 0; i < g.nodes.size(); ++i)
    for (size_t j = i + 1; j < g.nodes.size(); ++j) {
      auto key = std::make_pair(g.nodes[i], g.nodes[j]);
      if (adjacent(g, g.nodes[i], g.nodes[j]))
        CHECK(g.sepsets.count(key) == 0);
      else
        CHECK(g.sepsets.count(key) == 1);
    }
}

TEST_CASE("ic_star is invariant under row permutation") {
  Rng rng(199);
  auto t = chain_table(rng, 1000);
  auto g1 = ic_star(t, {});
  // permute rows
  std::vector<int> order(static_cast<size_t>(t.values.rows()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng(7).shuffle(order);
  SampleTable t2 = t;
  for (size_t i = 0; i < order.size(); ++i)
    t2.values.row(static_cast<Eigen::Index>(i)) =
        t.values.row(order[i]);
  auto g2 = ic_star(t2, {});
  CHECK(export_dot(g1) == export_dot(g2));
}

TEST_CASE("ic_star runs are deterministic") {
  Rng rng(211);
  auto t = collider_table(rng, 1000);
  CHECK(export_dot(ic_star(t, {})) == export_dot(ic_star(t, {})));
}

TEST_CASE("sample table csv round-trips") {
  Rng rng(223);
  auto t = chain_table(rng, 10);
  t.row_labels.clear();
  for (int i = 0; i < 10; ++i) t.row_labels.push_back("r" + std::to_string(i));
  auto t2 = SampleTable::from_csv(t.to_csv());
  CHECK(t2.variables == t.variables);
  CHECK(t2.row_labels == t.row_labels);
  REQUIRE(t2.values.rows() == t.values.rows());
  for (Eigen::Index r = 0; r < t.values.rows(); ++r)
    for (Eigen::Index c = 0; c < t.values.cols(); ++c)
      CHECK(t2.values(r, c) == t.values(r, c));
}

TEST_CASE("sample table from matrices lays out one row per pair") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  auto d1 = dist::DistanceMatrix::make({"x", "y", "z"}, m, "one");
  auto d2 = dist::DistanceMatrix::make({"x", "y", "z"}, 2 * m, "two");
  auto t = sample_table_from_matrices({d1, d2});
  CHECK(t.variables == std::vector<std::string>{"one", "two"});
  REQUIRE(t.values.rows() == 3);
  REQUIRE(t.row_labels.size() == 3);
  CHECK(t.row_labels[0] == "x-y");
  CHECK(t.values(0, 0) == 1.0);
  CHECK(t.values(0, 1) == 2.0);
}

TEST_CASE("export_dot maps each mark to its arrow style") {
  MarkedPDAG g;
  g.nodes = {"a", "b", "c", "d", "e"};
  g.edges.push_back({"a", "b", Mark::genuine});
  g.edges.push_back({"b", "c", Mark::potential});
  g.edges.push_back({"c", "d", Mark::spurious});
  g.edges.push_back({"d", "e", Mark::undetermined});
  auto dot = export_dot(g);
  CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
  CHECK(dot.find("dashed") != std::string::npos);
  CHECK(dot.find("dir=both") != std::string::npos);
  CHECK(dot.find("dir=none") != std::string::npos);
  // empty graph still renders every node
  MarkedPDAG empty;
  empty.nodes = {"solo"};
  auto edot = export_dot(empty);
  CHECK(edot.find("solo") != std::string::npos);
  CHECK(edot.find("digraph") != std::string::npos);
}

TEST_CASE("sepsets csv names both pair and set") {
  Rng rng(227);
  auto g = ic_star(chain_table(rng, 2000), {});
  auto csv = sepsets_csv(g);
  CHECK(csv.find("A,C,B") != std::string::npos);
}

TEST_CASE("to_string covers all four marks") {
  CHECK(to_string(Mark::genuine) == std::string("genuine"));
  CHECK(to_string(Mark::potential) == std::string("potential"));
  CHECK(to_string(Mark::spurious) == std::string("spurious"));
  CHECK(to_string(Mark::undetermined) == std::string("undetermined"));
}
