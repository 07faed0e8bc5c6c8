#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "langlab/error.hpp"
#include "langlab/tree.hpp"
#include "langlab/util.hpp"

using namespace langlab;

namespace {

// Brute-force leaf path lengths: root every path at the top via parent maps.
struct FlatTree {
  std::vector<int> parent;
  std::vector<double> length;
  std::map<std::string, int> leaf_id;
};

void flatten(const DendroNode& n, int parent, FlatTree& ft) {
  int id = static_cast<int>(ft.parent.size());
  ft.parent.push_back(parent);
  ft.length.push_back(n.length);
  if (n.is_leaf()) ft.leaf_id[n.name] = id;
  for (const auto& c : n.children) flatten(c, id, ft);
}

double brute_path(const FlatTree& ft, int a, int b) {
  std::map<int, double> up;  // ancestor -> distance from a
  double d = 0.0;
  for (int x = a; x != -1; x = ft.parent[x]) {
    up[x] = d;
    d += ft.length[x];
  }
  d = 0.0;
  for (int y = b; y != -1; y = ft.parent[y]) {
    auto it = up.find(y);
    if (it != up.end()) return d + it->second;
    d += ft.length[y];
  }
  return -1.0;  // disconnected: impossible
}

DendroNode random_subtree(Rng& rng, int n_leaves, int& next_label) {
  if (n_leaves == 1) {
    DendroNode leaf;
    leaf.name = "L" + std::to_string(next_label++);
    leaf.length = std::round(rng.uniform(0.1, 3.0) * 100) / 100;
    return leaf;
  }
  int left = 1 + rng.uniform_int(n_leaves - 1);
  DendroNode node;
  node.length = std::round(rng.uniform(0.1, 3.0) * 100) / 100;
  node.children.push_back(random_subtree(rng, left, next_label));
  node.children.push_back(random_subtree(rng, n_leaves - left, next_label));
  return node;
}

DendroTree random_tree(Rng& rng, int n_leaves) {
  int next_label = 0;
  DendroTree t;
  t.root = random_subtree(rng, n_leaves, next_label);
  return t;
}

}  // namespace

TEST_CASE("newick hand example with branch lengths") {
  auto t = parse_newick("((A:1,B:1):1,C:2);");
  CHECK(t.leaves() == std::vector<std::string>{"A", "B", "C"});
  auto d = leaf_pair_distances(t);
  CHECK(d.at("A", "B") == doctest::Approx(2.0));
  CHECK(d.at("A", "C") == doctest::Approx(4.0));
  CHECK(d.at("B", "C") == doctest::Approx(4.0));
}

TEST_CASE("missing branch lengths default to one") {
  auto t = parse_newick("(A,B);");
  auto d = leaf_pair_distances(t);
  CHECK(d.at("A", "B") == doctest::Approx(2.0));
}

TEST_CASE("two-leaf tree with explicit lengths") {
  auto d = leaf_pair_distances(parse_newick("(A:3,B:4);"));
  CHECK(d.at("A", "B") == doctest::Approx(7.0));
}

TEST_CASE("duplicate leaf names are rejected") {
  CHECK_THROWS_AS(leaf_pair_distances(parse_newick("((A,A),B);")),
                  ValidationError);
}

TEST_CASE("unbalanced newick is a parse error") {
  CHECK_THROWS_AS(parse_newick("((A,B);"), ParseError);
  CHECK_THROWS_AS(parse_newick("(A,B)"), ParseError);  // missing ';'
  CHECK_THROWS_AS(parse_newick(""), ParseError);
  CHECK_THROWS_AS(parse_newick("(A,B));"), ParseError);
}

TEST_CASE("quoted labels carry spaces and escaped quotes") {
  auto t = parse_newick("('a b':1,'it''s':2);");
  CHECK(t.leaves() == std::vector<std::string>{"a b", "it's"});
  std::string out = emit_newick(t);
  auto t2 = parse_newick(out);
  CHECK(t2.leaves() == t.leaves());
}

TEST_CASE("n-ary trees parse") {
  auto t = parse_newick("(A:1,B:1,C:1);");
  CHECK(t.leaves().size() == 3);
  auto d = leaf_pair_distances(t);
  CHECK(d.at("A", "C") == doctest::Approx(2.0));
}

TEST_CASE("leaf pair distances index leaves in sorted order") {
  auto d = leaf_pair_distances(parse_newick("((C:1,A:1):1,B:2);"));
  CHECK(d.leaves() == std::vector<std::string>{"A", "B", "C"});
  CHECK(d.index_of("A") == 0);
  CHECK(d.index_of("missing") == -1);
  CHECK(d.at(0, 0) == 0.0);
  CHECK(d.at(0, 1) == d.at(1, 0));
}

TEST_CASE("restrict keeps the requested subset in the given order") {
  auto d = leaf_pair_distances(parse_newick("((A:1,B:1):1,(C:1,D:1):1);"));
  auto r = d.restrict({"D", "A"});
  CHECK(r.leaves() == std::vector<std::string>{"D", "A"});
  CHECK(r.at("D", "A") == doctest::Approx(d.at("A", "D")));
  CHECK_THROWS_AS(d.restrict({"A", "Z"}), ValidationError);
}

TEST_CASE("newick round-trips through emit and parse") {
  Rng rng(101);
  for (int i = 0; i < 50; ++i) {
    auto t = random_tree(rng, 2 + rng.uniform_int(9));
    std::string s1 = emit_newick(t);
    auto t2 = parse_newick(s1);
    CHECK(emit_newick(t2) == s1);
    auto d1 = leaf_pair_distances(t);
    auto d2 = leaf_pair_distances(t2);
    REQUIRE(d1.leaves() == d2.leaves());
    for (int a = 0; a < d1.size(); ++a)
      for (int b = 0; b < d1.size(); ++b)
        CHECK(d1.at(a, b) == doctest::Approx(d2.at(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("leaf pair distances match a brute-force path oracle") {
  Rng rng(202);
  for (int i = 0; i < 200; ++i) {
    auto t = random_tree(rng, 2 + rng.uniform_int(9));
    auto d = leaf_pair_distances(t);
    FlatTree ft;
    flatten(t.root, -1, ft);
    for (const auto& [la, ia] : ft.leaf_id)
      for (const auto& [lb, ib] : ft.leaf_id) {
        if (la >= lb) continue;
        CHECK(d.at(la, lb) ==
              doctest::Approx(brute_path(ft, ia, ib)).epsilon(1e-10));
      }
  }
}
