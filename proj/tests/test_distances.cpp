#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "langlab/corpus.hpp"
#include "langlab/distances.hpp"
#include "langlab/error.hpp"
#include "langlab/tree.hpp"
#include "langlab/util.hpp"

using namespace langlab;
using namespace langlab::dist;

namespace {

Sentence make_sentence(
    const std::vector<std::tuple<std::string, std::string, int, std::string>>&
        rows) {
  Sentence s;
  int i = 1;
  for (const auto& [form, upos, head, deprel] : rows)
    s.tokens.push_back({i++, form, upos, head, deprel});
  return s;
}

Treebank one_sentence_bank(const std::string& lang, const Sentence& s) {
  Treebank tb;
  tb.language = lang;
  tb.sentences.push_back(s);
  return tb;
}

}  // namespace

TEST_CASE("distance matrix construction enforces its invariants") {
  Eigen::MatrixXd ok(2, 2);
  ok << 0, 1, 1, 0;
  CHECK_NOTHROW(DistanceMatrix::make({"a", "b"}, ok, "t"));

  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(DistanceMatrix::make({"a", "b"}, asym, "t"),
                  ValidationError);

  Eigen::MatrixXd diag(2, 2);
  diag << 0.5, 1, 1, 0;
  CHECK_THROWS_AS(DistanceMatrix::make({"a", "b"}, diag, "t"),
                  ValidationError);

  Eigen::MatrixXd neg(2, 2);
  neg << 0, -1, -1, 0;
  CHECK_THROWS_AS(DistanceMatrix::make({"a", "b"}, neg, "t"), ValidationError);

  Eigen::MatrixXd inf(2, 2);
  inf << 0, INFINITY, INFINITY, 0;
  CHECK_THROWS_AS(DistanceMatrix::make({"a", "b"}, inf, "t"), ValidationError);

  Eigen::MatrixXd wrong(3, 3);
  wrong.setZero();
  CHECK_THROWS_AS(DistanceMatrix::make({"a", "b"}, wrong, "t"),
                  ValidationError);
}

TEST_CASE("distance matrix csv round-trips") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1.25, 2.5, 1.25, 0, 0.125, 2.5, 0.125, 0;
  auto a = DistanceMatrix::make({"aa", "bb", "cc"}, m, "demo");
  auto b = distance_matrix_from_csv(to_csv(a), "demo");
  CHECK(b.languages() == a.languages());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(b.at(i, j) == doctest::Approx(a.at(i, j)).epsilon(1e-9));
}

TEST_CASE("upper triangle is row-major strict upper") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  auto d = DistanceMatrix::make({"a", "b", "c"}, m, "t");
  CHECK(d.upper_triangle() == std::vector<double>{1, 2, 3});
}

TEST_CASE("structural vector hand count") {
  auto tb = one_sentence_bank(
      "en", make_sentence({{"the", "DET", 2, "det"},
                           {"cat", "NOUN", 0, "root"}}));
  auto sv = structural_vector(tb);
  REQUIRE(sv.features.size() == 1);
  LinkKey k{"NOUN", "DET", "det", 'R'};
  REQUIRE(sv.features.count(k) == 1);
  CHECK(sv.features.at(k) == doctest::Approx(1.0));
}

TEST_CASE("structural vector normalizes equal counts to a half") {
  auto tb = one_sentence_bank(
      "en", make_sentence({{"the", "DET", 2, "det"},
                           {"cat", "NOUN", 0, "root"},
                           {"sat", "VERB", 2, "acl"}}));
  auto sv = structural_vector(tb);
  REQUIRE(sv.features.size() == 2);
  for (const auto& [k, v] : sv.features) CHECK(v == doctest::Approx(0.5));
  // direction: head of "sat" (index 3) is "cat" (index 2) -> head to the left
  CHECK(sv.features.count(LinkKey{"NOUN", "VERB", "acl", 'L'}) == 1);
}

TEST_CASE("structural vector rejects a treebank with zero links") {
  auto tb =
      one_sentence_bank("xx", make_sentence({{"hi", "INTJ", 0, "root"}}));
  CHECK_THROWS_AS(structural_vector(tb), ValidationError);
}

TEST_CASE("structural vector frequencies sum to one") {
  Rng rng(41);
  const std::vector<std::string> upos{"NOUN", "VERB", "DET", "ADJ", "ADV"};
  const std::vector<std::string> rels{"det", "amod", "nsubj", "obj"};
  for (int iter = 0; iter < 50; ++iter) {
    Treebank tb;
    tb.language = "zz";
    int n_sents = 1 + rng.uniform_int(5);
    for (int s = 0; s < n_sents; ++s) {
      int n = 2 + rng.uniform_int(6);
      Sentence sent;
      for (int i = 1; i <= n; ++i) {
        int head = (i == 1) ? 0 : (i == 2 ? 1 : rng.uniform_int(i));
        sent.tokens.push_back({i, "w", upos[rng.uniform_int(5)], head,
                               head == 0 ? "root" : rels[rng.uniform_int(4)]});
      }
      tb.sentences.push_back(sent);
    }
    auto sv = structural_vector(tb);
    double sum = 0;
    for (const auto& [k, v] : sv.features) {
      CHECK(v > 0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("structural vector counts match a naive two-pass oracle") {
  Rng rng(43);
  const std::vector<std::string> upos{"NOUN", "VERB", "DET"};
  const std::vector<std::string> rels{"det", "nsubj", "obj"};
  for (int iter = 0; iter < 50; ++iter) {
    Treebank tb;
    tb.language = "zz";
    int n_sents = 1 + rng.uniform_int(4);
    for (int s = 0; s < n_sents; ++s) {
      int n = 2 + rng.uniform_int(5);
      Sentence sent;
      for (int i = 1; i <= n; ++i) {
        int head = (i == 1) ? 0 : (i == 2 ? 1 : rng.uniform_int(i));
        sent.tokens.push_back({i, "w", upos[rng.uniform_int(3)], head,
                               head == 0 ? "root" : rels[rng.uniform_int(3)]});
      }
      tb.sentences.push_back(sent);
    }
    // oracle: raw counts, then normalize
    std::map<LinkKey, double> counts;
    double total = 0;
    for (const auto& sent : tb.sentences)
      for (const auto& t : sent.tokens) {
        if (t.head == 0) continue;
        const auto& h = sent.tokens[static_cast<size_t>(t.head - 1)];
        counts[LinkKey{h.upos, t.upos, t.deprel,
                       t.head > t.index ? 'R' : 'L'}] += 1.0;
        total += 1.0;
      }
    auto sv = structural_vector(tb);
    REQUIRE(sv.features.size() == counts.size());
    for (const auto& [k, c] : counts)
      CHECK(sv.features.at(k) == doctest::Approx(c / total).epsilon(1e-12));
  }
}

TEST_CASE("structural distance identity, disjoint and hand cosine") {
  StructVector a{"aa", {{LinkKey{"N", "D", "det", 'R'}, 0.5},
                        {LinkKey{"V", "N", "nsubj", 'L'}, 0.5}}};
  StructVector b{"bb", {{LinkKey{"N", "D", "det", 'R'}, 1.0}}};
  StructVector c{"cc", {{LinkKey{"V", "A", "advmod", 'L'}, 1.0}}};
  auto m = structural_distance({a, b, c});
  CHECK(m.at(0, 0) == 0.0);
  // disjoint key sets
  CHECK(m.at(m.index_of("bb"), m.index_of("cc")) == doctest::Approx(1.0));
  // {a:0.5,b:0.5} vs {a:1.0}: 1 - 0.5/sqrt(0.5) = 1 - 1/sqrt(2)
  CHECK(m.at(m.index_of("aa"), m.index_of("bb")) ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-9));
  // identical vectors across languages
  StructVector a2 = a;
  a2.language = "a2";
  auto m2 = structural_distance({a, a2});
  CHECK(m2.at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("struct vectors tsv lists one feature per row") {
  StructVector a{"aa", {{LinkKey{"NOUN", "DET", "det", 'R'}, 1.0}}};
  auto tsv = struct_vectors_tsv({a});
  CHECK(tsv.find("aa\tNOUN\tDET\tdet\tR\t1") != std::string::npos);
}

TEST_CASE("struct census counts distinct keys across treebanks") {
  StructCensus census;
  census.add(one_sentence_bank(
      "aa", make_sentence({{"the", "DET", 2, "det"},
                           {"cat", "NOUN", 0, "root"}})));
  CHECK(census.size() == 1);
  census.add(one_sentence_bank(
      "bb", make_sentence({{"the", "DET", 2, "det"},
                           {"cat", "NOUN", 0, "root"},
                           {"big", "ADJ", 2, "amod"}})));
  CHECK(census.size() == 2);
}

TEST_CASE("cosine distance matrix flags zero vectors") {
  std::vector<Eigen::VectorXd> vecs(2, Eigen::VectorXd::Zero(3));
  vecs[0] << 1, 0, 0;
  CHECK_THROWS_AS(cosine_distance_matrix({"a", "b"}, vecs, "t"),
                  ValidationError);
}

TEST_CASE("cosine distance identity and orthogonality") {
  Eigen::VectorXd x(2), y(2), z(2);
  x << 1, 0;
  y << 0, 2;
  z << 3, 0;
  auto m = cosine_distance_matrix({"x", "y", "z"}, {x, y, z}, "t");
  CHECK(m.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.at(0, 2) == doctest::Approx(0.0).epsilon(1e-12));  // scale invariant
}

TEST_CASE("coordinates csv parses with and without header") {
  auto t = load_coordinates("lang,lat,lon\naa,52.52,13.405\nbb,-33.9,151.2\n");
  CHECK(t.coords.size() == 2);
  CHECK(t.coords.at("aa").first == doctest::Approx(52.52));
  auto t2 = load_coordinates("aa,1.5,2.5\n");
  CHECK(t2.coords.at("aa").second == doctest::Approx(2.5));
}

TEST_CASE("coordinates outside valid ranges are rejected") {
  CHECK_THROWS_AS(load_coordinates("aa,91,0\n"), ValidationError);
  CHECK_THROWS_AS(load_coordinates("aa,0,181\n"), ValidationError);
  CHECK_THROWS_AS(load_coordinates("aa,notanumber,0\n"), ParseError);
}

TEST_CASE("haversine analytic cases") {
  CHECK(haversine_km(0, 0, 0, 0) == 0.0);
  CHECK(haversine_km(0, 0, 0, 180) == doctest::Approx(20015.1).epsilon(1e-5));
  CHECK(haversine_km(90, 0, -90, 0) == doctest::Approx(20015.1).epsilon(1e-5));
}

TEST_CASE("haversine is symmetric and satisfies the triangle inequality") {
  Rng rng(47);
  for (int i = 0; i < 200; ++i) {
    double la1 = rng.uniform(-90, 90), lo1 = rng.uniform(-180, 180);
    double la2 = rng.uniform(-90, 90), lo2 = rng.uniform(-180, 180);
    double la3 = rng.uniform(-90, 90), lo3 = rng.uniform(-180, 180);
    double ab = haversine_km(la1, lo1, la2, lo2);
    double ba = haversine_km(la2, lo2, la1, lo1);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    double ac = haversine_km(la1, lo1, la3, lo3);
    double cb = haversine_km(la3, lo3, la2, lo2);
    CHECK(ab <= ac + cb + 1e-6);
  }
}

TEST_CASE("geo distance matrix and missing language error") {
  GeoTable t;
  t.coords["aa"] = {0, 0};
  t.coords["bb"] = {0, 90};
  auto m = geo_distance(t, {"aa", "bb"});
  CHECK(m.at(0, 1) == doctest::Approx(20015.086 / 2).epsilon(1e-4));
  CHECK_THROWS_WITH_AS(geo_distance(t, {"aa", "cc"}),
                       doctest::Contains("cc"), ValidationError);
}

TEST_CASE("genetic distance hand example and identity") {
  auto gold = parse_newick("((A:1,B:1):1,C:2);");
  auto m = genetic_distance(gold, {"A", "B", "C"});
  CHECK(m.at(m.index_of("A"), m.index_of("B")) == doctest::Approx(2.0));
  CHECK(m.at(m.index_of("A"), m.index_of("C")) == doctest::Approx(4.0));
  CHECK(m.at(m.index_of("B"), m.index_of("C")) == doctest::Approx(4.0));
  CHECK(m.at(0, 0) == 0.0);
}

TEST_CASE("genetic distance on a unit star tree is 2 for all pairs") {
  auto gold = parse_newick("(A,B,C,D,E);");
  auto m = genetic_distance(gold, {"A", "B", "C", "D", "E"});
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j)
      if (i != j) CHECK(m.at(i, j) == doctest::Approx(2.0));
}

TEST_CASE("genetic distance lists all missing languages") {
  auto gold = parse_newick("(A:1,B:1);");
  CHECK_THROWS_WITH_AS(genetic_distance(gold, {"A", "X", "Y"}),
                       doctest::Contains("X"), ValidationError);
  try {
    genetic_distance(gold, {"A", "X", "Y"});
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Y") != std::string::npos);
  }
}

TEST_CASE("genetic distance satisfies the four-point condition") {
  Rng rng(53);
  for (int iter = 0; iter < 30; ++iter) {
    // random binary additive tree over up to 8 leaves
    int n = 4 + rng.uniform_int(5);
    std::vector<std::string> langs;
    std::string newick;
    // build nested two-at-a-time: ((((L0,L1),L2),...)
    std::vector<std::string> parts;
    for (int i = 0; i < n; ++i) {
      langs.push_back("L" + std::to_string(i));
      parts.push_back(langs.back() + ":" +
                      format_double(std::round(rng.uniform(0.1, 2.0) * 64) / 64));
    }
    while (parts.size() > 1) {
      int a = rng.uniform_int(static_cast<int>(parts.size()));
      std::string pa = parts[static_cast<size_t>(a)];
      parts.erase(parts.begin() + a);
      int b = rng.uniform_int(static_cast<int>(parts.size()));
      std::string pb = parts[static_cast<size_t>(b)];
      parts.erase(parts.begin() + b);
      parts.push_back(
          "(" + pa + "," + pb + "):" +
          format_double(std::round(rng.uniform(0.1, 2.0) * 64) / 64));
    }
    auto tree = parse_newick(parts[0] + ";");
    auto m = genetic_distance(tree, langs);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c)
          for (int d = c + 1; d < n; ++d) {
            double s1 = m.at(a, b) + m.at(c, d);
            double s2 = m.at(a, c) + m.at(b, d);
            double s3 = m.at(a, d) + m.at(b, c);
            double mx = std::max({s1, s2, s3});
            int at_max = (std::abs(s1 - mx) < 1e-9) +
                         (std::abs(s2 - mx) < 1e-9) +
                         (std::abs(s3 - mx) < 1e-9);
            CHECK(at_max >= 2);  // two of the three sums tie at the maximum
          }
  }
}
