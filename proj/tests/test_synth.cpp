#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "langlab/corpus.hpp"
#include "langlab/distances.hpp"
#include "langlab/error.hpp"
#include "langlab/manifest.hpp"
#include "langlab/synth.hpp"
#include "langlab/tree.hpp"
#include "langlab/util.hpp"

using namespace langlab;
using namespace langlab::synth;

namespace {

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig c;
  c.n_languages = 4;
  c.sentences = 10;
  c.seed = seed;
  return c;
}

std::string corpus_text(const SynthCorpus& c) {
  std::string out = c.coords_csv + emit_newick(c.gold);
  for (const auto& tb : c.treebanks) out += conllu_text(tb);
  for (const auto& [lang, trees] : c.brackets) out += brackets_text(trees);
  return out;
}

}  // namespace

TEST_CASE("generation honors the config and names languages aa onward") {
  auto c = generate(small_config(5));
  REQUIRE(c.treebanks.size() == 4);
  std::vector<std::string> names;
  for (const auto& tb : c.treebanks) {
    names.push_back(tb.language);
    CHECK(tb.sentences.size() == 10);
  }
  CHECK(names == std::vector<std::string>{"aa", "ab", "ac", "ad"});
  for (const auto& name : names) {
    REQUIRE(c.brackets.count(name));
    CHECK(c.brackets.at(name).size() == 10);
  }
  CHECK(c.gold.leaves() == names);
  CHECK(c.seed == 5);
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  auto a = generate(small_config(7));
  auto b = generate(small_config(7));
  CHECK(corpus_text(a) == corpus_text(b));
  auto d = generate(small_config(8));
  CHECK(corpus_text(a) != corpus_text(d));
}

TEST_CASE("generated treebanks satisfy the corpus invariants") {
  auto c = generate(small_config(11));
  for (const auto& tb : c.treebanks) {
    auto parsed = parse_conllu(conllu_text(tb), tb.language);
    REQUIRE(parsed.sentences.size() == tb.sentences.size());
    for (size_t i = 0; i < parsed.sentences.size(); ++i) {
      CHECK_NOTHROW(validate_sentence(parsed.sentences[i], "s"));
      REQUIRE(parsed.sentences[i].tokens.size() ==
              tb.sentences[i].tokens.size());
      for (size_t t = 0; t < parsed.sentences[i].tokens.size(); ++t) {
        CHECK(parsed.sentences[i].tokens[t].form ==
              tb.sentences[i].tokens[t].form);
        CHECK(parsed.sentences[i].tokens[t].head ==
              tb.sentences[i].tokens[t].head);
      }
    }
  }
}

TEST_CASE("generated bracket trees parse back") {
  auto c = generate(small_config(13));
  for (const auto& [lang, trees] : c.brackets) {
    auto parsed = parse_bracketed(brackets_text(trees));
    CHECK(parsed.size() == trees.size());
  }
}

TEST_CASE("coordinates cover every language within range") {
  auto c = generate(small_config(17));
  auto coords = dist::load_coordinates(c.coords_csv);
  for (const auto& tb : c.treebanks) {
    REQUIRE(coords.coords.count(tb.language));
    CHECK(std::abs(coords.coords.at(tb.language).first) <= 90.0);
    CHECK(std::abs(coords.coords.at(tb.language).second) <= 180.0);
  }
}

TEST_CASE("the gold tree round-trips through newick") {
  auto c = generate(small_config(19));
  auto back = parse_newick(emit_newick(c.gold));
  CHECK(back.leaves() == c.gold.leaves());
  auto d1 = leaf_pair_distances(c.gold);
  auto d2 = leaf_pair_distances(back);
  for (size_t i = 0; i < d1.leaves().size(); ++i)
    for (size_t j = i + 1; j < d1.leaves().size(); ++j)
      CHECK(d1.at(i, j) == doctest::Approx(d2.at(i, j)).epsilon(1e-9));
}

TEST_CASE("configs outside the supported range are rejected") {
  auto bad = [](SynthConfig c, const char* needle) {
    CHECK_THROWS_WITH_AS(generate(c), doctest::Contains(needle), ConfigError);
  };
  SynthConfig one = small_config(1);
  one.n_languages = 1;
  bad(one, "at least 2");
  SynthConfig many = small_config(1);
  many.n_languages = 677;
  bad(many, "676");
  SynthConfig none = small_config(1);
  none.sentences = 0;
  bad(none, "sentences");
  SynthConfig neg = small_config(1);
  neg.drift = -1;
  bad(neg, "drift");
}

TEST_CASE("written fixtures load back through the manifest") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "langlab_synth_fixture";
  fs::remove_all(dir);
  auto c = generate(small_config(23));
  write_fixture(c, dir.string(), R"({"epochs": 4, "hidden_dim": 16})");

  auto m = mf::load_manifest((dir / "manifest.json").string());
  CHECK(m.languages == std::vector<std::string>{"aa", "ab", "ac", "ad"});
  CHECK(m.seed == 23);
  CHECK(m.train.epochs == 4);
  CHECK(m.train.hidden_dim == 16);
  for (const auto& lang : m.languages) {
    auto tb = parse_conllu(read_file(m.conllu.at(lang)), lang);
    CHECK(tb.sentences.size() == 10);
    CHECK(parse_bracketed(read_file(m.brackets.at(lang))).size() == 10);
  }
  CHECK(parse_newick(read_file(m.gold_tree)).leaves() == m.languages);
  CHECK(dist::load_coordinates(read_file(m.coordinates)).coords.size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("a bad train block aborts the fixture write") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "langlab_synth_badtrain";
  fs::remove_all(dir);
  auto c = generate(small_config(29));
  CHECK_THROWS_AS(write_fixture(c, dir.string(), R"({"bogus": 1})"),
                  ConfigError);
  fs::remove_all(dir);
}
