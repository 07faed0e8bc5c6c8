#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "langlab/abstraction.hpp"
#include "langlab/corpus.hpp"
#include "langlab/error.hpp"

using namespace langlab;
using namespace langlab::abstr;

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

const Sentence kCats = make_sentence({{"the", "DET", 2, "det"},
                                      {"cats", "NOUN", 3, "nsubj"},
                                      {"sleep", "VERB", 0, "root"}});

}  // namespace

TEST_CASE("level names round-trip") {
  for (Level l : all_levels()) CHECK(level_from_string(to_string(l)) == l);
  CHECK_THROWS_AS(level_from_string("bogus"), ConfigError);
  CHECK(all_levels().size() == 5);
}

TEST_CASE("raw level splits lowercased forms into characters") {
  auto seq = to_raw(make_sentence({{"The", "X", 0, "root"},
                                   {"cat", "NOUN", 1, "dep"}}),
                    "en");
  CHECK(seq.language == "en");
  CHECK(seq.level == Level::raw);
  CHECK(seq.symbols ==
        std::vector<std::string>{"t", "h", "e", " ", "c", "a", "t"});
}

TEST_CASE("raw level single token") {
  auto seq = to_raw(make_sentence({{"a", "X", 0, "root"}}), "en");
  CHECK(seq.symbols == std::vector<std::string>{"a"});
}

TEST_CASE("raw level lowercases across tokens") {
  auto seq = to_raw(make_sentence({{"Ab", "X", 0, "root"},
                                   {"c", "X", 1, "dep"}}),
                    "en");
  CHECK(seq.symbols == std::vector<std::string>{"a", "b", " ", "c"});
}

TEST_CASE("raw level keeps multibyte characters whole") {
  auto seq = to_raw(make_sentence({{"né", "X", 0, "root"}}), "fr");
  CHECK(seq.symbols == std::vector<std::string>{"n", "é"});
}

TEST_CASE("raw token-level variant keeps whole forms") {
  auto seq = to_raw(make_sentence({{"The", "X", 0, "root"},
                                   {"cat", "NOUN", 1, "dep"}}),
                    "en", false);
  CHECK(seq.symbols == std::vector<std::string>{"the", "cat"});
}

TEST_CASE("func level keeps function words and abstracts the rest") {
  auto seq = to_func_pos(
      make_sentence({{"the", "DET", 2, "det"},
                     {"cat", "NOUN", 3, "nsubj"},
                     {"sleeps", "VERB", 0, "root"}}),
      "en", {"DET"});
  CHECK(seq.level == Level::func);
  CHECK(seq.symbols == std::vector<std::string>{"the", "NOUN", "VERB"});
}

TEST_CASE("func level with all UPOS keeps every lowercased form") {
  auto seq =
      to_func_pos(make_sentence({{"The", "DET", 2, "det"},
                                 {"Cat", "NOUN", 0, "root"}}),
                  "en", {"DET", "NOUN"});
  CHECK(seq.symbols == std::vector<std::string>{"the", "cat"});
}

TEST_CASE("func level rejects an empty function set") {
  CHECK_THROWS_AS(to_func_pos(kCats, "en", {}), ConfigError);
}

TEST_CASE("func subset property: smaller set abstracts no fewer tokens") {
  std::set<std::string> s1{"DET"};
  std::set<std::string> s2{"DET", "VERB"};
  auto a1 = to_func_pos(kCats, "en", s1).symbols;
  auto a2 = to_func_pos(kCats, "en", s2).symbols;
  REQUIRE(a1.size() == a2.size());
  for (size_t i = 0; i < a1.size(); ++i) {
    bool pos2 = a2[i] == kCats.tokens[i].upos;
    bool pos1 = a1[i] == kCats.tokens[i].upos;
    if (pos2) CHECK(pos1);  // replaced under the larger set => under the smaller
  }
}

TEST_CASE("default function set is the UD closed classes") {
  const auto& f = default_func_upos();
  for (const char* u :
       {"ADP", "AUX", "CCONJ", "DET", "PART", "PRON", "SCONJ", "PUNCT"})
    CHECK(f.count(u) == 1);
  CHECK(f.size() == 8);
}

TEST_CASE("pos level maps tokens to their tags in order") {
  auto seq = to_pos(kCats, "en");
  CHECK(seq.level == Level::pos);
  CHECK(seq.symbols == std::vector<std::string>{"DET", "NOUN", "VERB"});
  CHECK(to_pos(make_sentence({{"x", "ADV", 0, "root"}}), "en").symbols ==
        std::vector<std::string>{"ADV"});
}

TEST_CASE("pos and deprel outputs have one symbol per token") {
  CHECK(to_pos(kCats, "en").symbols.size() == kCats.tokens.size());
  CHECK(to_deprel(kCats, "en").symbols.size() == kCats.tokens.size());
}

TEST_CASE("phrase level hand example") {
  auto trees =
      parse_bracketed("(S (NP (DET the) (NOUN cat)) (VP (VERB sleeps)))");
  auto seq = to_phrase(trees[0], "en", {"DET"}, {});
  CHECK(seq.level == Level::phrase);
  CHECK(seq.symbols == std::vector<std::string>{"(", "S", "(", "NP", "the",
                                                "NOUN", ")", "(", "VP", "VERB",
                                                ")", ")"});
}

TEST_CASE("phrase level single preterminal degenerates to its POS") {
  auto trees = parse_bracketed("(NOUN cat)");
  auto seq = to_phrase(trees[0], "en", {"PUNCT"}, {});
  CHECK(seq.symbols == std::vector<std::string>{"NOUN"});
}

TEST_CASE("phrase level keeps function terminals lowercased") {
  auto trees = parse_bracketed("(NP (DET The) (NOUN Cat))");
  auto seq = to_phrase(trees[0], "en", {"DET"}, {});
  CHECK(seq.symbols == std::vector<std::string>{"(", "NP", "the", "NOUN", ")"});
}

TEST_CASE("phrase level falls back to the lexicon for bare terminals") {
  auto trees = parse_bracketed("(NP the (NOUN cat))");
  std::map<std::string, std::string> lexicon{{"the", "DET"}};
  auto seq = to_phrase(trees[0], "en", {"DET"}, lexicon);
  CHECK(seq.symbols == std::vector<std::string>{"(", "NP", "the", "NOUN", ")"});
  // same shape but the bare terminal is a content word in the lexicon
  std::map<std::string, std::string> lex2{{"the", "NOUN"}};
  auto seq2 = to_phrase(trees[0], "en", {"DET"}, lex2);
  CHECK(seq2.symbols ==
        std::vector<std::string>{"(", "NP", "NOUN", "NOUN", ")"});
}

TEST_CASE("phrase level errors on a terminal with no preterminal or lexicon") {
  auto trees = parse_bracketed("(NP blorp (NOUN cat))");
  CHECK_THROWS_AS(to_phrase(trees[0], "en", {"DET"}, {}), ValidationError);
}

TEST_CASE("deprel level hand example") {
  auto seq = to_deprel(make_sentence({{"the", "DET", 2, "det"},
                                      {"cat", "NOUN", 0, "root"}}),
                       "en");
  CHECK(seq.level == Level::deprel);
  CHECK(seq.symbols ==
        std::vector<std::string>{"det:DET:R:NOUN", "root:NOUN:ROOT:ROOT"});
}

TEST_CASE("deprel level single root token") {
  auto seq = to_deprel(make_sentence({{"go", "VERB", 0, "root"}}), "en");
  CHECK(seq.symbols == std::vector<std::string>{"root:VERB:ROOT:ROOT"});
}

TEST_CASE("deprel level direction flips with head position") {
  auto left = to_deprel(make_sentence({{"cat", "NOUN", 2, "nsubj"},
                                       {"sleeps", "VERB", 0, "root"}}),
                        "en");
  auto right = to_deprel(make_sentence({{"sleeps", "VERB", 0, "root"},
                                        {"cat", "NOUN", 1, "nsubj"}}),
                         "en");
  CHECK(left.symbols[0] == "nsubj:NOUN:R:VERB");
  CHECK(right.symbols[1] == "nsubj:NOUN:L:VERB");
}

TEST_CASE("deprel_symbol formats the four fields") {
  CHECK(deprel_symbol("det", "DET", 'R', "NOUN") == "det:DET:R:NOUN");
}
