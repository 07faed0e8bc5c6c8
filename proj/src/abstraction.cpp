#include "langlab/abstraction.hpp"

#include "langlab/error.hpp"
#include "langlab/util.hpp"

namespace langlab::abstr {

const char* to_string(Level level) {
  switch (level) {
    case Level::raw: return "raw";
    case Level::func: return "func";
    case Level::pos: return "pos";
    case Level::phrase: return "phrase";
    case Level::deprel: return "deprel";
  }
  return "?";
}

Level level_from_string(const std::string& name) {
  for (Level l : all_levels())
    if (name == to_string(l)) return l;
  throw ConfigError("unknown abstraction level '" + name +
                    "' (expected raw|func|pos|phrase|deprel)");
}

std::vector<Level> all_levels() {
  return {Level::raw, Level::func, Level::pos, Level::phrase, Level::deprel};
}

const std::set<std::string>& default_func_upos() {
  static const std::set<std::string> kSet = {"ADP",  "AUX",  "CCONJ", "DET",
                                             "PART", "PRON", "SCONJ", "PUNCT"};
  return kSet;
}

SymbolSequence to_raw(const Sentence& s, const std::string& language,
                      bool char_level) {
  SymbolSequence seq;
  seq.language = language;
  seq.level = Level::raw;
  if (char_level) {
    std::string joined;
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) joined.push_back(' ');
      joined += s.tokens[i].form;
    }
    seq.symbols = utf8_chars(ascii_lower(joined));
  } else {
    for (const Token& t : s.tokens) seq.symbols.push_back(ascii_lower(t.form));
  }
  return seq;
}

SymbolSequence to_func_pos(const Sentence& s, const std::string& language,
                           const std::set<std::string>& func_upos) {
  if (func_upos.empty())
    throw ConfigError("to_func_pos: function-word UPOS set must be non-empty");
  SymbolSequence seq;
  seq.language = language;
  seq.level = Level::func;
  for (const Token& t : s.tokens)
    seq.symbols.push_back(func_upos.count(t.upos) ? ascii_lower(t.form)
                                                  : t.upos);
  return seq;
}

SymbolSequence to_pos(const Sentence& s, const std::string& language) {
  SymbolSequence seq;
  seq.language = language;
  seq.level = Level::pos;
  for (const Token& t : s.tokens) seq.symbols.push_back(t.upos);
  return seq;
}

namespace {

bool is_preterminal(const BracketTree& t) {
  return !t.terminal && t.children.size() == 1 && t.children[0].terminal;
}

void phrase_walk(const BracketTree& t,
                 const std::set<std::string>& func_upos,
                 const std::map<std::string, std::string>& lexicon,
                 std::vector<std::string>& out) {
  if (t.terminal) {
    auto it = lexicon.find(t.label);
    if (it == lexicon.end())
      throw ValidationError("phrase: terminal '" + t.label +
                            "' has no preterminal parent and no lexicon entry");
    if (func_upos.count(it->second))
      out.push_back(ascii_lower(t.label));
    else
      out.push_back(it->second);
    return;
  }
  if (is_preterminal(t)) {
    if (func_upos.count(t.label))
      out.push_back(ascii_lower(t.children[0].label));
    else
      out.push_back(t.label);
    return;
  }
  out.push_back("(");
  out.push_back(t.label);
  for (const auto& c : t.children) phrase_walk(c, func_upos, lexicon, out);
  out.push_back(")");
}

}  // namespace

SymbolSequence to_phrase(const BracketTree& tree, const std::string& language,
                         const std::set<std::string>& func_upos,
                         const std::map<std::string, std::string>& lexicon) {
  SymbolSequence seq;
  seq.language = language;
  seq.level = Level::phrase;
  phrase_walk(tree, func_upos, lexicon, seq.symbols);
  return seq;
}

std::string deprel_symbol(const std::string& deprel, const std::string& pos,
                          char dir, const std::string& head_pos) {
  std::string out = deprel;
  out.push_back(':');
  out += pos;
  out.push_back(':');
  if (dir == 'T') {
    out += "ROOT:";
  } else {
    out.push_back(dir);
    out.push_back(':');
  }
  out += head_pos;
  return out;
}

SymbolSequence to_deprel(const Sentence& s, const std::string& language) {
  SymbolSequence seq;
  seq.language = language;
  seq.level = Level::deprel;
  for (const Token& t : s.tokens) {
    if (t.head == 0) {
      seq.symbols.push_back(deprel_symbol(t.deprel, t.upos, 'T', "ROOT"));
    } else {
      char dir = t.head > t.index ? 'R' : 'L';
      const std::string& head_pos =
          s.tokens[static_cast<size_t>(t.head - 1)].upos;
      seq.symbols.push_back(deprel_symbol(t.deprel, t.upos, dir, head_pos));
    }
  }
  return seq;
}

}  // namespace langlab::abstr
