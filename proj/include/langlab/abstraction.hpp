#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "langlab/corpus.hpp"

namespace langlab::abstr {

enum class Level { raw, func, pos, phrase, deprel };

const char* to_string(Level level);
Level level_from_string(const std::string& name);
std::vector<Level> all_levels();

struct SymbolSequence {
  std::string language;
  Level level = Level::raw;
  std::vector<std::string> symbols;
};

// UD closed classes used as the default function-word set.
const std::set<std::string>& default_func_upos();

// Character-level symbols: forms joined by single spaces, split into
// unicode code points, ASCII-lowercased. With char_level=false the symbols
// are whole lowercased forms instead.
SymbolSequence to_raw(const Sentence& s, const std::string& language,
                      bool char_level = true);

// Lowercased form for function-word UPOS, bare UPOS otherwise.
SymbolSequence to_func_pos(const Sentence& s, const std::string& language,
                           const std::set<std::string>& func_upos);

SymbolSequence to_pos(const Sentence& s, const std::string& language);

// Linearized constituency tree: '(' label ... ')' symbols with preterminal
// brackets dropped; terminals become their preterminal POS unless the POS
// is a function class, in which case the lowercased terminal is kept.
// Terminals directly under a multi-child node fall back to the lexicon for
// their POS; a terminal with neither preterminal parent nor lexicon entry
// is an error.
SymbolSequence to_phrase(const BracketTree& tree, const std::string& language,
                         const std::set<std::string>& func_upos,
                         const std::map<std::string, std::string>& lexicon);

// One tuple symbol per token: deprel:POS:dir:headPOS with dir in {L,R,ROOT}
// (R when the head is to the right of the token) and ROOT sentinels for
// root tokens.
SymbolSequence to_deprel(const Sentence& s, const std::string& language);

std::string deprel_symbol(const std::string& deprel, const std::string& pos,
                          char dir, const std::string& head_pos);

}  // namespace langlab::abstr
