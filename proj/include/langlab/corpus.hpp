#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace langlab {

struct Token {
  int index = 0;        // 1-based position
  std::string form;     // surface string
  std::string upos;     // universal POS tag
  int head = 0;         // 0 = root, otherwise 1-based index of the head
  std::string deprel;   // dependency relation
};

struct Sentence {
  std::vector<Token> tokens;
};

struct Treebank {
  std::string language;
  std::vector<Sentence> sentences;
};

// Throws ValidationError if the sentence breaks an invariant: contiguous
// 1..n indices, heads in range, head != self, at least one root, non-empty
// upos/deprel. `where` names the sentence in error messages.
void validate_sentence(const Sentence& s, const std::string& where);

// CoNLL-U: 10 tab-separated columns per token line, blank line between
// sentences, '#' comments. Multiword-token ranges (`1-2`) and empty nodes
// (`1.1`) are skipped. Takes columns 1,2,4,7,8 (ID, FORM, UPOS, HEAD,
// DEPREL). LF and CRLF both accepted.
Treebank parse_conllu(std::string_view text, const std::string& language);

// Lenient variant for bulk censuses: sentences failing validation are
// dropped instead of aborting the file; *skipped reports how many.
Treebank parse_conllu_lenient(std::string_view text,
                              const std::string& language, int* skipped);

// PTB-style bracketed tree. Internal nodes carry a constituent or POS
// label; leaves carry the terminal string.
struct BracketTree {
  std::string label;  // internal: node label; terminal: surface string
  bool terminal = false;
  std::vector<BracketTree> children;
};

// One `(LABEL child child ...)` tree per line; whitespace-insensitive, so
// pretty-printed trees spanning lines also parse.
std::vector<BracketTree> parse_bracketed(std::string_view text);

}  // namespace langlab
