#include "langlab/corpus.hpp"

#include <charconv>

#include "langlab/error.hpp"
#include "langlab/util.hpp"

namespace langlab {

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct PendingSentence {
  Sentence sentence;
  int first_line = 0;
  int ordinal = 0;
};

std::string sentence_name(const PendingSentence& p) {
  return "sentence " + std::to_string(p.ordinal) + " (starting line " +
         std::to_string(p.first_line) + ")";
}

Treebank parse_conllu_impl(std::string_view text, const std::string& language,
                           bool lenient, int* skipped) {
  Treebank tb;
  tb.language = language;
  if (skipped) *skipped = 0;

  PendingSentence cur;
  int ordinal = 1;
  int lineno = 0;

  auto flush = [&]() {
    if (cur.sentence.tokens.empty()) return;
    cur.ordinal = ordinal;
    try {
      validate_sentence(cur.sentence, sentence_name(cur));
      tb.sentences.push_back(std::move(cur.sentence));
    } catch (const ValidationError&) {
      if (!lenient) throw;
      if (skipped) ++*skipped;
    }
    cur = PendingSentence{};
    ++ordinal;
  };

  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    if (nl == std::string_view::npos && line.empty() && pos >= text.size())
      break;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      flush();
    } else if (line[0] == '#') {
      // comment
    } else {
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 10)
        throw ParseError("conllu line " + std::to_string(lineno) +
                         ": expected 10 tab-separated columns, got " +
                         std::to_string(cols.size()));
      const std::string& id = cols[0];
      bool is_range = id.find('-') != std::string::npos;
      bool is_empty_node = id.find('.') != std::string::npos;
      if (!is_range && !is_empty_node) {
        Token tok;
        if (!parse_int(id, tok.index) || tok.index < 1)
          throw ParseError("conllu line " + std::to_string(lineno) +
                           ": bad token id '" + id + "'");
        tok.form = cols[1];
        tok.upos = cols[3];
        if (!parse_int(cols[6], tok.head) || tok.head < 0)
          throw ParseError("conllu line " + std::to_string(lineno) +
                           ": bad head '" + cols[6] + "'");
        tok.deprel = cols[7];
        if (cur.sentence.tokens.empty()) cur.first_line = lineno;
        cur.sentence.tokens.push_back(std::move(tok));
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  flush();

  if (tb.sentences.empty() && !(lenient && skipped && *skipped > 0))
    throw ParseError("conllu: no sentences in input for language '" +
                     language + "'");
  return tb;
}

}  // namespace

void validate_sentence(const Sentence& s, const std::string& where) {
  const int n = static_cast<int>(s.tokens.size());
  if (n == 0) throw ValidationError(where + ": empty sentence");
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[static_cast<size_t>(i)];
    if (t.index != i + 1)
      throw ValidationError(where + ": token indices not contiguous (got " +
                            std::to_string(t.index) + " at position " +
                            std::to_string(i + 1) + ")");
    if (t.upos.empty()) throw ValidationError(where + ": empty UPOS");
    if (t.deprel.empty()) throw ValidationError(where + ": empty deprel");
    if (t.head == t.index)
      throw ValidationError(where + ": token " + std::to_string(t.index) +
                            " is its own head");
    if (t.head < 0 || t.head > n)
      throw ValidationError(where + ": head " + std::to_string(t.head) +
                            " out of range for token " +
                            std::to_string(t.index));
    if (t.head == 0) ++roots;
  }
  if (roots == 0) throw ValidationError(where + ": no root token");
}

Treebank parse_conllu(std::string_view text, const std::string& language) {
  return parse_conllu_impl(text, language, false, nullptr);
}

Treebank parse_conllu_lenient(std::string_view text,
                              const std::string& language, int* skipped) {
  return parse_conllu_impl(text, language, true, skipped);
}

namespace {

class BracketParser {
 public:
  explicit BracketParser(std::string_view text) : text_(text) {}

  std::vector<BracketTree> parse_all() {
    std::vector<BracketTree> out;
    skip_ws();
    while (pos_ < text_.size()) {
      if (text_[pos_] != '(')
        fail("expected '(' at start of tree");
      out.push_back(node());
      skip_ws();
    }
    return out;
  }

 private:
  BracketTree node() {
    size_t open_at = pos_;
    ++pos_;  // consume '('
    skip_ws();
    BracketTree t;
    t.label = token();
    if (t.label.empty()) fail("missing node label");
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) {
        pos_ = open_at;
        fail("unbalanced parenthesis");
      }
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (text_[pos_] == '(') {
        t.children.push_back(node());
      } else {
        BracketTree leaf;
        leaf.terminal = true;
        leaf.label = token();
        if (leaf.label.empty()) fail("empty terminal");
        t.children.push_back(std::move(leaf));
      }
    }
    if (t.children.empty())
      throw ValidationError("bracketed: empty constituent '" + t.label +
                            "' at position " + std::to_string(open_at));
    return t;
  }

  std::string token() {
    size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !is_ws(text_[pos_]))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  static bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }

  void skip_ws() {
    while (pos_ < text_.size() && is_ws(text_[pos_])) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("bracketed: " + what + " at position " +
                     std::to_string(pos_));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<BracketTree> parse_bracketed(std::string_view text) {
  return BracketParser(text).parse_all();
}

}  // namespace langlab
