#include "langlab/tree.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

#include "langlab/error.hpp"
#include "langlab/util.hpp"

namespace langlab {

namespace {

void collect_leaves(const DendroNode& n, std::vector<std::string>& out) {
  if (n.is_leaf()) {
    out.push_back(n.name);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  DendroTree parse() {
    skip_ws();
    DendroTree tree;
    tree.root = subtree();
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ';')
      fail("expected ';' terminator");
    ++pos_;
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after ';'");
    std::vector<std::string> ls = tree.leaves();
    std::set<std::string> seen;
    for (const auto& l : ls) {
      if (l.empty()) fail("unnamed leaf");
      if (!seen.insert(l).second)
        throw ValidationError("duplicate leaf name: " + l);
    }
    return tree;
  }

 private:
  DendroNode subtree() {
    skip_ws();
    DendroNode node;
    if (pos_ < text_.size() && text_[pos_] == '(') {
      size_t open_at = pos_;
      ++pos_;
      while (true) {
        node.children.push_back(subtree());
        skip_ws();
        if (pos_ >= text_.size()) {
          pos_ = open_at;
          fail("unbalanced parenthesis");
        }
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
      node.name = label();  // optional internal label
    } else {
      node.name = label();
      if (node.name.empty()) fail("expected leaf label");
    }
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      node.length = number();
    }
    return node;
  }

  std::string label() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      ++pos_;
      std::string out;
      while (true) {
        if (pos_ >= text_.size()) fail("unterminated quoted label");
        char c = text_[pos_++];
        if (c == '\'') {
          if (pos_ < text_.size() && text_[pos_] == '\'') {
            out.push_back('\'');
            ++pos_;
          } else {
            break;
          }
        } else {
          out.push_back(c);
        }
      }
      return out;
    }
    size_t start = pos_;
    while (pos_ < text_.size() && !is_special(text_[pos_])) ++pos_;
    return std::string(trim(text_.substr(start, pos_ - start)));
  }

  double number() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && !is_special(text_[pos_])) ++pos_;
    std::string tok(trim(text_.substr(start, pos_ - start)));
    if (tok.empty()) fail("expected branch length");
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) fail("bad branch length '" + tok + "'");
    return v;
  }

  static bool is_special(char c) {
    return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' ||
           c == '\'';
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("newick: " + what + " at position " +
                     std::to_string(pos_));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

bool needs_quoting(const std::string& name) {
  if (name.empty()) return true;
  for (char c : name) {
    if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' ||
        c == '\'' || c == ' ' || c == '\t' || c == '\n' || c == '\r')
      return true;
  }
  return false;
}

std::string quoted(const std::string& name) {
  std::string out = "'";
  for (char c : name) {
    out.push_back(c);
    if (c == '\'') out.push_back('\'');
  }
  out.push_back('\'');
  return out;
}

void emit_node(const DendroNode& n, bool is_root, std::string& out) {
  if (!n.is_leaf()) {
    out.push_back('(');
    for (size_t i = 0; i < n.children.size(); ++i) {
      if (i) out.push_back(',');
      emit_node(n.children[i], false, out);
    }
    out.push_back(')');
    if (!n.name.empty())
      out += needs_quoting(n.name) ? quoted(n.name) : n.name;
  } else {
    out += needs_quoting(n.name) ? quoted(n.name) : n.name;
  }
  if (!is_root) {
    out.push_back(':');
    out += format_double(n.length);
  }
}

}  // namespace

std::vector<std::string> DendroTree::leaves() const {
  std::vector<std::string> out;
  collect_leaves(root, out);
  return out;
}

DendroTree parse_newick(std::string_view text) {
  return NewickParser(text).parse();
}

std::string emit_newick(const DendroTree& tree) {
  std::string out;
  emit_node(tree.root, true, out);
  out.push_back(';');
  return out;
}

LeafPairDistances::LeafPairDistances(std::vector<std::string> leaves,
                                     Eigen::MatrixXd d)
    : leaves_(std::move(leaves)), d_(std::move(d)) {}

double LeafPairDistances::at(const std::string& a, const std::string& b) const {
  int i = index_of(a);
  int j = index_of(b);
  if (i < 0 || j < 0)
    throw ValidationError("leaf not in tree: " + (i < 0 ? a : b));
  return d_(i, j);
}

int LeafPairDistances::index_of(const std::string& leaf) const {
  auto it = std::find(leaves_.begin(), leaves_.end(), leaf);
  if (it == leaves_.end()) return -1;
  return static_cast<int>(it - leaves_.begin());
}

LeafPairDistances LeafPairDistances::restrict(
    const std::vector<std::string>& subset) const {
  std::vector<std::string> names(subset);
  Eigen::MatrixXd m(names.size(), names.size());
  for (size_t i = 0; i < names.size(); ++i) {
    int a = index_of(names[i]);
    if (a < 0) throw ValidationError("leaf not in tree: " + names[i]);
    for (size_t j = 0; j < names.size(); ++j) {
      int b = index_of(names[j]);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d_(a, b);
    }
  }
  return LeafPairDistances(std::move(names), std::move(m));
}

LeafPairDistances leaf_pair_distances(const DendroTree& tree) {
  std::vector<std::string> names = tree.leaves();
  std::sort(names.begin(), names.end());
  const int n = static_cast<int>(names.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  auto idx = [&](const std::string& name) {
    return static_cast<int>(
        std::lower_bound(names.begin(), names.end(), name) - names.begin());
  };

  // Post-order accumulation: distances from each node to the leaves below
  // it; cross-combine child lists at every internal node.
  struct LeafDist {
    int leaf;
    double dist;
  };
  auto walk = [&](auto&& self, const DendroNode& node) -> std::vector<LeafDist> {
    if (node.is_leaf()) return {{idx(node.name), 0.0}};
    std::vector<LeafDist> acc;
    for (const auto& child : node.children) {
      std::vector<LeafDist> sub = self(self, child);
      for (auto& ld : sub) ld.dist += child.length;
      for (const auto& a : acc) {
        for (const auto& b : sub) {
          double v = a.dist + b.dist;
          d(a.leaf, b.leaf) = v;
          d(b.leaf, a.leaf) = v;
        }
      }
      acc.insert(acc.end(), sub.begin(), sub.end());
    }
    return acc;
  };
  walk(walk, tree.root);
  return LeafPairDistances(std::move(names), std::move(d));
}

}  // namespace langlab
