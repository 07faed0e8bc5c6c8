#include "langlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>

#include "langlab/error.hpp"
#include "langlab/manifest.hpp"
#include "langlab/util.hpp"

namespace langlab::synth {

namespace {

constexpr const char* kConsonants = "ptkbdgmnslrvz";
constexpr const char* kVowels = "aeiou";

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Params {
  // logit of P(dependent linearizes right of its head), per relation
  std::map<std::string, double> dir;
  // logit of P(optional slot is present), per relation
  std::map<std::string, double> inc;
};

struct Lexicon {
  std::map<std::string, std::vector<std::string>> words;  // upos -> forms
};

struct TreeNode {
  int id = 0;
  double edge_len = 0.0;  // to parent; 0 for the root
  std::vector<int> children;
  std::string name;  // leaves only
};

std::string syllable(Rng& rng) {
  std::string s;
  s += kConsonants[rng.uniform_int(13)];
  s += kVowels[rng.uniform_int(5)];
  return s;
}

std::string make_word(Rng& rng) {
  const int n = 2 + static_cast<int>(rng.uniform_int(2));
  std::string w;
  for (int i = 0; i < n; ++i) w += syllable(rng);
  return w;
}

Params proto_params(Rng& rng) {
  Params p;
  const std::map<std::string, double> dir_base = {
      {"nsubj", -1.0}, {"obj", 0.5},  {"det", -1.5}, {"amod", 0.0},
      {"advmod", 0.0}, {"obl", 0.5},  {"case", -1.0}, {"aux", -0.5}};
  const std::map<std::string, double> inc_base = {
      {"det", 1.0},  {"amod", -0.5}, {"advmod", -0.5},
      {"obj", 0.8},  {"obl", -0.3},  {"aux", -0.5}};
  for (const auto& [rel, base] : dir_base) p.dir[rel] = base + rng.normal();
  for (const auto& [rel, base] : inc_base) p.inc[rel] = base + rng.normal();
  return p;
}

Lexicon proto_lexicon(Rng& rng) {
  const std::map<std::string, int> sizes = {{"NOUN", 10}, {"VERB", 8},
                                            {"ADJ", 6},   {"ADV", 4},
                                            {"DET", 2},   {"AUX", 2},
                                            {"ADP", 3}};
  Lexicon lex;
  for (const auto& [upos, n] : sizes) {
    auto& forms = lex.words[upos];
    while (static_cast<int>(forms.size()) < n) {
      std::string w = make_word(rng);
      if (std::find(forms.begin(), forms.end(), w) == forms.end())
        forms.push_back(w);
    }
  }
  return lex;
}

void drift_params(Params& p, double scale, Rng& rng) {
  for (auto& [rel, logit] : p.dir) logit += scale * rng.normal();
  for (auto& [rel, logit] : p.inc) logit += scale * rng.normal();
}

void mutate_lexicon(Lexicon& lex, double rate, Rng& rng) {
  for (auto& [upos, forms] : lex.words)
    for (auto& form : forms) {
      if (!rng.bernoulli(std::min(0.9, rate))) continue;
      const size_t n_syll = form.size() / 2;
      const size_t at = 2 * rng.uniform_int(n_syll);
      const std::string repl = syllable(rng);
      form[at] = repl[0];
      form[at + 1] = repl[1];
    }
}

// Dependency token tree with dependents already committed to a side.
struct WordNode {
  std::string form, upos, deprel;
  std::vector<WordNode> left, right;
};

struct SentenceBuilder {
  const Params& params;
  const Lexicon& lex;
  Rng& rng;

  std::string pick(const std::string& upos) {
    const auto& forms = lex.words.at(upos);
    return forms[rng.uniform_int(forms.size())];
  }
  bool rightward(const std::string& rel) {
    return rng.bernoulli(sigmoid(params.dir.at(rel)));
  }
  bool include(const std::string& rel) {
    return rng.bernoulli(sigmoid(params.inc.at(rel)));
  }
  void attach(WordNode& head, WordNode dep) {
    (rightward(dep.deprel) ? head.right : head.left).push_back(std::move(dep));
  }

  WordNode noun_phrase(const std::string& deprel, bool with_case) {
    WordNode np{pick("NOUN"), "NOUN", deprel, {}, {}};
    if (include("det")) attach(np, {pick("DET"), "DET", "det", {}, {}});
    if (include("amod")) attach(np, {pick("ADJ"), "ADJ", "amod", {}, {}});
    if (with_case) attach(np, {pick("ADP"), "ADP", "case", {}, {}});
    return np;
  }

  WordNode sentence() {
    WordNode verb{pick("VERB"), "VERB", "root", {}, {}};
    if (include("aux")) attach(verb, {pick("AUX"), "AUX", "aux", {}, {}});
    if (include("advmod")) attach(verb, {pick("ADV"), "ADV", "advmod", {}, {}});
    attach(verb, noun_phrase("nsubj", false));
    if (include("obl")) attach(verb, noun_phrase("obl", true));
    if (include("obj")) attach(verb, noun_phrase("obj", false));
    verb.right.push_back({".", "PUNCT", "punct", {}, {}});  // always final
    return verb;
  }
};

void flatten(const WordNode& node, const WordNode* parent,
             std::vector<std::pair<const WordNode*, const WordNode*>>& out) {
  for (const auto& child : node.left) flatten(child, &node, out);
  out.emplace_back(&node, parent);
  for (const auto& child : node.right) flatten(child, &node, out);
}

Sentence to_sentence(const WordNode& root) {
  std::vector<std::pair<const WordNode*, const WordNode*>> order;
  flatten(root, nullptr, order);
  std::map<const WordNode*, int> slot;
  for (size_t i = 0; i < order.size(); ++i)
    slot[order[i].first] = static_cast<int>(i) + 1;
  Sentence s;
  for (size_t i = 0; i < order.size(); ++i) {
    const auto& [node, parent] = order[i];
    Token t;
    t.index = static_cast<int>(i) + 1;
    t.form = node->form;
    t.upos = node->upos;
    t.deprel = node->deprel;
    t.head = parent ? slot.at(parent) : 0;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

std::string phrase_label(const std::string& upos, bool root) {
  if (root) return "S";
  if (upos == "NOUN") return "NP";
  if (upos == "VERB") return "VP";
  if (upos == "ADJ") return "AP";
  if (upos == "ADV") return "ADVP";
  return "XP";
}

BracketTree to_bracket(const WordNode& node, bool root) {
  BracketTree pre;
  pre.label = node.upos;
  BracketTree term;
  term.label = node.form;
  term.terminal = true;
  pre.children.push_back(std::move(term));
  if (node.left.empty() && node.right.empty() && !root) return pre;

  BracketTree phrase;
  phrase.label = phrase_label(node.upos, root);
  for (const auto& child : node.left)
    phrase.children.push_back(to_bracket(child, false));
  phrase.children.push_back(std::move(pre));
  for (const auto& child : node.right)
    phrase.children.push_back(to_bracket(child, false));
  return phrase;
}

std::string lang_name(int i) {
  std::string name = "aa";
  name[0] = static_cast<char>('a' + i / 26);
  name[1] = static_cast<char>('a' + i % 26);
  return name;
}

void emit_bracket(const BracketTree& t, std::string& out) {
  if (t.terminal) {
    out += t.label;
    return;
  }
  out += '(';
  out += t.label;
  for (const auto& child : t.children) {
    out += ' ';
    emit_bracket(child, out);
  }
  out += ')';
}

}  // namespace

void SynthConfig::validate() const {
  if (n_languages < 2)
    throw ConfigError("synth: need at least 2 languages");
  if (n_languages > 676)
    throw ConfigError("synth: at most 676 two-letter language names");
  if (sentences < 1) throw ConfigError("synth: sentences must be positive");
  if (drift < 0 || mutation < 0)
    throw ConfigError("synth: drift and mutation must be non-negative");
}

SynthCorpus generate(const SynthConfig& config) {
  config.validate();
  Rng master(config.seed);
  Rng topo_rng = master.fork(1);
  Rng proto_rng = master.fork(2);

  // Random binary tree over the languages; edge lengths vary so genetic
  // distances are not all equal.
  std::vector<TreeNode> nodes;
  std::vector<int> pool;
  for (int i = 0; i < config.n_languages; ++i) {
    TreeNode leaf;
    leaf.id = static_cast<int>(nodes.size());
    leaf.name = lang_name(i);
    nodes.push_back(leaf);
    pool.push_back(leaf.id);
  }
  while (pool.size() > 1) {
    const size_t i = topo_rng.uniform_int(pool.size());
    size_t j = topo_rng.uniform_int(pool.size() - 1);
    if (j >= i) ++j;
    TreeNode parent;
    parent.id = static_cast<int>(nodes.size());
    parent.children = {pool[std::min(i, j)], pool[std::max(i, j)]};
    for (int child : parent.children)
      nodes[static_cast<size_t>(child)].edge_len = topo_rng.uniform(0.5, 1.5);
    nodes.push_back(parent);
    pool[std::min(i, j)] = parent.id;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
  }
  const int root_id = pool.front();

  // Walk parameters, lexicon and coordinates down the tree.
  const int n_nodes = static_cast<int>(nodes.size());
  std::vector<Params> params(static_cast<size_t>(n_nodes));
  std::vector<Lexicon> lexica(static_cast<size_t>(n_nodes));
  std::vector<std::pair<double, double>> coords(static_cast<size_t>(n_nodes));

  params[static_cast<size_t>(root_id)] = proto_params(proto_rng);
  lexica[static_cast<size_t>(root_id)] = proto_lexicon(proto_rng);
  coords[static_cast<size_t>(root_id)] = {48.0, 10.0};

  std::vector<int> stack = {root_id};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    for (int child : nodes[static_cast<size_t>(id)].children) {
      const double len = nodes[static_cast<size_t>(child)].edge_len;
      Rng edge_rng = master.fork(100 + static_cast<std::uint64_t>(child));
      params[static_cast<size_t>(child)] = params[static_cast<size_t>(id)];
      drift_params(params[static_cast<size_t>(child)],
                   config.drift * std::sqrt(len), edge_rng);
      lexica[static_cast<size_t>(child)] = lexica[static_cast<size_t>(id)];
      mutate_lexicon(lexica[static_cast<size_t>(child)], config.mutation * len,
                     edge_rng);
      coords[static_cast<size_t>(child)] = {
          std::clamp(coords[static_cast<size_t>(id)].first +
                         3.0 * len * edge_rng.normal(), -85.0, 85.0),
          std::clamp(coords[static_cast<size_t>(id)].second +
                         5.0 * len * edge_rng.normal(), -179.0, 179.0)};
      stack.push_back(child);
    }
  }

  // Gold dendrogram mirroring the divergence tree.
  const std::function<DendroNode(int)> build_dendro = [&](int id) {
    DendroNode node;
    node.name = nodes[static_cast<size_t>(id)].name;
    node.length = nodes[static_cast<size_t>(id)].edge_len;
    for (int child : nodes[static_cast<size_t>(id)].children)
      node.children.push_back(build_dendro(child));
    return node;
  };

  SynthCorpus corpus;
  corpus.seed = config.seed;
  corpus.gold.root = build_dendro(root_id);

  // Leaves in name order.
  std::vector<int> leaves;
  for (int id = 0; id < n_nodes; ++id)
    if (nodes[static_cast<size_t>(id)].children.empty()) leaves.push_back(id);
  std::sort(leaves.begin(), leaves.end(), [&](int a, int b) {
    return nodes[static_cast<size_t>(a)].name < nodes[static_cast<size_t>(b)].name;
  });

  corpus.coords_csv = "lang,lat,lon\n";
  for (size_t li = 0; li < leaves.size(); ++li) {
    const int id = leaves[li];
    const std::string& name = nodes[static_cast<size_t>(id)].name;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f\n", name.c_str(),
                  coords[static_cast<size_t>(id)].first,
                  coords[static_cast<size_t>(id)].second);
    corpus.coords_csv += buf;

    Rng sent_rng = master.fork(1000 + li);
    SentenceBuilder builder{params[static_cast<size_t>(id)],
                            lexica[static_cast<size_t>(id)], sent_rng};
    Treebank tb;
    tb.language = name;
    auto& btrees = corpus.brackets[name];
    for (int s = 0; s < config.sentences; ++s) {
      WordNode root = builder.sentence();
      tb.sentences.push_back(to_sentence(root));
      btrees.push_back(to_bracket(root, true));
    }
    corpus.treebanks.push_back(std::move(tb));
  }
  return corpus;
}

std::string conllu_text(const Treebank& tb) {
  std::string out;
  for (size_t s = 0; s < tb.sentences.size(); ++s) {
    out += "# sent_id = " + tb.language + "-" + std::to_string(s + 1) + "\n";
    for (const auto& t : tb.sentences[s].tokens) {
      out += std::to_string(t.index) + "\t" + t.form + "\t_\t" + t.upos +
             "\t_\t_\t" + std::to_string(t.head) + "\t" + t.deprel +
             "\t_\t_\n";
    }
    out += "\n";
  }
  return out;
}

std::string brackets_text(const std::vector<BracketTree>& trees) {
  std::string out;
  for (const auto& t : trees) {
    emit_bracket(t, out);
    out += '\n';
  }
  return out;
}

void write_fixture(const SynthCorpus& corpus, const std::string& dir,
                   const std::string& train_json) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "conllu");
  fs::create_directories(fs::path(dir) / "brackets");

  nlohmann::json manifest;
  manifest["seed"] = corpus.seed;
  if (!train_json.empty()) {
    mf::parse_train_patch(train_json);  // reject bad keys/types up front
    manifest["train"] = nlohmann::json::parse(train_json);
  }
  manifest["gold_tree"] = "gold.nwk";
  manifest["coordinates"] = "coords.csv";
  std::vector<std::string> languages;
  for (const auto& tb : corpus.treebanks) {
    languages.push_back(tb.language);
    write_file((fs::path(dir) / "conllu" / (tb.language + ".conllu")).string(),
               conllu_text(tb));
    manifest["conllu"][tb.language] = "conllu/" + tb.language + ".conllu";
  }
  for (const auto& [lang, trees] : corpus.brackets) {
    write_file((fs::path(dir) / "brackets" / (lang + ".brackets")).string(),
               brackets_text(trees));
    manifest["brackets"][lang] = "brackets/" + lang + ".brackets";
  }
  manifest["languages"] = languages;

  write_file((fs::path(dir) / "gold.nwk").string(),
             emit_newick(corpus.gold) + "\n");
  write_file((fs::path(dir) / "coords.csv").string(), corpus.coords_csv);
  write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace langlab::synth
