#include "langlab/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>

#include "langlab/causal.hpp"
#include "langlab/clustering.hpp"
#include "langlab/corpus.hpp"
#include "langlab/distances.hpp"
#include "langlab/error.hpp"
#include "langlab/langmodel.hpp"
#include "langlab/stats.hpp"
#include "langlab/util.hpp"

namespace langlab::pipe {

namespace {

namespace fs = std::filesystem;
using abstr::Level;

constexpr const char* kVersion = "0.1.0";

std::string out_path(const RunConfig& run, const std::string& name) {
  return (fs::path(run.out_dir) / name).string();
}

std::string f_vectors(Level level) {
  return std::string("vectors.") + abstr::to_string(level) + ".csv";
}
std::string f_model(Level level) {
  return std::string("model.") + abstr::to_string(level) + ".lm";
}
std::string f_loss(Level level) {
  return std::string("loss.") + abstr::to_string(level) + ".csv";
}
std::string f_tree(Level level) {
  return std::string("tree.") + abstr::to_string(level) + ".nwk";
}
std::string f_embdist(Level level) {
  return std::string("dist.embedding.") + abstr::to_string(level) + ".csv";
}
std::string symbols_file(const std::string& lang, Level level) {
  return "symbols/" + lang + "." + abstr::to_string(level) + ".txt";
}

std::string read_artifact(const std::string& path, const std::string& hint) {
  try {
    return read_file(path);
  } catch (const IoError& e) {
    throw IoError(std::string(e.what()) + " (" + hint + ")");
  }
}

std::uint64_t level_seed(std::uint64_t seed, Level level) {
  return splitmix64(seed ^ fnv1a(abstr::to_string(level)));
}

const std::set<std::string>& func_set(const mf::Manifest& m) {
  return m.func_upos.empty() ? abstr::default_func_upos() : m.func_upos;
}

std::vector<std::string> level_languages(const mf::Manifest& m, Level level) {
  return level == Level::phrase ? m.brackets_languages()
                                : m.conllu_languages();
}

Treebank load_treebank(const mf::Manifest& m, const std::string& lang) {
  return parse_conllu(read_file(m.conllu.at(lang)), lang);
}

std::map<std::string, std::string> lexicon_of(const Treebank& tb) {
  std::map<std::string, std::map<std::string, int>> counts;
  for (const auto& sent : tb.sentences)
    for (const auto& tok : sent.tokens) ++counts[tok.form][tok.upos];
  std::map<std::string, std::string> lex;
  for (const auto& [form, by_upos] : counts) {
    int best = 0;
    std::string pick;
    for (const auto& [upos, n] : by_upos)
      if (n > best || (n == best && (pick.empty() || upos < pick))) {
        best = n;
        pick = upos;
      }
    lex[form] = pick;
  }
  return lex;
}

std::vector<abstr::SymbolSequence> sequences_for_level(const mf::Manifest& m,
                                                       Level level) {
  std::vector<abstr::SymbolSequence> out;
  const auto& func = func_set(m);
  if (level == Level::phrase) {
    const auto langs = m.brackets_languages();
    if (langs.empty())
      throw IoError(
          "phrase level needs bracketed trees; the manifest declares no "
          "'brackets' paths");
    for (const auto& lang : langs) {
      std::map<std::string, std::string> lex;
      if (m.conllu.count(lang)) lex = lexicon_of(load_treebank(m, lang));
      const auto trees = parse_bracketed(read_file(m.brackets.at(lang)));
      if (trees.empty())
        throw ValidationError("brackets file for " + lang + " has no trees");
      for (const auto& tree : trees)
        out.push_back(abstr::to_phrase(tree, lang, func, lex));
    }
    return out;
  }

  const auto langs = m.conllu_languages();
  if (langs.empty())
    throw IoError(std::string(abstr::to_string(level)) +
                  " level needs dependency data; the manifest declares no "
                  "'conllu' paths");
  for (const auto& lang : langs) {
    const Treebank tb = load_treebank(m, lang);
    for (const auto& sent : tb.sentences) {
      switch (level) {
        case Level::raw: out.push_back(abstr::to_raw(sent, lang)); break;
        case Level::func: out.push_back(abstr::to_func_pos(sent, lang, func)); break;
        case Level::pos: out.push_back(abstr::to_pos(sent, lang)); break;
        case Level::deprel: out.push_back(abstr::to_deprel(sent, lang)); break;
        case Level::phrase: break;  // handled above
      }
    }
  }
  return out;
}

std::vector<abstr::SymbolSequence> load_symbols(const RunConfig& run,
                                                const mf::Manifest& m,
                                                Level level) {
  std::vector<abstr::SymbolSequence> out;
  for (const auto& lang : level_languages(m, level)) {
    const std::string path = out_path(run, symbols_file(lang, level));
    const std::string text =
        read_artifact(path, "run `langlab abstract` for this out dir first");
    for (const auto& line : split(text, '\n')) {
      if (trim(line).empty()) continue;
      out.push_back({lang, level, decode_symbols_line(line)});
    }
  }
  if (out.empty())
    throw ValidationError(std::string("no symbol sequences for level ") +
                          abstr::to_string(level));
  return out;
}

void write_run_meta(const RunConfig& run, const mf::Manifest& m) {
  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["manifest"] = run.manifest_path;
  meta["seed"] = effective_seed(run, m);
  std::vector<std::string> levels;
  for (Level level : run.levels) levels.push_back(abstr::to_string(level));
  meta["levels"] = levels;
  const lm::TrainConfig t = resolve_train_config(run, m);
  meta["train"] = {{"lang_dim", t.lang_dim},
                   {"sym_dim", t.sym_dim},
                   {"hidden_dim", t.hidden_dim},
                   {"learning_rate", t.learning_rate},
                   {"clip_norm", t.clip_norm},
                   {"batch_size", t.batch_size},
                   {"seq_len", t.seq_len},
                   {"epochs", t.epochs},
                   {"min_count", t.min_count},
                   {"lang_all_layers", t.lang_all_layers}};
  meta["baseline_trials"] = run.baseline_trials;
  meta["mantel_permutations"] = run.mantel_permutations;
  meta["alpha"] = run.alpha;
  meta["causal_vars"] = run.causal_vars;
  meta["config_hash"] = fnv1a(meta.dump());
  write_file(out_path(run, "run.meta"), meta.dump(2) + "\n");
}

mf::Manifest start(const RunConfig& run) {
  run.validate();
  mf::Manifest m = mf::load_manifest(run.manifest_path);
  fs::create_directories(run.out_dir);
  write_run_meta(run, m);
  return m;
}

// Keeps `order`'s ordering for the languages present in every matrix.
std::vector<std::string> common_languages(
    const std::vector<dist::DistanceMatrix>& matrices,
    const std::vector<std::string>& order) {
  std::vector<std::string> common;
  for (const auto& lang : order) {
    bool everywhere = true;
    for (const auto& m : matrices)
      if (m.index_of(lang) < 0) {
        everywhere = false;
        break;
      }
    if (everywhere) common.push_back(lang);
  }
  return common;
}

dist::DistanceMatrix embedding_matrix_for(const RunConfig& run, Level level) {
  const std::string path = out_path(run, f_vectors(level));
  const auto vectors = lm::vectors_from_csv(
      read_artifact(path, "run `langlab train` for this out dir first"));
  std::vector<std::string> langs;
  std::vector<Eigen::VectorXd> vecs;
  for (const auto& lv : vectors) {
    langs.push_back(lv.language);
    vecs.push_back(lv.vec);
  }
  return dist::cosine_distance_matrix(std::move(langs), vecs,
                                      abstr::to_string(level));
}

// The explanatory matrices a run can offer, keyed by label. Declared-but-
// not-yet-computed artifacts raise; undeclared ones are skipped.
std::vector<dist::DistanceMatrix> explanatory_matrices(const RunConfig& run,
                                                       const mf::Manifest& m,
                                                       std::ostream& log) {
  std::vector<dist::DistanceMatrix> out;
  const std::string hint = "run `langlab distances` for this out dir first";
  if (!m.gold_tree.empty())
    out.push_back(dist::distance_matrix_from_csv(
        read_artifact(out_path(run, "dist.genetic.csv"), hint), "genetic"));
  else
    log << "note: manifest declares no gold_tree; skipping genetic distances\n";
  if (!m.coordinates.empty())
    out.push_back(dist::distance_matrix_from_csv(
        read_artifact(out_path(run, "dist.geographic.csv"), hint),
        "geographic"));
  else
    log << "note: manifest declares no coordinates; skipping geographic "
           "distances\n";
  out.push_back(dist::distance_matrix_from_csv(
      read_artifact(out_path(run, "dist.structural.csv"), hint), "structural"));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (manifest_path.empty()) throw ConfigError("run: manifest path required");
  if (out_dir.empty()) throw ConfigError("run: output directory required");
  if (levels.empty()) throw ConfigError("run: at least one level required");
  std::set<std::string> seen;
  for (Level level : levels)
    if (!seen.insert(abstr::to_string(level)).second)
      throw ConfigError("run: duplicate level " +
                        std::string(abstr::to_string(level)));
  if (baseline_trials <= 0)
    throw ConfigError("run: baseline trials must be positive");
  if (mantel_permutations < 0)
    throw ConfigError("run: mantel permutations must be >= 0");
  if (alpha <= 0.0 || alpha >= 1.0)
    throw ConfigError("run: alpha must be in (0, 1)");
}

std::uint64_t effective_seed(const RunConfig& run, const mf::Manifest& m) {
  return run.has_seed ? run.seed : m.seed;
}

lm::TrainConfig resolve_train_config(const RunConfig& run,
                                     const mf::Manifest& m) {
  lm::TrainConfig cfg =
      run.desk ? lm::TrainConfig::desk(0) : lm::TrainConfig{};
  m.train.apply(cfg);
  if (!run.config_path.empty())
    mf::parse_train_patch(read_file(run.config_path)).apply(cfg);
  run.overrides.apply(cfg);
  cfg.seed = effective_seed(run, m);
  cfg.validate();
  return cfg;
}

std::string encode_symbols_line(const std::vector<std::string>& symbols) {
  std::string out;
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += ' ';
    for (char c : symbols[i]) {
      switch (c) {
        case ' ': out += "%20"; break;
        case '%': out += "%25"; break;
        case '\t': out += "%09"; break;
        case '\n': out += "%0A"; break;
        default: out += c;
      }
    }
  }
  return out;
}

std::vector<std::string> decode_symbols_line(const std::string& line) {
  std::vector<std::string> symbols;
  for (const auto& tok : split(line, ' ')) {
    if (tok.empty()) continue;
    std::string sym;
    for (size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] == '%') {
        if (i + 2 >= tok.size())
          throw ParseError("symbols: truncated escape in '" + tok + "'");
        const std::string code = tok.substr(i + 1, 2);
        if (code == "20") sym += ' ';
        else if (code == "25") sym += '%';
        else if (code == "09") sym += '\t';
        else if (code == "0A") sym += '\n';
        else throw ParseError("symbols: bad escape %" + code);
        i += 2;
      } else {
        sym += tok[i];
      }
    }
    symbols.push_back(sym);
  }
  return symbols;
}

void cmd_abstract(const RunConfig& run) {
  const mf::Manifest m = start(run);
  fs::create_directories(fs::path(run.out_dir) / "symbols");
  const lm::TrainConfig cfg = resolve_train_config(run, m);
  for (Level level : run.levels) {
    auto seqs = sequences_for_level(m, level);
    std::map<std::string, std::string> files;  // lang -> content
    std::set<std::string> langs;
    for (const auto& s : seqs) {
      files[s.language] += encode_symbols_line(s.symbols) + "\n";
      langs.insert(s.language);
    }
    for (const auto& [lang, content] : files)
      write_file(out_path(run, symbols_file(lang, level)), content);
    const int min_count =
        cfg.min_count > 0 ? cfg.min_count : lm::default_min_count(level);
    const lm::Vocab vocab = lm::Vocab::build(seqs, min_count);
    std::cout << "abstract: " << abstr::to_string(level) << ": "
              << langs.size() << " languages, " << seqs.size()
              << " sequences, vocab " << vocab.size() << " (min_count "
              << min_count << ")\n";
  }
}

void cmd_train(const RunConfig& run) {
  const mf::Manifest m = start(run);
  const std::uint64_t seed = effective_seed(run, m);
  for (Level level : run.levels) {
    auto seqs = load_symbols(run, m, level);
    lm::TrainConfig cfg = resolve_train_config(run, m);
    cfg.seed = level_seed(seed, level);
    const lm::TrainResult result = lm::train(seqs, cfg);

    lm::save_model(result.params, out_path(run, f_model(level)));
    write_file(out_path(run, f_vectors(level)), lm::vectors_csv(result.vectors));
    std::string loss = "epoch,loss\n";
    for (size_t e = 0; e < result.loss_curve.size(); ++e)
      loss += std::to_string(e) + "," + format_double(result.loss_curve[e]) + "\n";
    write_file(out_path(run, f_loss(level)), loss);

    std::cout << "train: " << abstr::to_string(level) << ": vocab "
              << result.params.vocab.size() << ", "
              << result.params.languages.size() << " languages, loss "
              << format_sig(result.loss_curve.front(), 4) << " -> "
              << format_sig(result.loss_curve.back(), 4) << " over "
              << cfg.epochs << " epochs\n";
  }
}

void cmd_distances(const RunConfig& run) {
  const mf::Manifest m = start(run);

  if (!m.gold_tree.empty()) {
    const DendroTree gold = parse_newick(read_file(m.gold_tree));
    const LeafPairDistances lpd = leaf_pair_distances(gold);
    std::vector<std::string> covered, excluded;
    for (const auto& lang : m.languages)
      (lpd.index_of(lang) >= 0 ? covered : excluded).push_back(lang);
    if (covered.size() < 2)
      throw ValidationError(
          "genetic: fewer than 2 manifest languages appear in the gold tree");
    const auto genetic = dist::genetic_distance(gold, covered);
    write_file(out_path(run, "dist.genetic.csv"), dist::to_csv(genetic));
    std::cout << "distances: genetic over " << covered.size() << " languages";
    if (!excluded.empty()) {
      std::cout << " (excluded, not in gold tree:";
      for (const auto& lang : excluded) std::cout << " " << lang;
      std::cout << ")";
    }
    std::cout << "\n";
  } else {
    std::cout << "distances: no gold_tree in manifest; skipping genetic\n";
  }

  if (!m.coordinates.empty()) {
    const auto table = dist::load_coordinates(read_file(m.coordinates));
    std::vector<std::string> covered, excluded;
    for (const auto& lang : m.languages)
      (table.coords.count(lang) ? covered : excluded).push_back(lang);
    if (covered.size() < 2)
      throw ValidationError(
          "geographic: fewer than 2 manifest languages have coordinates");
    const auto geo = dist::geo_distance(table, covered);
    write_file(out_path(run, "dist.geographic.csv"), dist::to_csv(geo));
    std::cout << "distances: geographic over " << covered.size()
              << " languages";
    if (!excluded.empty()) {
      std::cout << " (excluded, no coordinates:";
      for (const auto& lang : excluded) std::cout << " " << lang;
      std::cout << ")";
    }
    std::cout << "\n";
  } else {
    std::cout << "distances: no coordinates in manifest; skipping geographic\n";
  }

  const auto langs = m.conllu_languages();
  if (langs.size() < 2)
    throw ValidationError(
        "structural: need at least 2 languages with dependency data");
  std::vector<dist::StructVector> vectors;
  for (const auto& lang : langs)
    vectors.push_back(dist::structural_vector(load_treebank(m, lang)));
  write_file(out_path(run, "struct_vectors.tsv"),
             dist::struct_vectors_tsv(vectors));
  const auto structural = dist::structural_distance(vectors);
  write_file(out_path(run, "dist.structural.csv"), dist::to_csv(structural));
  std::set<dist::LinkKey> keys;
  for (const auto& sv : vectors)
    for (const auto& [key, _] : sv.features) keys.insert(key);
  std::cout << "distances: structural over " << langs.size() << " languages, "
            << keys.size() << " distinct link keys\n";
}

void cmd_cluster(const RunConfig& run) {
  start(run);
  for (Level level : run.levels) {
    const auto emb = embedding_matrix_for(run, level);
    write_file(out_path(run, f_embdist(level)), dist::to_csv(emb));
    const DendroTree tree = cluster::ward_cluster(emb);
    write_file(out_path(run, f_tree(level)), emit_newick(tree) + "\n");
    std::cout << "cluster: " << abstr::to_string(level) << ": " << emb.size()
              << " languages -> " << f_tree(level) << "\n";
  }
}

void cmd_baseline(const RunConfig& run) {
  const mf::Manifest m = start(run);
  if (m.gold_tree.empty())
    throw ConfigError("baseline: manifest declares no gold_tree to score against");
  const DendroTree gold = parse_newick(read_file(m.gold_tree));
  const LeafPairDistances gold_lpd = leaf_pair_distances(gold);
  const std::uint64_t seed =
      splitmix64(effective_seed(run, m) ^ fnv1a("baseline"));

  std::map<std::string, cluster::BaselineResult> cache;
  std::string baseline_out = "languages,trial,dist\n";
  std::string scores =
      "level,raw_dist,normalized_dist,baseline_mean,baseline_std,percentile\n";

  for (Level level : run.levels) {
    const DendroTree tree = parse_newick(read_artifact(
        out_path(run, f_tree(level)),
        "run `langlab cluster` for this out dir first"));
    const LeafPairDistances tree_lpd = leaf_pair_distances(tree);

    std::vector<std::string> common;
    for (const auto& leaf : tree_lpd.leaves())
      if (gold_lpd.index_of(leaf) >= 0) common.push_back(leaf);
    if (common.size() < 2)
      throw ValidationError(std::string("baseline: tree for ") +
                            abstr::to_string(level) +
                            " shares fewer than 2 leaves with the gold tree");
    const LeafPairDistances g = gold_lpd.restrict(common);
    const LeafPairDistances t = tree_lpd.restrict(common);

    std::string key;
    for (const auto& leaf : common) key += leaf + "+";
    if (!cache.count(key)) {
      cache.emplace(key, cluster::random_tree_baseline(g, run.baseline_trials,
                                                       seed));
      const auto& b = cache.at(key);
      std::string langs_label = key.substr(0, key.size() - 1);
      for (size_t trial = 0; trial < b.samples.size(); ++trial)
        baseline_out += langs_label + "," + std::to_string(trial) + "," +
                        format_double(b.samples[trial]) + "\n";
    }
    const auto& b = cache.at(key);

    const double raw = cluster::tree_distance(g, t, false);
    const double norm = cluster::tree_distance(g, t, true);
    int below = 0;
    for (double s : b.samples)
      if (s < norm) ++below;
    const double pct = 100.0 * below / static_cast<double>(b.samples.size());

    scores += std::string(abstr::to_string(level)) + "," + format_double(raw) +
              "," + format_double(norm) + "," + format_double(b.mean) + "," +
              format_double(b.std_dev) + "," + format_double(pct) + "\n";
    std::cout << "baseline: " << abstr::to_string(level) << ": Dist "
              << format_sig(norm, 4) << " vs random " << format_sig(b.mean, 4)
              << " +/- " << format_sig(b.std_dev, 3) << " (percentile "
              << format_sig(pct, 3) << ")\n";
  }
  write_file(out_path(run, "baseline.csv"), baseline_out);
  write_file(out_path(run, "scores.csv"), scores);
}

void cmd_correlate(const RunConfig& run) {
  const mf::Manifest m = start(run);
  std::vector<dist::DistanceMatrix> matrices =
      explanatory_matrices(run, m, std::cout);
  for (Level level : run.levels)
    matrices.push_back(embedding_matrix_for(run, level));
  if (matrices.size() < 2)
    throw ValidationError("correlate: need at least 2 matrices");

  const auto common = common_languages(matrices, m.languages);
  if (common.size() < 3)
    throw ValidationError(
        "correlate: fewer than 3 languages shared by all matrices");
  for (auto& mat : matrices) {
    if (static_cast<size_t>(mat.size()) != common.size())
      std::cout << "correlate: restricting " << mat.label() << " from "
                << mat.size() << " to " << common.size() << " languages\n";
    mat = mat.restrict(common);
  }

  const stats::CorrTable table = stats::correlation_table(matrices);
  const std::uint64_t seed = effective_seed(run, m);

  std::string csv = "a,b,rho,p,significant,mantel_p\n";
  const auto n = static_cast<Eigen::Index>(table.labels.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = table.labels[static_cast<size_t>(i)];
      const auto& b = table.labels[static_cast<size_t>(j)];
      const double mantel_p = stats::mantel_test(
          matrices[static_cast<size_t>(i)], matrices[static_cast<size_t>(j)],
          run.mantel_permutations,
          splitmix64(seed ^ fnv1a("mantel:" + a + "+" + b)));
      csv += a + "," + b + "," + format_double(table.rho(i, j)) + "," +
             format_double(table.p(i, j)) + "," +
             (table.starred(static_cast<int>(i), static_cast<int>(j)) ? "*"
                                                                      : "") +
             "," + format_double(mantel_p) + "\n";
    }
  write_file(out_path(run, "correlations.csv"), csv);
  std::cout << "correlate: " << common.size() << " languages, "
            << table.labels.size() << " matrices\n"
            << stats::corr_heatmap(table)
            << "(* = p < 0.001, t approximation; correlations.csv adds "
               "Mantel p-values)\n";
}

void cmd_causal(const RunConfig& run) {
  const mf::Manifest m = start(run);

  std::map<std::string, dist::DistanceMatrix> available;
  {
    std::vector<dist::DistanceMatrix> expl =
        explanatory_matrices(run, m, std::cout);
    for (auto& mat : expl) available.emplace(mat.label(), std::move(mat));
    for (Level level : run.levels) {
      auto emb = embedding_matrix_for(run, level);
      available.emplace(emb.label(), std::move(emb));
    }
  }

  std::vector<std::string> vars = run.causal_vars;
  if (vars.empty()) {
    // Default seven-variable selection; func stays out of the causal view.
    for (const char* name : {"genetic", "geographic", "structural", "raw",
                             "pos", "phrase", "deprel"})
      if (available.count(name)) vars.push_back(name);
  } else {
    for (const auto& name : vars)
      if (!available.count(name))
        throw ConfigError("causal: no matrix for variable '" + name +
                          "' (available: explanatory distances and trained "
                          "levels)");
  }
  if (vars.size() < 3)
    throw ValidationError("causal: need at least 3 variables");

  std::vector<dist::DistanceMatrix> matrices;
  for (const auto& name : vars) matrices.push_back(available.at(name));
  const auto common = common_languages(matrices, m.languages);
  if (common.size() < 4)
    throw ValidationError("causal: fewer than 4 shared languages");
  for (auto& mat : matrices) mat = mat.restrict(common);

  const causal::SampleTable table = causal::sample_table_from_matrices(matrices);
  write_file(out_path(run, "samples.csv"), table.to_csv());

  causal::CITestConfig ci;
  ci.alpha = run.alpha;
  const causal::MarkedPDAG graph = causal::ic_star(table, ci);
  write_file(out_path(run, "causal.dot"), causal::export_dot(graph));
  write_file(out_path(run, "sepsets.csv"), causal::sepsets_csv(graph));

  std::cout << "causal: " << vars.size() << " variables over "
            << table.values.rows() << " language pairs, alpha " << run.alpha
            << "\n";
  if (graph.edges.empty()) std::cout << "  (no edges)\n";
  for (const auto& e : graph.edges)
    std::cout << "  " << e.from
              << (e.mark == causal::Mark::undetermined
                      ? " -- "
                      : e.mark == causal::Mark::spurious ? " <-> " : " -> ")
              << e.to << " [" << causal::to_string(e.mark) << "]\n";
}

void cmd_pipeline(const RunConfig& run) {
  cmd_abstract(run);
  cmd_train(run);
  cmd_distances(run);
  cmd_cluster(run);
  const mf::Manifest m = mf::load_manifest(run.manifest_path);
  if (!m.gold_tree.empty())
    cmd_baseline(run);
  else
    std::cout << "pipeline: no gold_tree; skipping baseline scoring\n";
  cmd_correlate(run);
  cmd_causal(run);
  std::cout << "pipeline: done; artifacts in " << run.out_dir << "\n";
}

double cmd_tree_dist(const std::string& gold_path,
                     const std::string& generated_path, bool normalize) {
  const DendroTree gold = parse_newick(read_file(gold_path));
  const DendroTree generated = parse_newick(read_file(generated_path));
  const double d = cluster::tree_distance(gold, generated, normalize);
  std::cout << "tree-dist (" << (normalize ? "normalized" : "raw")
            << "): " << format_double(d) << "\n";
  return d;
}

CensusReport ud_census(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw IoError("census: " + dir + " is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".conllu")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("census: no .conllu files under " + dir);

  CensusReport report;
  dist::StructCensus census;
  for (const auto& path : files) {
    int skipped = 0;
    const Treebank tb = parse_conllu_lenient(
        read_file(path), fs::path(path).stem().string(), &skipped);
    census.add(tb);
    ++report.files;
    report.sentences += static_cast<int>(tb.sentences.size());
    report.skipped += skipped;
  }
  report.link_keys = census.size();
  return report;
}

}  // namespace langlab::pipe
