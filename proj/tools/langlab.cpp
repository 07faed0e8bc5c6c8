#include <CLI11.hpp>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "langlab/abstraction.hpp"
#include "langlab/error.hpp"
#include "langlab/pipeline.hpp"

namespace {

using langlab::pipe::RunConfig;

struct CliState {
  RunConfig run;
  std::vector<std::string> level_names;
  // Train override holders; only count()>0 options land in run.overrides.
  int lang_dim = 0, sym_dim = 0, hidden_dim = 0, batch_size = 0, seq_len = 0,
      epochs = 0, min_count = 0;
  double learning_rate = 0.0, clip_norm = 0.0;
  bool lang_all_layers = false;
  // tree-dist / census arguments.
  std::string gold_path, tree_path, census_dir;
  bool raw_score = false;
  // Deferred per-option effects; no-ops for options that were not given.
  std::vector<std::function<void()>> post;
};

// Options shared by every manifest-driven stage.
void add_run_options(CLI::App* cmd, CliState& st) {
  cmd->add_option("manifest", st.run.manifest_path, "corpus manifest (JSON)")
      ->required();
  cmd->add_option("--out", st.run.out_dir, "artifact directory")
      ->capture_default_str();
  cmd->add_option("--config", st.run.config_path,
                  "JSON train-config file (same keys as the manifest's "
                  "'train' block)");
  cmd->add_option("--levels", st.level_names,
                  "abstraction levels (raw,func,pos,phrase,deprel)")
      ->delimiter(',');
  auto* seed =
      cmd->add_option("--seed", st.run.seed, "run seed (default: manifest seed)");
  st.post.push_back([&st, seed] {
    if (seed->count()) st.run.has_seed = true;
    if (!st.level_names.empty()) {
      st.run.levels.clear();
      for (const auto& name : st.level_names)
        st.run.levels.push_back(langlab::abstr::level_from_string(name));
    }
  });
}

void add_train_options(CLI::App* cmd, CliState& st) {
  cmd->add_flag("--desk", st.run.desk,
                "start from the small desk preset (fast, low capacity)");
  auto opt = [cmd, &st](const char* name, auto& holder, auto field,
                        const char* help) {
    auto* o = cmd->add_option(name, holder, help);
    st.post.push_back([&st, o, &holder, field] {
      if (o->count()) st.run.overrides.*field = holder;
    });
  };
  using P = langlab::mf::TrainPatch;
  opt("--lang-dim", st.lang_dim, &P::lang_dim, "language embedding size");
  opt("--sym-dim", st.sym_dim, &P::sym_dim, "symbol embedding size");
  opt("--hidden-dim", st.hidden_dim, &P::hidden_dim, "LSTM hidden size");
  opt("--batch-size", st.batch_size, &P::batch_size, "sequences per batch");
  opt("--seq-len", st.seq_len, &P::seq_len, "truncated-BPTT chunk length");
  opt("--epochs", st.epochs, &P::epochs, "training epochs");
  opt("--min-count", st.min_count, &P::min_count,
      "symbol frequency cutoff (0 = per-level default)");
  opt("--lr", st.learning_rate, &P::learning_rate, "SGD learning rate");
  opt("--clip", st.clip_norm, &P::clip_norm, "global gradient-norm clip");
  auto* all = cmd->add_flag("--lang-all-layers", st.lang_all_layers,
                            "feed the language vector to both LSTM layers");
  st.post.push_back([&st, all] {
    if (all->count()) st.run.overrides.lang_all_layers = st.lang_all_layers;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "langlab: corpus abstraction, language-vector training and distance "
      "analysis"};
  app.set_version_flag("--version", "langlab 0.1.0");
  app.require_subcommand(1);

  CliState st;
  std::function<void()> action;

  auto stage = [&](const char* name, const char* help, auto fn,
                   bool train_opts) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_run_options(cmd, st);
    if (train_opts) add_train_options(cmd, st);
    cmd->callback([&st, &action, fn] { action = [&st, fn] { fn(st.run); }; });
    return cmd;
  };

  stage("abstract", "rewrite the corpus into per-level symbol files",
        langlab::pipe::cmd_abstract, true);
  stage("train", "train the multilingual LSTM per level",
        langlab::pipe::cmd_train, true);
  stage("distances", "genetic, geographic and structural distance matrices",
        langlab::pipe::cmd_distances, false);
  stage("cluster", "embedding distances and Ward dendrograms per level",
        langlab::pipe::cmd_cluster, false);
  stage("baseline",
        "score trees against the gold tree with a random-tree baseline",
        langlab::pipe::cmd_baseline, false)
      ->add_option("--trials", st.run.baseline_trials,
                   "random trees to sample")
      ->capture_default_str();
  stage("correlate",
        "rank correlations and Mantel tests between distance matrices",
        langlab::pipe::cmd_correlate, false)
      ->add_option("--permutations", st.run.mantel_permutations,
                   "Mantel permutations")
      ->capture_default_str();
  {
    CLI::App* cmd = stage("causal", "IC* causal structure over distance variables",
                          langlab::pipe::cmd_causal, false);
    cmd->add_option("--alpha", st.run.alpha,
                    "independence-test significance level")
        ->capture_default_str();
    cmd->add_option("--vars", st.run.causal_vars,
                    "variables to include (default: available ones)")
        ->delimiter(',');
  }
  {
    CLI::App* cmd = stage("pipeline", "run every stage in order",
                          langlab::pipe::cmd_pipeline, true);
    cmd->add_option("--trials", st.run.baseline_trials,
                    "random trees to sample")
        ->capture_default_str();
    cmd->add_option("--permutations", st.run.mantel_permutations,
                    "Mantel permutations")
        ->capture_default_str();
    cmd->add_option("--alpha", st.run.alpha,
                    "independence-test significance level")
        ->capture_default_str();
    cmd->add_option("--vars", st.run.causal_vars,
                    "causal variables (default: available ones)")
        ->delimiter(',');
  }
  {
    CLI::App* cmd = app.add_subcommand(
        "tree-dist", "score a generated tree against a gold tree");
    cmd->add_option("gold", st.gold_path, "gold Newick file")->required();
    cmd->add_option("tree", st.tree_path, "generated Newick file")->required();
    cmd->add_flag("--raw", st.raw_score,
                  "raw sum instead of the normalized score");
    cmd->callback([&st, &action] {
      action = [&st] {
        langlab::pipe::cmd_tree_dist(st.gold_path, st.tree_path,
                                     !st.raw_score);
      };
    });
  }
  {
    CLI::App* cmd = app.add_subcommand(
        "census", "count distinct dependency-link keys under a directory");
    cmd->add_option("dir", st.census_dir, "directory to scan for *.conllu")
        ->required();
    cmd->callback([&st, &action] {
      action = [&st] {
        const auto r = langlab::pipe::ud_census(st.census_dir);
        std::cout << "census: " << r.files << " files, " << r.sentences
                  << " sentences (" << r.skipped << " skipped), "
                  << r.link_keys << " distinct link keys\n";
      };
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& f : st.post) f();
    action();
  } catch (const langlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
