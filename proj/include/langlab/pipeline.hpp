#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "langlab/abstraction.hpp"
#include "langlab/manifest.hpp"

namespace langlab::pipe {

// Effective configuration of one run. Stages communicate through plain
// files in out_dir, so any stage can be rerun in isolation as long as its
// upstream artifacts exist.
struct RunConfig {
  std::string manifest_path;
  std::string out_dir = "run";
  std::vector<abstr::Level> levels = abstr::all_levels();
  bool has_seed = false;  // true when --seed was given; else manifest seed
  std::uint64_t seed = 0;
  bool desk = false;  // start from the small desk preset instead of defaults
  std::string config_path;   // optional JSON train-config file
  mf::TrainPatch overrides;  // applied after manifest and config file
  int baseline_trials = 1000;
  int mantel_permutations = 999;
  double alpha = 0.001;
  // Causal variable selection; empty = the available ones among
  // genetic, geographic, structural, raw, pos, phrase, deprel.
  std::vector<std::string> causal_vars;

  void validate() const;
};

std::uint64_t effective_seed(const RunConfig& run, const mf::Manifest& m);
lm::TrainConfig resolve_train_config(const RunConfig& run,
                                     const mf::Manifest& m);

// Stage commands. Each writes its artifacts plus run.meta into out_dir and
// reports progress on stdout.
void cmd_abstract(const RunConfig& run);
void cmd_train(const RunConfig& run);
void cmd_distances(const RunConfig& run);
void cmd_cluster(const RunConfig& run);
void cmd_baseline(const RunConfig& run);
void cmd_correlate(const RunConfig& run);
void cmd_causal(const RunConfig& run);
void cmd_pipeline(const RunConfig& run);  // all of the above, in order

// Standalone scorer for two Newick files; prints and returns the score.
double cmd_tree_dist(const std::string& gold_path,
                     const std::string& generated_path, bool normalize);

// Streaming census of distinct dependency-link keys over every *.conllu
// file under dir (recursive); sentences that fail validation are skipped.
struct CensusReport {
  std::size_t link_keys = 0;
  int files = 0;
  int sentences = 0;
  int skipped = 0;
};
CensusReport ud_census(const std::string& dir);

// Symbols-file codec: one sequence per line, symbols space-separated with
// %-escapes for space, percent, tab and newline.
std::string encode_symbols_line(const std::vector<std::string>& symbols);
std::vector<std::string> decode_symbols_line(const std::string& line);

}  // namespace langlab::pipe
