#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "langlab/corpus.hpp"
#include "langlab/tree.hpp"

namespace langlab::synth {

// Generator for a family of artificial languages that diverge along a random
// binary tree: each language carries head-direction and inclusion
// probabilities for a small dependency grammar plus a lexicon, all random-
// walked along the tree's edges. Geography drifts along the same tree, so
// the resulting corpus has the correlation structure the toolkit is meant
// to detect, with the tree itself as ground truth.
struct SynthConfig {
  int n_languages = 12;
  int sentences = 60;
  std::uint64_t seed = 0;
  double drift = 1.1;     // logit random-walk scale per unit edge length
  double mutation = 0.35; // per-word lexicon mutation rate per unit edge

  void validate() const;
};

struct SynthCorpus {
  std::vector<Treebank> treebanks;  // one per language
  std::map<std::string, std::vector<BracketTree>> brackets;
  DendroTree gold;
  std::string coords_csv;
  std::uint64_t seed = 0;
};

SynthCorpus generate(const SynthConfig& config);

std::string conllu_text(const Treebank& tb);
std::string brackets_text(const std::vector<BracketTree>& trees);

// Writes conllu/, brackets/, gold.nwk, coords.csv and manifest.json under
// dir, creating directories as needed. train_json, if non-empty, must be a
// JSON object of train keys; it is embedded as the manifest's "train" block
// so the fixture pins its own hyperparameters.
void write_fixture(const SynthCorpus& corpus, const std::string& dir,
                   const std::string& train_json = "");

}  // namespace langlab::synth
