#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "langlab/langmodel.hpp"

namespace langlab::mf {

// Partial hyperparameter override block from the manifest / CLI config.
struct TrainPatch {
  std::optional<int> lang_dim, sym_dim, hidden_dim, batch_size, seq_len,
      epochs, min_count;
  std::optional<double> learning_rate, clip_norm;
  std::optional<bool> lang_all_layers;

  void apply(lm::TrainConfig& c) const;
};

// JSON corpus manifest. Paths are resolved relative to the manifest's
// directory at load time. Schema:
//   {
//     "languages": ["aa", "ab", ...],
//     "conllu":   {"aa": "conllu/aa.conllu", ...},
//     "brackets": {"aa": "brackets/aa.brackets", ...},   // optional
//     "gold_tree": "gold.nwk",                           // optional
//     "coordinates": "coords.csv",                       // optional
//     "seed": 42,
//     "missing": {"conllu": [...], "brackets": [...]},   // optional
//     "func_upos": ["DET", ...],                         // optional
//     "train": {"epochs": 6, ...}                        // optional
//   }
// Every language must be covered by each declared per-language resource or
// be listed under "missing" for it.
struct Manifest {
  std::string dir;
  std::vector<std::string> languages;
  std::map<std::string, std::string> conllu;
  std::map<std::string, std::string> brackets;
  std::string gold_tree;    // empty when undeclared
  std::string coordinates;  // empty when undeclared
  std::uint64_t seed = 0;
  std::set<std::string> func_upos;  // empty = built-in default set
  TrainPatch train;
  std::set<std::string> missing_conllu, missing_brackets;

  // Languages that actually have the resource, manifest order.
  std::vector<std::string> conllu_languages() const;
  std::vector<std::string> brackets_languages() const;
};

Manifest parse_manifest(std::string_view text, const std::string& base_dir);
Manifest load_manifest(const std::string& path);

// Standalone JSON object of train keys (the manifest's "train" schema),
// for --config files.
TrainPatch parse_train_patch(std::string_view text);

}  // namespace langlab::mf
