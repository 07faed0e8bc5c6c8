#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "langlab/abstraction.hpp"
#include "langlab/distances.hpp"

namespace langlab::lm {

// Symbol inventory with two reserved slots. Symbols beyond the specials are
// ordered lexicographically, so the mapping depends only on the data.
struct Vocab {
  static constexpr int kUnk = 0;
  static constexpr int kEos = 1;

  std::vector<std::string> symbols;  // index -> symbol; [0]="<unk>", [1]="</s>"
  std::unordered_map<std::string, int> index;

  static Vocab build(const std::vector<abstr::SymbolSequence>& seqs,
                     int min_count);
  int lookup(const std::string& s) const;  // unknown -> kUnk
  int size() const { return static_cast<int>(symbols.size()); }
};

// Frequency cutoff below which symbols collapse to <unk>: 2 for raw
// (character noise), 1 elsewhere.
int default_min_count(abstr::Level level);

struct LanguageVector {
  std::string language;
  Eigen::VectorXd vec;
};

struct TrainConfig {
  int lang_dim = 64;
  int sym_dim = 128;
  int hidden_dim = 256;
  double learning_rate = 0.2;
  double clip_norm = 5.0;
  int batch_size = 16;
  int seq_len = 64;  // truncated-backprop window
  int epochs = 10;
  std::uint64_t seed = 0;
  int min_count = 0;  // 0 = per-level default
  bool lang_all_layers = false;  // feed the language vector to layer 2 as well

  void validate() const;
  static TrainConfig desk(std::uint64_t seed);  // small preset for experiments
};

struct LstmLayer {
  // Gate blocks stacked as [input; forget; cell; output], each hidden_dim rows.
  Eigen::MatrixXd w_in;   // 4H x in_dim
  Eigen::MatrixXd w_rec;  // 4H x H
  Eigen::MatrixXd bias;   // 4H x 1
};

struct ModelParams {
  abstr::Level level = abstr::Level::raw;
  Vocab vocab;
  std::vector<std::string> languages;  // row order of lang_emb
  int lang_dim = 0;
  int sym_dim = 0;
  int hidden_dim = 0;
  bool lang_all_layers = false;

  Eigen::MatrixXd sym_emb;   // V x sym_dim
  Eigen::MatrixXd lang_emb;  // |languages| x lang_dim
  LstmLayer l1, l2;
  Eigen::MatrixXd w_out;  // V x H
  Eigen::MatrixXd b_out;  // V x 1

  int lang_index(const std::string& language) const;  // -1 if absent
  // Stable name->tensor enumeration used by the optimizer, the gradient
  // checker and the checkpoint codec.
  std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors();
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> tensors() const;
};

struct TrainResult {
  ModelParams params;
  std::vector<LanguageVector> vectors;  // same order as params.languages
  std::vector<double> loss_curve;  // [0] = loss at init, then one per epoch
};

// Trains the next-symbol model. Each step's input is the concatenation of the
// current symbol's embedding and the sequence's language vector; the language
// vectors are ordinary parameters and receive gradient updates. Deterministic
// given (data, config); the outcome is also invariant to the order sequences
// are supplied in and equivariant under renaming languages.
TrainResult train(const std::vector<abstr::SymbolSequence>& sequences,
                  const TrainConfig& config);

// Distribution over the vocabulary for the symbol following `prefix`.
Eigen::VectorXd next_distribution(const ModelParams& params,
                                  const std::string& language,
                                  const std::vector<std::string>& prefix);

// Max relative error between analytic and central-difference gradients over
// 100 sampled coordinates (full backprop, no truncation).
double grad_check(const ModelParams& params,
                  const std::vector<abstr::SymbolSequence>& batch,
                  double epsilon);

// Global L2 norm of the mean per-symbol loss gradient on a batch (full
// backprop). Near zero on a perfectly predicted batch.
double batch_gradient_norm(const ModelParams& params,
                           const std::vector<abstr::SymbolSequence>& batch);

std::vector<LanguageVector> language_vectors(const ModelParams& params);

// Pairwise 1 - cosine over language vectors.
dist::DistanceMatrix embedding_distance(
    const std::vector<LanguageVector>& vectors);

// CSV `lang,v1..vk`, exact hexfloat-free round-trip via shortest decimal.
std::string vectors_csv(const std::vector<LanguageVector>& vectors);
std::vector<LanguageVector> vectors_from_csv(std::string_view text);

// Versioned text checkpoint: JSON shape header + hexfloat tensor dump.
std::string encode_model(const ModelParams& params);
ModelParams decode_model(std::string_view text);
void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace langlab::lm
