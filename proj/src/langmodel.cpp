#include "langlab/langmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "langlab/error.hpp"
#include "langlab/util.hpp"

namespace langlab::lm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd sigmoid(const VectorXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

// One training item: a sequence encoded to vocab ids plus its language row.
struct Item {
  int lang = 0;
  std::vector<int> ids;
};

struct StepCache {
  int input = 0, target = 0;
  VectorXd x1;        // sym embedding ++ language vector
  VectorXd g1, g2;    // post-activation gates, 4H
  VectorXd tc1, tc2;  // tanh of the cell states
  VectorXd probs;
};

struct GradSet {
  MatrixXd sym_emb, lang_emb;
  MatrixXd l1_w_in, l1_w_rec, l1_bias;
  MatrixXd l2_w_in, l2_w_rec, l2_bias;
  MatrixXd w_out, b_out;

  explicit GradSet(const ModelParams& p) {
    auto ts = p.tensors();
    auto gs = tensors_of(*this);
    for (size_t i = 0; i < ts.size(); ++i)
      *gs[i] = MatrixXd::Zero(ts[i].second->rows(), ts[i].second->cols());
  }

  static std::vector<MatrixXd*> tensors_of(GradSet& g) {
    return {&g.sym_emb, &g.lang_emb, &g.l1_w_in, &g.l1_w_rec, &g.l1_bias,
            &g.l2_w_in, &g.l2_w_rec, &g.l2_bias, &g.w_out,   &g.b_out};
  }
  std::vector<MatrixXd*> tensors() { return tensors_of(*this); }
};

// Forward (and optionally backward) over one sequence, split into
// truncation windows of chunk_len steps; the cell/hidden state carries
// across windows but gradients do not. Returns the summed cross entropy.
double run_sequence(const ModelParams& p, const Item& item, int chunk_len,
                    GradSet* grads) {
  const int H = p.hidden_dim;
  const int ds = p.sym_dim;
  const int k = p.lang_dim;
  const int d2 = p.lang_all_layers ? H + k : H;
  const VectorXd lang_vec = p.lang_emb.row(item.lang).transpose();

  const int steps = static_cast<int>(item.ids.size()) + 1;
  VectorXd h1 = VectorXd::Zero(H), c1 = VectorXd::Zero(H);
  VectorXd h2 = VectorXd::Zero(H), c2 = VectorXd::Zero(H);
  double loss = 0.0;

  std::vector<StepCache> cache;
  std::vector<VectorXd> c1s, c2s, h1s, h2s;  // [0] = carry-in state

  for (int t0 = 0; t0 < steps; t0 += chunk_len) {
    const int t1 = std::min(steps, t0 + chunk_len);
    const int len = t1 - t0;
    if (grads) {
      cache.assign(static_cast<size_t>(len), StepCache{});
      c1s.assign(static_cast<size_t>(len) + 1, VectorXd());
      c2s.assign(static_cast<size_t>(len) + 1, VectorXd());
      h1s.assign(static_cast<size_t>(len) + 1, VectorXd());
      h2s.assign(static_cast<size_t>(len) + 1, VectorXd());
      c1s[0] = c1; c2s[0] = c2; h1s[0] = h1; h2s[0] = h2;
    }

    for (int t = t0; t < t1; ++t) {
      const int input = t == 0 ? Vocab::kEos : item.ids[static_cast<size_t>(t - 1)];
      const int target = t < steps - 1 ? item.ids[static_cast<size_t>(t)] : Vocab::kEos;

      VectorXd x1(ds + k);
      x1.head(ds) = p.sym_emb.row(input).transpose();
      x1.tail(k) = lang_vec;

      VectorXd z1 = p.l1.w_in * x1 + p.l1.w_rec * h1 + p.l1.bias.col(0);
      VectorXd g1(4 * H);
      g1.segment(0, H) = sigmoid(z1.segment(0, H));
      g1.segment(H, H) = sigmoid(z1.segment(H, H));
      g1.segment(2 * H, H) = z1.segment(2 * H, H).array().tanh();
      g1.segment(3 * H, H) = sigmoid(z1.segment(3 * H, H));
      VectorXd c1n = g1.segment(H, H).cwiseProduct(c1) +
                     g1.segment(0, H).cwiseProduct(g1.segment(2 * H, H));
      VectorXd tc1 = c1n.array().tanh();
      VectorXd h1n = g1.segment(3 * H, H).cwiseProduct(tc1);

      VectorXd x2(d2);
      x2.head(H) = h1n;
      if (p.lang_all_layers) x2.tail(k) = lang_vec;

      VectorXd z2 = p.l2.w_in * x2 + p.l2.w_rec * h2 + p.l2.bias.col(0);
      VectorXd g2(4 * H);
      g2.segment(0, H) = sigmoid(z2.segment(0, H));
      g2.segment(H, H) = sigmoid(z2.segment(H, H));
      g2.segment(2 * H, H) = z2.segment(2 * H, H).array().tanh();
      g2.segment(3 * H, H) = sigmoid(z2.segment(3 * H, H));
      VectorXd c2n = g2.segment(H, H).cwiseProduct(c2) +
                     g2.segment(0, H).cwiseProduct(g2.segment(2 * H, H));
      VectorXd tc2 = c2n.array().tanh();
      VectorXd h2n = g2.segment(3 * H, H).cwiseProduct(tc2);

      VectorXd logits = p.w_out * h2n + p.b_out.col(0);
      const double zmax = logits.maxCoeff();
      VectorXd ex = (logits.array() - zmax).exp();
      const double zsum = ex.sum();
      loss += std::log(zsum) - (logits(target) - zmax);

      if (grads) {
        StepCache& sc = cache[static_cast<size_t>(t - t0)];
        sc.input = input;
        sc.target = target;
        sc.x1 = std::move(x1);
        sc.g1 = std::move(g1);
        sc.g2 = std::move(g2);
        sc.tc1 = std::move(tc1);
        sc.tc2 = std::move(tc2);
        sc.probs = ex / zsum;
        c1s[static_cast<size_t>(t - t0) + 1] = c1n;
        c2s[static_cast<size_t>(t - t0) + 1] = c2n;
        h1s[static_cast<size_t>(t - t0) + 1] = h1n;
        h2s[static_cast<size_t>(t - t0) + 1] = h2n;
      }
      c1 = std::move(c1n); h1 = std::move(h1n);
      c2 = std::move(c2n); h2 = std::move(h2n);
    }

    if (!grads) continue;

    VectorXd dh1 = VectorXd::Zero(H), dc1 = VectorXd::Zero(H);
    VectorXd dh2 = VectorXd::Zero(H), dc2 = VectorXd::Zero(H);
    for (int t = len - 1; t >= 0; --t) {
      const StepCache& sc = cache[static_cast<size_t>(t)];
      const size_t ti = static_cast<size_t>(t);

      VectorXd dlogit = sc.probs;
      dlogit(sc.target) -= 1.0;
      grads->w_out += dlogit * h2s[ti + 1].transpose();
      grads->b_out.col(0) += dlogit;
      dh2 += p.w_out.transpose() * dlogit;

      // layer 2
      {
        const auto i = sc.g2.segment(0, H), f = sc.g2.segment(H, H),
                   gg = sc.g2.segment(2 * H, H), o = sc.g2.segment(3 * H, H);
        VectorXd do_ = dh2.cwiseProduct(sc.tc2);
        dc2 += dh2.cwiseProduct(o).cwiseProduct(
            (1.0 - sc.tc2.array().square()).matrix());
        VectorXd dz(4 * H);
        dz.segment(0, H) = dc2.cwiseProduct(gg).cwiseProduct(i).cwiseProduct(
            (1.0 - i.array()).matrix());
        dz.segment(H, H) = dc2.cwiseProduct(c2s[ti]).cwiseProduct(f).cwiseProduct(
            (1.0 - f.array()).matrix());
        dz.segment(2 * H, H) =
            dc2.cwiseProduct(i).cwiseProduct((1.0 - gg.array().square()).matrix());
        dz.segment(3 * H, H) =
            do_.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());

        VectorXd x2(d2);
        x2.head(H) = h1s[ti + 1];
        if (p.lang_all_layers) x2.tail(k) = lang_vec;
        grads->l2_w_in += dz * x2.transpose();
        grads->l2_w_rec += dz * h2s[ti].transpose();
        grads->l2_bias.col(0) += dz;

        VectorXd dx2 = p.l2.w_in.transpose() * dz;
        dh1 += dx2.head(H);
        if (p.lang_all_layers)
          grads->lang_emb.row(item.lang) += dx2.tail(k).transpose();
        dc2 = dc2.cwiseProduct(f);
        dh2 = p.l2.w_rec.transpose() * dz;
      }

      // layer 1
      {
        const auto i = sc.g1.segment(0, H), f = sc.g1.segment(H, H),
                   gg = sc.g1.segment(2 * H, H), o = sc.g1.segment(3 * H, H);
        VectorXd do_ = dh1.cwiseProduct(sc.tc1);
        dc1 += dh1.cwiseProduct(o).cwiseProduct(
            (1.0 - sc.tc1.array().square()).matrix());
        VectorXd dz(4 * H);
        dz.segment(0, H) = dc1.cwiseProduct(gg).cwiseProduct(i).cwiseProduct(
            (1.0 - i.array()).matrix());
        dz.segment(H, H) = dc1.cwiseProduct(c1s[ti]).cwiseProduct(f).cwiseProduct(
            (1.0 - f.array()).matrix());
        dz.segment(2 * H, H) =
            dc1.cwiseProduct(i).cwiseProduct((1.0 - gg.array().square()).matrix());
        dz.segment(3 * H, H) =
            do_.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());

        grads->l1_w_in += dz * sc.x1.transpose();
        grads->l1_w_rec += dz * h1s[ti].transpose();
        grads->l1_bias.col(0) += dz;

        VectorXd dx1 = p.l1.w_in.transpose() * dz;
        grads->sym_emb.row(sc.input) += dx1.head(ds).transpose();
        grads->lang_emb.row(item.lang) += dx1.tail(k).transpose();
        dc1 = dc1.cwiseProduct(f);
        dh1 = p.l1.w_rec.transpose() * dz;
      }
    }
  }
  return loss;
}

double global_norm(GradSet& g) {
  double sq = 0.0;
  for (auto* t : g.tensors()) sq += t->squaredNorm();
  return std::sqrt(sq);
}

void fill_uniform(MatrixXd& m, Rng& rng, double bound) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rng.uniform(-bound, bound);
}

void init_layer(LstmLayer& layer, int in_dim, int hidden, Rng& rng) {
  layer.w_in.resize(4 * hidden, in_dim);
  layer.w_rec.resize(4 * hidden, hidden);
  layer.bias = MatrixXd::Zero(4 * hidden, 1);
  fill_uniform(layer.w_in, rng, 1.0 / std::sqrt(static_cast<double>(in_dim)));
  fill_uniform(layer.w_rec, rng, 1.0 / std::sqrt(static_cast<double>(hidden)));
  layer.bias.col(0).segment(hidden, hidden).setOnes();  // open forget gates
}

// Canonical training set: languages ordered by corpus content (labels only
// break ties), each language's sequences sorted. This makes training
// independent of input order and of what the languages are called.
struct Prepared {
  std::vector<std::string> languages;
  std::vector<Item> items;
};

Prepared prepare(const std::vector<abstr::SymbolSequence>& sequences,
                 const Vocab& vocab) {
  std::map<std::string, std::vector<const abstr::SymbolSequence*>> by_lang;
  for (const auto& s : sequences) by_lang[s.language].push_back(&s);

  struct LangBlock {
    std::string corpus_key;
    std::string label;
    std::vector<const abstr::SymbolSequence*> seqs;
  };
  std::vector<LangBlock> blocks;
  for (auto& [label, seqs] : by_lang) {
    std::sort(seqs.begin(), seqs.end(),
              [](const abstr::SymbolSequence* a, const abstr::SymbolSequence* b) {
                return a->symbols < b->symbols;
              });
    std::string key;
    for (const auto* s : seqs) {
      for (const auto& sym : s->symbols) {
        key += sym;
        key += '\x1f';
      }
      key += '\x1e';
    }
    blocks.push_back({std::move(key), label, std::move(seqs)});
  }
  std::sort(blocks.begin(), blocks.end(), [](const LangBlock& a, const LangBlock& b) {
    return std::tie(a.corpus_key, a.label) < std::tie(b.corpus_key, b.label);
  });

  Prepared prep;
  for (size_t li = 0; li < blocks.size(); ++li) {
    prep.languages.push_back(blocks[li].label);
    for (const auto* s : blocks[li].seqs) {
      Item item;
      item.lang = static_cast<int>(li);
      item.ids.reserve(s->symbols.size());
      for (const auto& sym : s->symbols) item.ids.push_back(vocab.lookup(sym));
      prep.items.push_back(std::move(item));
    }
  }
  return prep;
}

std::string fmt_hex(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

}  // namespace

Vocab Vocab::build(const std::vector<abstr::SymbolSequence>& seqs,
                   int min_count) {
  if (min_count < 1) throw ConfigError("vocab: min_count must be >= 1");
  std::map<std::string, long> counts;
  for (const auto& s : seqs)
    for (const auto& sym : s.symbols) ++counts[sym];
  Vocab v;
  v.symbols = {"<unk>", "</s>"};
  for (const auto& [sym, n] : counts)
    if (n >= min_count && sym != "<unk>" && sym != "</s>")
      v.symbols.push_back(sym);
  for (size_t i = 0; i < v.symbols.size(); ++i)
    v.index[v.symbols[i]] = static_cast<int>(i);
  return v;
}

int Vocab::lookup(const std::string& s) const {
  auto it = index.find(s);
  return it == index.end() ? kUnk : it->second;
}

int default_min_count(abstr::Level level) {
  return level == abstr::Level::raw ? 2 : 1;
}

void TrainConfig::validate() const {
  if (lang_dim <= 0 || sym_dim <= 0 || hidden_dim <= 0)
    throw ConfigError("train config: dimensions must be positive");
  if (learning_rate <= 0 || clip_norm <= 0)
    throw ConfigError("train config: learning rate and clip norm must be positive");
  if (batch_size <= 0 || seq_len <= 0 || epochs <= 0)
    throw ConfigError("train config: batch size, seq len and epochs must be positive");
  if (min_count < 0) throw ConfigError("train config: min_count must be >= 0");
}

TrainConfig TrainConfig::desk(std::uint64_t seed) {
  TrainConfig c;
  c.lang_dim = 8;
  c.sym_dim = 16;
  c.hidden_dim = 32;
  c.seed = seed;
  return c;
}

int ModelParams::lang_index(const std::string& language) const {
  auto it = std::find(languages.begin(), languages.end(), language);
  return it == languages.end() ? -1 : static_cast<int>(it - languages.begin());
}

std::vector<std::pair<std::string, Eigen::MatrixXd*>> ModelParams::tensors() {
  return {{"sym_emb", &sym_emb},   {"lang_emb", &lang_emb},
          {"l1_w_in", &l1.w_in},   {"l1_w_rec", &l1.w_rec},
          {"l1_bias", &l1.bias},   {"l2_w_in", &l2.w_in},
          {"l2_w_rec", &l2.w_rec}, {"l2_bias", &l2.bias},
          {"w_out", &w_out},       {"b_out", &b_out}};
}

std::vector<std::pair<std::string, const Eigen::MatrixXd*>> ModelParams::tensors()
    const {
  auto mut = const_cast<ModelParams*>(this)->tensors();
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> out;
  out.reserve(mut.size());
  for (auto& [name, t] : mut) out.emplace_back(name, t);
  return out;
}

TrainResult train(const std::vector<abstr::SymbolSequence>& sequences,
                  const TrainConfig& config) {
  config.validate();
  if (sequences.empty()) throw ValidationError("train: no sequences");
  const abstr::Level level = sequences.front().level;
  for (const auto& s : sequences)
    if (s.level != level)
      throw ValidationError(std::string("train: mixed abstraction levels (") +
                            abstr::to_string(level) + " vs " +
                            abstr::to_string(s.level) + ")");

  const int min_count =
      config.min_count > 0 ? config.min_count : default_min_count(level);
  Vocab vocab = Vocab::build(sequences, min_count);
  Prepared prep = prepare(sequences, vocab);
  if (prep.languages.size() < 2)
    throw ValidationError(
        "train: need at least 2 languages; with one language the language "
        "vector is indistinguishable from a bias");

  ModelParams p;
  p.level = level;
  p.vocab = std::move(vocab);
  p.languages = prep.languages;
  p.lang_dim = config.lang_dim;
  p.sym_dim = config.sym_dim;
  p.hidden_dim = config.hidden_dim;
  p.lang_all_layers = config.lang_all_layers;

  const int V = p.vocab.size();
  const int H = config.hidden_dim;
  const int in1 = config.sym_dim + config.lang_dim;
  const int in2 = config.lang_all_layers ? H + config.lang_dim : H;

  Rng master(config.seed);
  Rng winit = master.fork(1);
  Rng langinit = master.fork(2);
  Rng shuffler = master.fork(3);

  p.sym_emb.resize(V, config.sym_dim);
  fill_uniform(p.sym_emb, winit, 0.1);
  init_layer(p.l1, in1, H, winit);
  init_layer(p.l2, in2, H, winit);
  p.w_out.resize(V, H);
  fill_uniform(p.w_out, winit, 1.0 / std::sqrt(static_cast<double>(H)));
  p.b_out = MatrixXd::Zero(V, 1);

  // One independent stream per canonical language slot, so renaming a
  // language never changes the vector its corpus starts from.
  p.lang_emb.resize(static_cast<Eigen::Index>(p.languages.size()), config.lang_dim);
  for (Eigen::Index li = 0; li < p.lang_emb.rows(); ++li) {
    Rng lr = langinit.fork(static_cast<std::uint64_t>(li));
    for (int d = 0; d < config.lang_dim; ++d)
      p.lang_emb(li, d) = 0.1 * lr.normal();
  }

  auto dataset_loss = [&](const ModelParams& params) {
    double loss = 0.0;
    long symbols = 0;
    for (const auto& item : prep.items) {
      loss += run_sequence(params, item, config.seq_len, nullptr);
      symbols += static_cast<long>(item.ids.size()) + 1;
    }
    return loss / static_cast<double>(symbols);
  };

  TrainResult result;
  result.loss_curve.push_back(dataset_loss(p));

  std::vector<size_t> order(prep.items.size());
  std::iota(order.begin(), order.end(), size_t{0});
  auto param_tensors = p.tensors();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffler.shuffle(order);
    double epoch_loss = 0.0;
    long epoch_symbols = 0;

    for (size_t b0 = 0; b0 < order.size();
         b0 += static_cast<size_t>(config.batch_size)) {
      const size_t b1 = std::min(order.size(),
                                 b0 + static_cast<size_t>(config.batch_size));
      GradSet grads(p);
      long batch_symbols = 0;
      for (size_t i = b0; i < b1; ++i) {
        const Item& item = prep.items[order[i]];
        epoch_loss += run_sequence(p, item, config.seq_len, &grads);
        batch_symbols += static_cast<long>(item.ids.size()) + 1;
      }
      epoch_symbols += batch_symbols;

      auto grad_tensors = grads.tensors();
      for (auto* g : grad_tensors) *g /= static_cast<double>(batch_symbols);
      const double norm = global_norm(grads);
      const double scale = norm > config.clip_norm ? config.clip_norm / norm : 1.0;
      for (size_t ti = 0; ti < param_tensors.size(); ++ti)
        *param_tensors[ti].second -=
            (config.learning_rate * scale) * *grad_tensors[ti];
    }

    result.loss_curve.push_back(epoch_loss / static_cast<double>(epoch_symbols));
    for (const auto& [name, t] : param_tensors)
      if (!t->allFinite())
        throw Error(ExitCode::internal,
                    "train: non-finite values in " + name + " after epoch " +
                        std::to_string(epoch + 1) +
                        " (try a lower learning rate)");
  }

  result.vectors.reserve(p.languages.size());
  for (size_t li = 0; li < p.languages.size(); ++li)
    result.vectors.push_back(
        {p.languages[li], p.lang_emb.row(static_cast<Eigen::Index>(li)).transpose()});
  result.params = std::move(p);
  return result;
}

Eigen::VectorXd next_distribution(const ModelParams& params,
                                  const std::string& language,
                                  const std::vector<std::string>& prefix) {
  const int li = params.lang_index(language);
  if (li < 0) throw ValidationError("next_distribution: unknown language " + language);
  const int H = params.hidden_dim;
  const int ds = params.sym_dim;
  const int k = params.lang_dim;
  const VectorXd lang_vec = params.lang_emb.row(li).transpose();

  VectorXd h1 = VectorXd::Zero(H), c1 = VectorXd::Zero(H);
  VectorXd h2 = VectorXd::Zero(H), c2 = VectorXd::Zero(H);
  VectorXd logits;
  for (size_t t = 0; t <= prefix.size(); ++t) {
    const int input =
        t == 0 ? Vocab::kEos : params.vocab.lookup(prefix[t - 1]);
    VectorXd x1(ds + k);
    x1.head(ds) = params.sym_emb.row(input).transpose();
    x1.tail(k) = lang_vec;

    auto step = [&](const LstmLayer& l, const VectorXd& x, VectorXd& h, VectorXd& c) {
      VectorXd z = l.w_in * x + l.w_rec * h + l.bias.col(0);
      VectorXd i = sigmoid(z.segment(0, H));
      VectorXd f = sigmoid(z.segment(H, H));
      VectorXd g = z.segment(2 * H, H).array().tanh();
      VectorXd o = sigmoid(z.segment(3 * H, H));
      c = f.cwiseProduct(c) + i.cwiseProduct(g);
      h = o.cwiseProduct(c.array().tanh().matrix());
    };
    step(params.l1, x1, h1, c1);
    if (params.lang_all_layers) {
      VectorXd x2(H + k);
      x2.head(H) = h1;
      x2.tail(k) = lang_vec;
      step(params.l2, x2, h2, c2);
    } else {
      step(params.l2, h1, h2, c2);
    }
    logits = params.w_out * h2 + params.b_out.col(0);
  }
  VectorXd ex = (logits.array() - logits.maxCoeff()).exp();
  return ex / ex.sum();
}

double grad_check(const ModelParams& params,
                  const std::vector<abstr::SymbolSequence>& batch,
                  double epsilon) {
  if (epsilon <= 0) throw ConfigError("grad_check: epsilon must be positive");
  if (batch.empty()) throw ValidationError("grad_check: empty batch");

  std::vector<Item> items;
  long symbols = 0;
  for (const auto& s : batch) {
    const int li = params.lang_index(s.language);
    if (li < 0)
      throw ValidationError("grad_check: unknown language " + s.language);
    Item item;
    item.lang = li;
    for (const auto& sym : s.symbols)
      item.ids.push_back(params.vocab.lookup(sym));
    symbols += static_cast<long>(item.ids.size()) + 1;
    items.push_back(std::move(item));
  }

  // Mean per-symbol loss; no truncation, so the analytic gradient is exact.
  const int full = 1 << 30;
  auto loss_of = [&](const ModelParams& m) {
    double loss = 0.0;
    for (const auto& item : items) loss += run_sequence(m, item, full, nullptr);
    return loss / static_cast<double>(symbols);
  };

  ModelParams work = params;
  GradSet grads(work);
  for (const auto& item : items) run_sequence(work, item, full, &grads);
  auto grad_tensors = grads.tensors();
  for (auto* g : grad_tensors) *g /= static_cast<double>(symbols);

  auto work_tensors = work.tensors();
  std::vector<long> sizes;
  long total = 0;
  for (auto& [name, t] : work_tensors) {
    sizes.push_back(static_cast<long>(t->size()));
    total += static_cast<long>(t->size());
  }

  Rng rng(fnv1a("grad_check"));
  double max_rel = 0.0;
  for (int s = 0; s < 100; ++s) {
    long flat = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(total)));
    size_t ti = 0;
    while (flat >= sizes[ti]) flat -= sizes[ti++];
    double* cell = work_tensors[ti].second->data() + flat;
    const double saved = *cell;
    *cell = saved + epsilon;
    const double up = loss_of(work);
    *cell = saved - epsilon;
    const double down = loss_of(work);
    *cell = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double analytic = grad_tensors[ti]->data()[flat];
    // The floor turns the check absolute below 1e-3, where finite
    // differences on an O(1) loss bottom out in rounding noise.
    const double rel = std::abs(analytic - numeric) /
                       std::max(1e-3, std::abs(analytic) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

double batch_gradient_norm(const ModelParams& params,
                           const std::vector<abstr::SymbolSequence>& batch) {
  if (batch.empty()) throw ValidationError("batch_gradient_norm: empty batch");
  std::vector<Item> items;
  long symbols = 0;
  for (const auto& s : batch) {
    const int li = params.lang_index(s.language);
    if (li < 0)
      throw ValidationError("batch_gradient_norm: unknown language " +
                            s.language);
    Item item;
    item.lang = li;
    for (const auto& sym : s.symbols)
      item.ids.push_back(params.vocab.lookup(sym));
    symbols += static_cast<long>(item.ids.size()) + 1;
    items.push_back(std::move(item));
  }
  GradSet grads(params);
  for (const auto& item : items)
    run_sequence(params, item, 1 << 30, &grads);
  for (auto* g : grads.tensors()) *g /= static_cast<double>(symbols);
  return global_norm(grads);
}

std::vector<LanguageVector> language_vectors(const ModelParams& params) {
  std::vector<LanguageVector> out;
  out.reserve(params.languages.size());
  for (size_t li = 0; li < params.languages.size(); ++li)
    out.push_back({params.languages[li],
                   params.lang_emb.row(static_cast<Eigen::Index>(li)).transpose()});
  return out;
}

dist::DistanceMatrix embedding_distance(
    const std::vector<LanguageVector>& vectors) {
  std::vector<std::string> languages;
  std::vector<VectorXd> vecs;
  for (const auto& lv : vectors) {
    languages.push_back(lv.language);
    vecs.push_back(lv.vec);
  }
  return dist::cosine_distance_matrix(std::move(languages), vecs, "embedding");
}

std::string vectors_csv(const std::vector<LanguageVector>& vectors) {
  if (vectors.empty()) throw ValidationError("vectors_csv: no vectors");
  std::string out = "lang";
  for (Eigen::Index d = 0; d < vectors.front().vec.size(); ++d)
    out += ",v" + std::to_string(d + 1);
  out += '\n';
  for (const auto& lv : vectors) {
    out += lv.language;
    for (Eigen::Index d = 0; d < lv.vec.size(); ++d) {
      out += ',';
      out += format_double(lv.vec(d));
    }
    out += '\n';
  }
  return out;
}

std::vector<LanguageVector> vectors_from_csv(std::string_view text) {
  std::vector<std::string> lines;
  for (auto& line : split(std::string(text), '\n')) {
    std::string t(trim(line));
    if (!t.empty()) lines.push_back(t);
  }
  if (lines.size() < 2) throw ParseError("vectors csv: too few lines");
  auto header = split(lines[0], ',');
  if (header.size() < 2 || header[0] != "lang")
    throw ParseError("vectors csv: bad header");
  const size_t dim = header.size() - 1;
  std::vector<LanguageVector> out;
  for (size_t r = 1; r < lines.size(); ++r) {
    auto cells = split(lines[r], ',');
    if (cells.size() != dim + 1)
      throw ParseError("vectors csv: row " + std::to_string(r) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(dim + 1));
    LanguageVector lv;
    lv.language = cells[0];
    lv.vec.resize(static_cast<Eigen::Index>(dim));
    for (size_t d = 0; d < dim; ++d) {
      try {
        lv.vec(static_cast<Eigen::Index>(d)) = std::stod(cells[d + 1]);
      } catch (const std::exception&) {
        throw ParseError("vectors csv: bad number '" + cells[d + 1] + "'");
      }
    }
    out.push_back(std::move(lv));
  }
  return out;
}

std::string encode_model(const ModelParams& params) {
  nlohmann::json header;
  header["level"] = abstr::to_string(params.level);
  header["languages"] = params.languages;
  header["vocab"] = params.vocab.symbols;
  header["lang_dim"] = params.lang_dim;
  header["sym_dim"] = params.sym_dim;
  header["hidden_dim"] = params.hidden_dim;
  header["lang_all_layers"] = params.lang_all_layers;

  std::string out = "langlab-lm 1\n";
  out += header.dump();
  out += '\n';
  for (const auto& [name, t] : params.tensors()) {
    out += "tensor " + name + ' ' + std::to_string(t->rows()) + ' ' +
           std::to_string(t->cols()) + '\n';
    for (Eigen::Index r = 0; r < t->rows(); ++r) {
      for (Eigen::Index c = 0; c < t->cols(); ++c) {
        if (c) out += ' ';
        out += fmt_hex((*t)(r, c));
      }
      out += '\n';
    }
  }
  out += "end\n";
  return out;
}

ModelParams decode_model(std::string_view text) {
  std::vector<std::string> lines = split(std::string(text), '\n');
  size_t pos = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= lines.size()) throw ParseError("model: truncated file");
    return lines[pos++];
  };

  if (trim(next_line()) != "langlab-lm 1")
    throw ParseError("model: bad magic (expected 'langlab-lm 1')");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(next_line());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: bad header: ") + e.what());
  }

  ModelParams p;
  try {
    p.level = abstr::level_from_string(header.at("level").get<std::string>());
    p.languages = header.at("languages").get<std::vector<std::string>>();
    p.vocab.symbols = header.at("vocab").get<std::vector<std::string>>();
    p.lang_dim = header.at("lang_dim").get<int>();
    p.sym_dim = header.at("sym_dim").get<int>();
    p.hidden_dim = header.at("hidden_dim").get<int>();
    p.lang_all_layers = header.at("lang_all_layers").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: bad header: ") + e.what());
  }
  if (p.vocab.symbols.size() < 2 || p.vocab.symbols[0] != "<unk>" ||
      p.vocab.symbols[1] != "</s>")
    throw ValidationError("model: vocab missing special symbols");
  for (size_t i = 0; i < p.vocab.symbols.size(); ++i)
    if (!p.vocab.index.emplace(p.vocab.symbols[i], static_cast<int>(i)).second)
      throw ValidationError("model: duplicate vocab symbol " + p.vocab.symbols[i]);

  std::map<std::string, Eigen::MatrixXd*> slots;
  for (auto& [name, t] : p.tensors()) slots[name] = t;
  std::set<std::string> seen;
  for (;;) {
    std::string line(trim(next_line()));
    if (line == "end") break;
    std::istringstream ss(line);
    std::string kw, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(ss >> kw >> name >> rows >> cols) || kw != "tensor")
      throw ParseError("model: expected tensor header, got '" + line + "'");
    auto it = slots.find(name);
    if (it == slots.end()) throw ParseError("model: unknown tensor " + name);
    if (!seen.insert(name).second)
      throw ParseError("model: duplicate tensor " + name);
    it->second->resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      std::string row = next_line();
      const char* cur = row.c_str();
      for (Eigen::Index c = 0; c < cols; ++c) {
        char* end = nullptr;
        const double v = std::strtod(cur, &end);
        if (end == cur)
          throw ParseError("model: bad value in tensor " + name + " row " +
                           std::to_string(r));
        (*it->second)(r, c) = v;
        cur = end;
      }
    }
  }
  if (seen.size() != slots.size())
    throw ParseError("model: missing tensors");

  const int V = p.vocab.size();
  const int H = p.hidden_dim;
  const int in1 = p.sym_dim + p.lang_dim;
  const int in2 = p.lang_all_layers ? H + p.lang_dim : H;
  auto expect = [&](const char* name, const Eigen::MatrixXd& m, Eigen::Index r,
                    Eigen::Index c) {
    if (m.rows() != r || m.cols() != c)
      throw ValidationError(std::string("model: tensor ") + name +
                            " has shape " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected " +
                            std::to_string(r) + "x" + std::to_string(c));
  };
  expect("sym_emb", p.sym_emb, V, p.sym_dim);
  expect("lang_emb", p.lang_emb,
         static_cast<Eigen::Index>(p.languages.size()), p.lang_dim);
  expect("l1_w_in", p.l1.w_in, 4 * H, in1);
  expect("l1_w_rec", p.l1.w_rec, 4 * H, H);
  expect("l1_bias", p.l1.bias, 4 * H, 1);
  expect("l2_w_in", p.l2.w_in, 4 * H, in2);
  expect("l2_w_rec", p.l2.w_rec, 4 * H, H);
  expect("l2_bias", p.l2.bias, 4 * H, 1);
  expect("w_out", p.w_out, V, H);
  expect("b_out", p.b_out, V, 1);
  for (const auto& [name, t] : p.tensors())
    if (!t->allFinite())
      throw ValidationError(std::string("model: non-finite values in ") + name);
  return p;
}

void save_model(const ModelParams& params, const std::string& path) {
  write_file(path, encode_model(params));
}

ModelParams load_model(const std::string& path) {
  return decode_model(read_file(path));
}

}  // namespace langlab::lm
