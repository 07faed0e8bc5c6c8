#include "langlab/manifest.hpp"

#include <filesystem>
#include <nlohmann/json.hpp>

#include "langlab/error.hpp"
#include "langlab/util.hpp"

namespace langlab::mf {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (fs::path(base_dir) / p).lexically_normal().string();
}

std::map<std::string, std::string> path_map(const json& j, const char* key,
                                            const std::string& base_dir,
                                            const std::set<std::string>& langs) {
  std::map<std::string, std::string> out;
  if (!j.contains(key)) return out;
  const json& block = j.at(key);
  if (!block.is_object())
    throw ConfigError(std::string("manifest: '") + key + "' must be an object");
  for (const auto& [lang, path] : block.items()) {
    if (!langs.count(lang))
      throw ConfigError(std::string("manifest: '") + key +
                        "' names unlisted language " + lang);
    if (!path.is_string())
      throw ConfigError(std::string("manifest: ") + key + "." + lang +
                        " must be a path string");
    out[lang] = resolve(base_dir, path.get<std::string>());
  }
  return out;
}

std::set<std::string> missing_set(const json& j, const char* key,
                                  const std::set<std::string>& langs) {
  std::set<std::string> out;
  if (!j.contains("missing")) return out;
  const json& block = j.at("missing");
  if (!block.is_object())
    throw ConfigError("manifest: 'missing' must be an object");
  if (!block.contains(key)) return out;
  for (const auto& entry : block.at(key)) {
    const std::string lang = entry.get<std::string>();
    if (!langs.count(lang))
      throw ConfigError(std::string("manifest: missing.") + key +
                        " names unlisted language " + lang);
    out.insert(lang);
  }
  return out;
}

void check_coverage(const char* key, const std::vector<std::string>& languages,
                    const std::map<std::string, std::string>& paths,
                    const std::set<std::string>& missing) {
  for (const auto& lang : languages) {
    if (paths.count(lang) && missing.count(lang))
      throw ConfigError(std::string("manifest: ") + lang + " both has a " +
                        key + " path and is marked missing");
    if (!paths.count(lang) && !missing.count(lang))
      throw ConfigError(std::string("manifest: language ") + lang +
                        " has no " + key +
                        " path and is not marked missing for it");
  }
}

TrainPatch train_patch_from_json(const json& t, const char* where) {
  if (!t.is_object())
    throw ConfigError(std::string(where) + " must be an object");
  static const std::set<std::string> known = {
      "lang_dim",   "sym_dim",     "hidden_dim", "batch_size",
      "seq_len",    "epochs",      "min_count",  "learning_rate",
      "clip_norm",  "lang_all_layers"};
  for (const auto& [key, _] : t.items())
    if (!known.count(key))
      throw ConfigError(std::string(where) + ": unknown train key '" + key +
                        "'");
  TrainPatch p;
  auto get_int = [&](const char* key) -> std::optional<int> {
    if (!t.contains(key)) return std::nullopt;
    return t.at(key).get<int>();
  };
  p.lang_dim = get_int("lang_dim");
  p.sym_dim = get_int("sym_dim");
  p.hidden_dim = get_int("hidden_dim");
  p.batch_size = get_int("batch_size");
  p.seq_len = get_int("seq_len");
  p.epochs = get_int("epochs");
  p.min_count = get_int("min_count");
  if (t.contains("learning_rate"))
    p.learning_rate = t.at("learning_rate").get<double>();
  if (t.contains("clip_norm")) p.clip_norm = t.at("clip_norm").get<double>();
  if (t.contains("lang_all_layers"))
    p.lang_all_layers = t.at("lang_all_layers").get<bool>();
  return p;
}

}  // namespace

void TrainPatch::apply(lm::TrainConfig& c) const {
  if (lang_dim) c.lang_dim = *lang_dim;
  if (sym_dim) c.sym_dim = *sym_dim;
  if (hidden_dim) c.hidden_dim = *hidden_dim;
  if (batch_size) c.batch_size = *batch_size;
  if (seq_len) c.seq_len = *seq_len;
  if (epochs) c.epochs = *epochs;
  if (min_count) c.min_count = *min_count;
  if (learning_rate) c.learning_rate = *learning_rate;
  if (clip_norm) c.clip_norm = *clip_norm;
  if (lang_all_layers) c.lang_all_layers = *lang_all_layers;
}

std::vector<std::string> Manifest::conllu_languages() const {
  std::vector<std::string> out;
  for (const auto& lang : languages)
    if (conllu.count(lang)) out.push_back(lang);
  return out;
}

std::vector<std::string> Manifest::brackets_languages() const {
  std::vector<std::string> out;
  for (const auto& lang : languages)
    if (brackets.count(lang)) out.push_back(lang);
  return out;
}

Manifest parse_manifest(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("manifest: top level must be an object");

  Manifest m;
  m.dir = base_dir;
  try {
    if (!j.contains("languages") || !j.at("languages").is_array() ||
        j.at("languages").empty())
      throw ConfigError("manifest: 'languages' must be a non-empty array");
    for (const auto& entry : j.at("languages")) {
      const std::string lang = entry.get<std::string>();
      if (lang.empty()) throw ConfigError("manifest: empty language ID");
      m.languages.push_back(lang);
    }
    std::set<std::string> langs(m.languages.begin(), m.languages.end());
    if (langs.size() != m.languages.size())
      throw ConfigError("manifest: duplicate language IDs");

    m.conllu = path_map(j, "conllu", base_dir, langs);
    m.brackets = path_map(j, "brackets", base_dir, langs);
    m.missing_conllu = missing_set(j, "conllu", langs);
    m.missing_brackets = missing_set(j, "brackets", langs);
    if (j.contains("conllu"))
      check_coverage("conllu", m.languages, m.conllu, m.missing_conllu);
    if (j.contains("brackets"))
      check_coverage("brackets", m.languages, m.brackets, m.missing_brackets);

    if (j.contains("gold_tree"))
      m.gold_tree = resolve(base_dir, j.at("gold_tree").get<std::string>());
    if (j.contains("coordinates"))
      m.coordinates = resolve(base_dir, j.at("coordinates").get<std::string>());
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned())
        throw ConfigError("manifest: 'seed' must be a non-negative integer");
      m.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("func_upos"))
      for (const auto& entry : j.at("func_upos"))
        m.func_upos.insert(entry.get<std::string>());

    if (j.contains("train"))
      m.train = train_patch_from_json(j.at("train"), "manifest: 'train'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return m;
}

TrainPatch parse_train_patch(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
    return train_patch_from_json(j, "train config");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
}

Manifest load_manifest(const std::string& path) {
  const std::string text = read_file(path);
  return parse_manifest(text,
                        std::filesystem::path(path).parent_path().string());
}

}  // namespace langlab::mf
