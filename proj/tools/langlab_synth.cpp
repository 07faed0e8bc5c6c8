#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "langlab/error.hpp"
#include "langlab/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "langlab-synth: generate an artificial language family with a known "
      "genealogy (conllu/, brackets/, gold.nwk, coords.csv, manifest.json)"};
  app.set_version_flag("--version", "langlab-synth 0.1.0");

  langlab::synth::SynthConfig config;
  std::string out;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--languages", config.n_languages, "number of languages")
      ->capture_default_str();
  app.add_option("--sentences", config.sentences, "sentences per language")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "generator seed")
      ->capture_default_str();
  app.add_option("--drift", config.drift,
                 "grammar random-walk scale per unit edge length")
      ->capture_default_str();
  app.add_option("--mutation", config.mutation,
                 "per-word lexicon mutation rate per unit edge length")
      ->capture_default_str();
  std::string train_json;
  app.add_option("--train-json", train_json,
                 "JSON object of train keys to embed in the manifest");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto corpus = langlab::synth::generate(config);
    langlab::synth::write_fixture(corpus, out, train_json);
    std::cout << "wrote " << corpus.treebanks.size() << " languages to " << out
              << " (seed " << config.seed << ")\n";
  } catch (const langlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
