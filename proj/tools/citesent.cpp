#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "citesent/classify.hpp"
#include "citesent/config.hpp"
#include "citesent/corpus.hpp"
#include "citesent/error.hpp"
#include "citesent/eval.hpp"
#include "citesent/polarity.hpp"
#include "citesent/sent2vec.hpp"
#include "citesent/word2vec.hpp"

namespace fs = std::filesystem;
using namespace citesent;

namespace {

struct Overrides {
  std::optional<fs::path> config_file;
  std::vector<std::pair<std::string, std::string>> values;

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (config_file) cfg.load_file(*config_file);
    for (const auto& [k, v] : values) cfg.set(k, v);
    return cfg;
  }
};

void add_config_flags(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_file, "key=value configuration file")->check(CLI::ExistingFile);
  const std::pair<const char*, const char*> flags[] = {
      {"--dim", "dim"},         {"--window", "window"},       {"--negatives", "negatives"},
      {"--epochs", "epochs"},   {"--lr", "lr"},               {"--min-count", "min_count"},
      {"--subsample", "subsample"}, {"--seed", "seed"},       {"--workers", "workers"},
      {"--k", "k"},             {"--lambda", "lambda"},       {"--svm-epochs", "svm_epochs"},
      {"--min-tokens", "min_tokens"},
  };
  for (const auto& [flag, key] : flags) {
    std::string k = key;
    app.add_option_function<std::string>(
        flag, [&o, k](const std::string& v) { o.values.emplace_back(k, v); },
        "overrides config key '" + k + "'");
  }
  app.add_flag_callback("--stratify", [&o] { o.values.emplace_back("stratify", "true"); },
                        "stratified folds (default)");
  app.add_flag_callback("--no-stratify", [&o] { o.values.emplace_back("stratify", "false"); },
                        "plain shuffled folds");
  app.add_flag_callback("--class-weight", [&o] { o.values.emplace_back("class_weight", "true"); },
                        "balanced per-class hinge costs");
}

fs::path require(const fs::path& given, const fs::path& fallback, const char* what) {
  if (!given.empty()) return given;
  if (!fallback.empty()) return fallback;
  throw Error(std::string("no ") + what + " given");
}

fs::path output_path(const fs::path& given, const PipelineConfig& cfg, const char* default_name) {
  if (!given.empty()) return given;
  if (!cfg.output.empty()) return cfg.output / default_name;
  throw Error("no output path given (use -o or set output= in the config)");
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& p, const std::string& text) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + p.string() + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_training(const TrainingStats& stats) {
  for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e) {
    std::cerr << "epoch " << e + 1 << " mean loss " << stats.epoch_mean_loss[e] << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation sentiment pipeline: corpus preprocessing, word2vec, sentence vectors, SVM evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;
  add_config_flags(app, ov);

  fs::path in, out, lexicon, embeddings, model_in, model_out, ps_out;
  std::string token, labels, name;
  std::size_t top_k = 10;
  bool bow = false;

  auto* pre = app.add_subcommand("preprocess", "segment, tokenize and filter a corpus into a sentence file");
  pre->add_option("corpus", in, "directory of documents, or a file with one document per line");
  pre->add_option("-o,--output", out, "sentence file");

  auto* train = app.add_subcommand("train", "train skip-gram embeddings on a sentence file");
  train->add_option("sentences", in, "sentence file from preprocess");
  train->add_option("-o,--output", out, "embedding file");

  auto* polar = app.add_subcommand("select-polar", "pick balanced positive and negative sentences by lexicon");
  polar->add_option("sentences", in, "sentence file");
  polar->add_option("--lexicon", lexicon, "polar phrase list");
  polar->add_option("-o,--output", out, "directory for positive.txt and negative.txt");
  polar->add_option("--embeddings-out", ps_out, "also train embeddings on the selected sentences");

  auto* embed = app.add_subcommand("embed", "write the mean word vector of every sentence");
  embed->add_option("sentences", in, "sentence file");
  embed->add_option("--embeddings", embeddings, "embedding file");
  embed->add_option("-o,--output", out, "sentence vector file");

  auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validated SVM on a labeled dataset");
  evaluate->add_option("dataset", in, "TSV of label<TAB>sentence");
  auto* emb_opt = evaluate->add_option("--embeddings", embeddings, "embedding file for sentence vectors");
  evaluate->add_flag("--bow", bow, "bag-of-words features instead of sentence vectors")->excludes(emb_opt);
  evaluate->add_option("--labels", labels, "comma-separated label order");
  evaluate->add_option("--name", name, "dataset name (selects a standard label set)");
  evaluate->add_option("--model", model_in, "score a saved model instead of cross-validating");
  evaluate->add_option("--save-model", model_out, "also train on all examples and save the model");
  evaluate->add_option("-o,--output", out, "report file (default: stdout)");

  auto* nearest = app.add_subcommand("nearest", "nearest neighbors of a token by cosine");
  nearest->add_option("token", token, "query token")->required();
  nearest->add_option("--embeddings", embeddings, "embedding file");
  nearest->add_option("-n,--top", top_k, "number of neighbors");

  auto* config = app.add_subcommand("config", "show the effective configuration");
  bool dump = false;
  config->add_flag("--dump", dump, "print every key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const PipelineConfig cfg = ov.resolve();

    if (*config) {
      std::cout << cfg.dump();
      return 0;
    }
    cfg.validate();

    if (*pre) {
      const auto docs = load_corpus(require(in, cfg.corpus, "corpus"));
      PreprocessStats stats;
      const auto sentences = preprocess_documents(docs, cfg.min_tokens, cfg.workers, &stats);
      const fs::path dest = output_path(out, cfg, "sentences.txt");
      ensure_parent(dest);
      write_sentences(dest, sentences);
      std::cout << "documents " << stats.documents << "\nsegmented " << stats.segmented
                << "\nsentences " << stats.kept << "\n";
      if (stats.invalid_sequences > 0) {
        std::cerr << "replaced " << stats.invalid_sequences << " invalid UTF-8 sequences\n";
      }
    } else if (*train) {
      const auto sentences = read_sentences(require(in, cfg.sentences, "sentence file"));
      TrainingStats stats;
      const auto matrix = train_embeddings(sentences, cfg.training_config(), &stats);
      print_training(stats);
      const fs::path dest = output_path(out, cfg, "embeddings.txt");
      ensure_parent(dest);
      save_embeddings(matrix, dest);
      std::cout << "vocabulary " << matrix.vocab().size() << "\ndim " << matrix.dim() << "\n";
    } else if (*polar) {
      const auto sentences = read_sentences(require(in, cfg.sentences, "sentence file"));
      const auto lex = load_lexicon(require(lexicon, cfg.lexicon, "lexicon"));
      const auto sub = select_polar_sentences(sentences, lex, cfg.polar_selection_seed());
      fs::path dir = out.empty() ? cfg.output : out;
      if (dir.empty()) throw Error("no output directory given (use -o or set output= in the config)");
      fs::create_directories(dir);
      write_sentences(dir / "positive.txt", sub.positive);
      write_sentences(dir / "negative.txt", sub.negative);
      std::cout << "positive " << sub.positive.size() << "\nnegative " << sub.negative.size() << "\n";
      if (!ps_out.empty()) {
        TrainingStats stats;
        const auto matrix = train_ps_embeddings(sub, cfg.training_config(), &stats);
        print_training(stats);
        ensure_parent(ps_out);
        save_embeddings(matrix, ps_out);
        std::cout << "vocabulary " << matrix.vocab().size() << "\n";
      }
    } else if (*embed) {
      const auto sentences = read_sentences(require(in, cfg.sentences, "sentence file"));
      const auto matrix = load_embeddings(require(embeddings, cfg.embeddings, "embedding file"));
      const auto vectors = embed_corpus(sentences, matrix, cfg.workers);
      std::ostringstream buf;
      write_sentence_vectors(buf, sentences, vectors);
      write_text(output_path(out, cfg, "sentence_vectors.txt"), buf.str());
    } else if (*evaluate) {
      LabeledDataset ds = load_dataset(require(in, cfg.dataset, "dataset"), split_commas(labels), name);
      std::optional<EmbeddingMatrix> matrix;
      Featurizer featurizer = BagOfWordsFeatures{};
      if (!bow) {
        matrix = load_embeddings(require(embeddings, cfg.embeddings, "embedding file (or --bow)"));
        featurizer = Sent2VecFeatures{&*matrix};
      }
      std::string report;
      if (!model_in.empty()) {
        const LinearModel model = load_model(model_in);
        const auto examples = featurize(ds, featurizer);
        if (!examples.empty() && examples.front().features.size() != model.dim()) {
          throw DimensionMismatch("features have " + std::to_string(examples.front().features.size()) +
                                  " components but model '" + model_in.string() + "' expects " +
                                  std::to_string(model.dim()));
        }
        std::vector<std::string> truth, pred;
        for (const auto& e : examples) {
          truth.push_back(e.label);
          pred.push_back(predict(model, e.features));
        }
        ExperimentResult r;
        r.report = f1_scores(truth, pred, model.classes);
        r.predictions = pred;
        r.feature_dim = model.dim();
        for (const auto& c : model.classes) {
          if (c == "x") r.x_vs_rest = x_vs_rest_score(truth, pred);
        }
        report = format_report(r, ds.name);
      } else {
        const auto result = run_experiment(ds, featurizer, cfg.experiment_options());
        report = format_report(result, ds.name);
      }
      if (!model_out.empty()) {
        SvmConfig svm = cfg.experiment_options().svm;
        const auto model = train_ovr(featurize(ds, featurizer), ds.label_set, svm);
        ensure_parent(model_out);
        save_model(model, model_out);
      }
      if (out.empty()) std::cout << report;
      else write_text(out, report);
    } else if (*nearest) {
      const auto matrix = load_embeddings(require(embeddings, cfg.embeddings, "embedding file"));
      for (const auto& n : nearest_neighbors(matrix, token, top_k)) {
        std::printf("%s\t%.6f\n", n.token.c_str(), n.cosine);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "citesent: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
