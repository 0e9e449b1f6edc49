#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "citesent/classify.hpp"
#include "citesent/config.hpp"
#include "citesent/corpus.hpp"
#include "citesent/error.hpp"
#include "citesent/eval.hpp"
#include "citesent/polarity.hpp"
#include "citesent/sent2vec.hpp"
#include "citesent/word2vec.hpp"

namespace py = pybind11;
using namespace citesent;
using Strings = std::vector<std::string>;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Citation sentiment pipeline: preprocessing, word2vec, sentence vectors, SVM evaluation";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", error.ptr());
  py::register_exception<TrainingDiverged>(m, "TrainingDiverged", error.ptr());

  // corpus
  py::class_<Sentence>(m, "Sentence")
      .def(py::init<>())
      .def(py::init([](std::string doc_id, std::size_t index, Strings tokens) {
             return Sentence{std::move(doc_id), index, std::move(tokens)};
           }),
           py::arg("doc_id"), py::arg("index"), py::arg("tokens"))
      .def_readwrite("doc_id", &Sentence::doc_id)
      .def_readwrite("index", &Sentence::index)
      .def_readwrite("tokens", &Sentence::tokens)
      .def(py::self == py::self)
      .def("__repr__", [](const Sentence& s) {
        return "Sentence(" + s.doc_id + ":" + std::to_string(s.index) + ", " +
               std::to_string(s.tokens.size()) + " tokens)";
      });

  m.def("segment_sentences", [](std::string_view text) { return segment_sentences(text).sentences; },
        py::arg("text"));
  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("filter_short",
        [](const std::vector<Sentence>& s, std::size_t min_tokens) { return filter_short(s, min_tokens); },
        py::arg("sentences"), py::arg("min_tokens") = 3);
  m.def(
      "preprocess",
      [](const std::filesystem::path& corpus, std::size_t min_tokens, unsigned workers) {
        const auto docs = load_corpus(corpus);
        return preprocess_documents(docs, min_tokens, workers);
      },
      py::arg("corpus"), py::arg("min_tokens") = 3, py::arg("workers") = 1,
      "Load a corpus directory or file and return its filtered, tokenized sentences.");
  m.def(
      "preprocess_texts",
      [](const Strings& texts, std::size_t min_tokens) {
        std::vector<RawDocument> docs;
        for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back({std::to_string(i), texts[i]});
        return preprocess_documents(docs, min_tokens);
      },
      py::arg("texts"), py::arg("min_tokens") = 3);
  m.def("write_sentences",
        [](const std::filesystem::path& p, const std::vector<Sentence>& s) { write_sentences(p, s); });
  m.def("read_sentences", &read_sentences);

  // word2vec
  py::class_<TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("dim", &TrainingConfig::dim)
      .def_readwrite("window", &TrainingConfig::window)
      .def_readwrite("negatives", &TrainingConfig::negatives)
      .def_readwrite("epochs", &TrainingConfig::epochs)
      .def_readwrite("initial_lr", &TrainingConfig::initial_lr)
      .def_readwrite("min_count", &TrainingConfig::min_count)
      .def_readwrite("subsample_t", &TrainingConfig::subsample_t)
      .def_readwrite("seed", &TrainingConfig::seed)
      .def_readwrite("workers", &TrainingConfig::workers)
      .def("validate", &TrainingConfig::validate);

  py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
      .def(py::init([](Strings tokens, std::size_t dim, std::vector<float> values) {
             return EmbeddingMatrix(Vocabulary::from_ordered(std::move(tokens)), dim, std::move(values));
           }),
           py::arg("tokens"), py::arg("dim"), py::arg("values"))
      .def_property_readonly("dim", &EmbeddingMatrix::dim)
      .def_property_readonly("tokens", [](const EmbeddingMatrix& e) { return e.vocab().tokens(); })
      .def("__len__", &EmbeddingMatrix::rows)
      .def("__contains__", [](const EmbeddingMatrix& e, std::string_view t) { return e.vocab().contains(t); })
      .def("vector",
           [](const EmbeddingMatrix& e, std::string_view token) {
             const auto id = e.vocab().find(token);
             if (!id) throw py::key_error(std::string(token));
             const auto r = e.row(*id);
             return std::vector<float>(r.begin(), r.end());
           })
      .def(py::self == py::self);

  m.def("train_embeddings",
        [](const std::vector<Sentence>& s, const TrainingConfig& c) {
          py::gil_scoped_release release;
          return train_embeddings(s, c);
        },
        py::arg("sentences"), py::arg("config") = TrainingConfig{});
  m.def("save_embeddings", &save_embeddings, py::arg("matrix"), py::arg("path"));
  m.def("load_embeddings", &load_embeddings, py::arg("path"));
  m.def("embeddings_to_string", [](const EmbeddingMatrix& e) {
    std::ostringstream out;
    write_embeddings(e, out);
    return out.str();
  });
  m.def(
      "nearest_neighbors",
      [](const EmbeddingMatrix& e, std::string_view token, std::size_t k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& n : nearest_neighbors(e, token, k)) out.emplace_back(n.token, n.cosine);
        return out;
      },
      py::arg("matrix"), py::arg("token"), py::arg("k") = 10);
  m.def(
      "pair_gradient",
      [](const std::vector<double>& c, const std::vector<double>& x, int label) {
        const auto g = pair_gradient(c, x, label);
        return py::make_tuple(g.loss, g.grad_center, g.grad_context);
      },
      py::arg("center"), py::arg("context"), py::arg("label"),
      "Returns (loss, d loss / d center, d loss / d context).");

  // sent2vec
  m.def(
      "embed_sentence",
      [](const Strings& tokens, const EmbeddingMatrix& e) {
        const auto v = embed_sentence(tokens, e);
        return py::make_tuple(v.values, v.n_in_vocab);
      },
      py::arg("tokens"), py::arg("matrix"), "Returns (mean vector, number of in-vocabulary tokens).");

  // polarity
  py::class_<PolarLexicon>(m, "PolarLexicon")
      .def(py::init<std::vector<Phrase>, std::vector<Phrase>>(), py::arg("positive"), py::arg("negative"))
      .def_property_readonly("positive", &PolarLexicon::positive)
      .def_property_readonly("negative", &PolarLexicon::negative);
  m.def("load_lexicon", &load_lexicon, py::arg("path"));
  m.def("parse_lexicon", [](std::string_view content) { return parse_lexicon(content); });
  m.def(
      "match_polarity",
      [](const Strings& tokens, const PolarLexicon& lex) {
        return std::string(to_string(match_polarity(Sentence{"", 0, tokens}, lex)));
      },
      py::arg("tokens"), py::arg("lexicon"));
  m.def(
      "select_polar_sentences",
      [](const std::vector<Sentence>& s, const PolarLexicon& lex, std::uint64_t seed) {
        auto sub = select_polar_sentences(s, lex, seed);
        return py::make_tuple(std::move(sub.positive), std::move(sub.negative));
      },
      py::arg("sentences"), py::arg("lexicon"), py::arg("seed") = 1,
      "Returns (positive, negative) balanced sentence lists.");

  // classify
  py::class_<SvmConfig>(m, "SvmConfig")
      .def(py::init<>())
      .def_readwrite("lambda_", &SvmConfig::lambda)
      .def_readwrite("epochs", &SvmConfig::epochs)
      .def_readwrite("seed", &SvmConfig::seed)
      .def_readwrite("balanced", &SvmConfig::balanced)
      .def_readwrite("workers", &SvmConfig::workers);

  py::class_<LinearModel>(m, "LinearModel")
      .def_readonly("classes", &LinearModel::classes)
      .def_readonly("weights", &LinearModel::weights)
      .def_readonly("biases", &LinearModel::biases)
      .def_property_readonly("dim", &LinearModel::dim)
      .def("decision_values",
           [](const LinearModel& lm, const std::vector<double>& x) { return lm.decision_values(x); })
      .def("predict", [](const LinearModel& lm, const std::vector<double>& x) { return predict(lm, x); });

  m.def(
      "train_ovr",
      [](const std::vector<std::vector<double>>& x, const Strings& y, const Strings& labels,
         const SvmConfig& c) {
        if (x.size() != y.size()) throw Error("train_ovr: features and labels differ in length");
        std::vector<LabeledExample> ex;
        for (std::size_t i = 0; i < x.size(); ++i) ex.push_back({x[i], y[i]});
        return train_ovr(ex, labels, c);
      },
      py::arg("features"), py::arg("labels"), py::arg("label_set"), py::arg("config") = SvmConfig{});
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  // eval
  m.def(
      "f1_scores",
      [](const Strings& t, const Strings& p, const Strings& labels) {
        const auto r = f1_scores(t, p, labels);
        py::dict d;
        d["per_class_f1"] = r.per_class_f1;
        d["precision"] = r.precision;
        d["recall"] = r.recall;
        d["support"] = r.support;
        d["micro_f"] = r.micro_f;
        d["macro_f"] = r.macro_f;
        d["weighted_f"] = r.weighted_f;
        return d;
      },
      py::arg("y_true"), py::arg("y_pred"), py::arg("label_set"));
  m.def("x_vs_rest_score",
        [](const Strings& t, const Strings& p, std::string_view x) { return x_vs_rest_score(t, p, x); },
        py::arg("y_true"), py::arg("y_pred"), py::arg("excluded_label") = "x");
  m.def(
      "stratified_kfold",
      [](const Strings& labels, std::size_t k, std::uint64_t seed, bool stratify) {
        return stratified_kfold(labels, k, seed, stratify).fold;
      },
      py::arg("labels"), py::arg("k"), py::arg("seed") = 1, py::arg("stratify") = true);

  py::class_<LabeledDataset>(m, "LabeledDataset")
      .def_readonly("name", &LabeledDataset::name)
      .def_readonly("label_set", &LabeledDataset::label_set)
      .def("labels", &LabeledDataset::labels)
      .def("__len__", [](const LabeledDataset& d) { return d.examples.size(); });
  m.def("load_dataset", &load_dataset, py::arg("path"), py::arg("label_set") = Strings{},
        py::arg("name") = "");

  m.def(
      "evaluate",
      [](const LabeledDataset& ds, const EmbeddingMatrix* embeddings, std::size_t k, std::uint64_t seed,
         bool stratify, const SvmConfig& svm) {
        Featurizer f = BagOfWordsFeatures{};
        if (embeddings) f = Sent2VecFeatures{embeddings};
        ExperimentOptions opt{k, seed, stratify, svm, 1};
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(ds, f, opt);
        }
        py::dict d;
        d["micro_f"] = r.report.micro_f;
        d["macro_f"] = r.report.macro_f;
        d["weighted_f"] = r.report.weighted_f;
        d["per_class_f1"] = r.report.per_class_f1;
        d["support"] = r.report.support;
        d["degenerate_vectors"] = r.report.degenerate_vector_count;
        d["x_vs_rest"] = r.x_vs_rest ? py::cast(*r.x_vs_rest) : py::none();
        d["predictions"] = r.predictions;
        d["report"] = format_report(r, ds.name);
        return d;
      },
      py::arg("dataset"), py::arg("embeddings") = nullptr, py::arg("k") = 10, py::arg("seed") = 1,
      py::arg("stratify") = true, py::arg("svm") = SvmConfig{},
      "k-fold cross-validation. Without embeddings, bag-of-words features are used.");

  // config
  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def("set", &PipelineConfig::set)
      .def("get", &PipelineConfig::get)
      .def("parse", [](PipelineConfig& c, std::string_view s) { c.parse(s); })
      .def("load_file", &PipelineConfig::load_file)
      .def("dump", &PipelineConfig::dump)
      .def("validate", &PipelineConfig::validate)
      .def("training_config", &PipelineConfig::training_config);
}
