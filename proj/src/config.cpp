#include "citesent/config.hpp"

#include <fstream>
#include <sstream>

#include "citesent/error.hpp"
#include "citesent/random.hpp"
#include "text_format.hpp"

namespace citesent {
namespace {

template <typename T>
T parse_value(std::string_view key, std::string_view value) {
  const auto v = text::parse_number<T>(value);
  if (!v) throw Error("config: invalid value '" + std::string(value) + "' for " + std::string(key));
  return *v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw Error("config: invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

std::string number(double x) {
  std::string s;
  text::append_number(s, x);
  return s;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> k = {
      "dim",    "window",    "negatives",  "epochs", "lr",        "min_count",
      "subsample", "seed",   "workers",    "k",      "lambda",    "svm_epochs",
      "class_weight", "stratify", "min_tokens", "corpus", "sentences", "lexicon",
      "dataset", "embeddings", "output"};
  return k;
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
  value = strip(value);
  if (key == "dim") training.dim = parse_value<std::size_t>(key, value);
  else if (key == "window") training.window = parse_value<std::size_t>(key, value);
  else if (key == "negatives") training.negatives = parse_value<std::size_t>(key, value);
  else if (key == "epochs") training.epochs = parse_value<std::size_t>(key, value);
  else if (key == "lr") training.initial_lr = parse_value<double>(key, value);
  else if (key == "min_count") training.min_count = parse_value<std::uint64_t>(key, value);
  else if (key == "subsample") training.subsample_t = parse_value<double>(key, value);
  else if (key == "seed") seed = parse_value<std::uint64_t>(key, value);
  else if (key == "workers") workers = parse_value<unsigned>(key, value);
  else if (key == "k") k = parse_value<std::size_t>(key, value);
  else if (key == "lambda") lambda = parse_value<double>(key, value);
  else if (key == "svm_epochs") svm_epochs = parse_value<std::size_t>(key, value);
  else if (key == "class_weight") class_weight = parse_bool(key, value);
  else if (key == "stratify") stratify = parse_bool(key, value);
  else if (key == "min_tokens") min_tokens = parse_value<std::size_t>(key, value);
  else if (key == "corpus") corpus = std::string(value);
  else if (key == "sentences") sentences = std::string(value);
  else if (key == "lexicon") lexicon = std::string(value);
  else if (key == "dataset") dataset = std::string(value);
  else if (key == "embeddings") embeddings = std::string(value);
  else if (key == "output") output = std::string(value);
  else throw Error("config: unknown key '" + std::string(key) + "'");
}

std::string PipelineConfig::get(std::string_view key) const {
  if (key == "dim") return std::to_string(training.dim);
  if (key == "window") return std::to_string(training.window);
  if (key == "negatives") return std::to_string(training.negatives);
  if (key == "epochs") return std::to_string(training.epochs);
  if (key == "lr") return number(training.initial_lr);
  if (key == "min_count") return std::to_string(training.min_count);
  if (key == "subsample") return number(training.subsample_t);
  if (key == "seed") return std::to_string(seed);
  if (key == "workers") return std::to_string(workers);
  if (key == "k") return std::to_string(k);
  if (key == "lambda") return number(lambda);
  if (key == "svm_epochs") return std::to_string(svm_epochs);
  if (key == "class_weight") return class_weight ? "true" : "false";
  if (key == "stratify") return stratify ? "true" : "false";
  if (key == "min_tokens") return std::to_string(min_tokens);
  if (key == "corpus") return corpus.string();
  if (key == "sentences") return sentences.string();
  if (key == "lexicon") return lexicon.string();
  if (key == "dataset") return dataset.string();
  if (key == "embeddings") return embeddings.string();
  if (key == "output") return output.string();
  throw Error("config: unknown key '" + std::string(key) + "'");
}

void PipelineConfig::parse(std::string_view content, const std::string& source) {
  std::istringstream in{std::string(content)};
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = strip(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, n, "expected key=value");
    try {
      set(strip(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, n, e.what());
    }
  }
}

void PipelineConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  parse(buf.str(), path.string());
}

std::string PipelineConfig::dump() const {
  std::string out;
  for (const auto& key : keys()) out += key + "=" + get(key) + "\n";
  return out;
}

void PipelineConfig::validate() const {
  training_config().validate();
  experiment_options().svm.validate();
  if (k < 2) throw Error("config: k must be >= 2");
  for (const auto* p : {&corpus, &sentences, &lexicon, &dataset, &embeddings}) {
    if (!p->empty() && !std::filesystem::exists(*p)) {
      throw Error("config: input path '" + p->string() + "' does not exist");
    }
  }
}

TrainingConfig PipelineConfig::training_config() const {
  TrainingConfig t = training;
  t.seed = derive_seed(seed, "train");
  t.workers = workers;
  return t;
}

std::uint64_t PipelineConfig::polar_selection_seed() const { return derive_seed(seed, "select-polar"); }

ExperimentOptions PipelineConfig::experiment_options() const {
  ExperimentOptions o;
  o.k = k;
  o.seed = derive_seed(seed, "folds");
  o.stratify = stratify;
  o.svm.lambda = lambda;
  o.svm.epochs = svm_epochs;
  o.svm.seed = derive_seed(seed, "svm");
  o.svm.balanced = class_weight;
  o.workers = workers;
  return o;
}

}  // namespace citesent
