#include "citesent/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "citesent/error.hpp"
#include "citesent/random.hpp"
#include "text_format.hpp"

namespace citesent {

void SvmConfig::validate() const {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw Error("svm: lambda must be > 0");
  if (epochs < 1) throw Error("svm: epochs must be >= 1");
}

double BinaryModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw DimensionMismatch("feature vector has " + std::to_string(x.size()) +
                            " components, model expects " + std::to_string(weights.size()));
  }
  return std::inner_product(weights.begin(), weights.end(), x.begin(), bias);
}

namespace {

std::size_t check_examples(std::span<const LabeledExample> examples) {
  if (examples.empty()) throw Error("svm: no training examples");
  const std::size_t dim = examples.front().features.size();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& f = examples[i].features;
    if (f.size() != dim) {
      throw DimensionMismatch("svm: example " + std::to_string(i) + " has " +
                              std::to_string(f.size()) + " features, expected " +
                              std::to_string(dim));
    }
    if (!std::all_of(f.begin(), f.end(), [](double x) { return std::isfinite(x); })) {
      throw Error("svm: example " + std::to_string(i) + " has a non-finite feature");
    }
  }
  return dim;
}

// Iterate w = scale * v, so the per-step shrink (1 - 1/t) costs O(1).
// Running average of w is accumulated lazily: `pending` holds the sum of the
// scales seen since v last changed.
class ScaledIterate {
 public:
  explicit ScaledIterate(std::size_t n) : v_(n, 0.0), sum_(n, 0.0) {}

  double dot(std::span<const double> x, double last) const {
    double s = v_.back() * last;
    for (std::size_t i = 0; i < x.size(); ++i) s += v_[i] * x[i];
    return scale_ * s;
  }

  double norm2() const { return scale_ * scale_ * vnorm2_; }

  void shrink(double factor) {
    if (factor == 0) {
      flush();
      std::fill(v_.begin(), v_.end(), 0.0);
      vnorm2_ = 0;
      scale_ = 1;
    } else {
      scale_ *= factor;
      if (scale_ < 1e-9) {
        flush();
        for (double& x : v_) x *= scale_;
        scale_ = 1;
      }
    }
  }

  void add(std::span<const double> x, double last, double coef) {
    flush();
    const double c = coef / scale_;
    for (std::size_t i = 0; i < x.size(); ++i) v_[i] += c * x[i];
    v_.back() += c * last;
    vnorm2_ = std::inner_product(v_.begin(), v_.end(), v_.begin(), 0.0);
  }

  void accumulate() {
    pending_ += scale_;
    ++count_;
  }

  std::vector<double> average() {
    flush();
    std::vector<double> out(sum_);
    if (count_ > 0) {
      for (double& x : out) x /= static_cast<double>(count_);
    }
    return out;
  }

 private:
  void flush() {
    if (pending_ == 0) return;
    for (std::size_t i = 0; i < v_.size(); ++i) sum_[i] += pending_ * v_[i];
    pending_ = 0;
  }

  std::vector<double> v_;
  std::vector<double> sum_;
  double scale_ = 1;
  double vnorm2_ = 0;
  double pending_ = 0;
  std::uint64_t count_ = 0;
};

}  // namespace

BinaryModel train_binary_svm(std::span<const LabeledExample> examples,
                             std::string_view positive_label, const SvmConfig& config) {
  config.validate();
  const std::size_t dim = check_examples(examples);
  const std::size_t m = examples.size();

  std::vector<double> y(m);
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < m; ++i) {
    y[i] = examples[i].label == positive_label ? 1.0 : -1.0;
    n_pos += y[i] > 0;
  }
  double cost_pos = 1, cost_neg = 1;
  if (config.balanced && n_pos > 0 && n_pos < m) {
    cost_pos = static_cast<double>(m) / (2.0 * static_cast<double>(n_pos));
    cost_neg = static_cast<double>(m) / (2.0 * static_cast<double>(m - n_pos));
  }

  const double max_cost = std::max(cost_pos, cost_neg);
  constexpr double kBiasFeature = 1.0;
  ScaledIterate w(dim + 1);
  Rng rng(config.seed);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});

  const double radius2 = max_cost / config.lambda;
  const std::uint64_t total_steps = config.epochs * m;
  const std::uint64_t average_from = total_steps / 2;
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (const std::size_t i : order) {
      ++t;
      const auto& x = examples[i].features;
      const double margin = y[i] * w.dot(x, kBiasFeature);
      const double td = static_cast<double>(t);
      w.shrink(1.0 - 1.0 / td);
      if (margin < 1.0) {
        const double eta = 1.0 / (config.lambda * td);
        w.add(x, kBiasFeature, eta * y[i] * (y[i] > 0 ? cost_pos : cost_neg));
        // the optimum lies inside this ball, so projecting only helps
        if (const double n2 = w.norm2(); n2 > radius2) w.shrink(std::sqrt(radius2 / n2));
      }
      if (t > average_from) w.accumulate();
    }
  }

  std::vector<double> avg = w.average();
  BinaryModel model;
  model.bias = avg.back() * kBiasFeature;
  avg.pop_back();
  model.weights = std::move(avg);

  // Never return something worse than the zero model on the objective that
  // was optimized (cost-weighted hinge, bias inside the norm).
  double hinge = 0;
  for (std::size_t i = 0; i < m; ++i) {
    hinge += (y[i] > 0 ? cost_pos : cost_neg) *
             std::max(0.0, 1.0 - y[i] * model.decision(examples[i].features));
  }
  const double norm2 = std::inner_product(model.weights.begin(), model.weights.end(),
                                          model.weights.begin(), model.bias * model.bias);
  const double zero_objective = (cost_pos * static_cast<double>(n_pos) +
                                 cost_neg * static_cast<double>(m - n_pos)) / static_cast<double>(m);
  if (0.5 * config.lambda * norm2 + hinge / static_cast<double>(m) > zero_objective) {
    return BinaryModel{std::vector<double>(dim, 0.0), 0.0};
  }
  return model;
}

double svm_objective(const BinaryModel& model, std::span<const LabeledExample> examples,
                     std::string_view positive_label, double lambda) {
  if (examples.empty()) throw Error("svm_objective: no examples");
  double hinge = 0;
  for (const auto& e : examples) {
    const double y = e.label == positive_label ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * model.decision(e.features));
  }
  const double norm2 =
      std::inner_product(model.weights.begin(), model.weights.end(), model.weights.begin(), 0.0);
  return 0.5 * lambda * norm2 + hinge / static_cast<double>(examples.size());
}

std::vector<double> LinearModel::decision_values(std::span<const double> features) const {
  if (features.size() != dim()) {
    throw DimensionMismatch("feature vector has " + std::to_string(features.size()) +
                            " components, model expects " + std::to_string(dim()));
  }
  std::vector<double> out(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    out[c] = std::inner_product(weights[c].begin(), weights[c].end(), features.begin(), biases[c]);
  }
  return out;
}

LinearModel train_ovr(std::span<const LabeledExample> examples,
                      std::span<const std::string> label_set, const SvmConfig& config) {
  if (label_set.size() < 2) throw Error("one-vs-rest needs at least two labels");
  config.validate();
  check_examples(examples);
  for (const auto& e : examples) {
    if (std::find(label_set.begin(), label_set.end(), e.label) == label_set.end()) {
      throw Error("unknown label '" + e.label + "'");
    }
  }

  LinearModel model;
  model.classes.assign(label_set.begin(), label_set.end());
  model.lambda = config.lambda;
  model.epochs = config.epochs;
  model.seed = config.seed;

  const std::size_t k = label_set.size();
  std::vector<BinaryModel> binary(k);
  auto train_one = [&](std::size_t c) {
    SvmConfig sub = config;
    sub.seed = mix_seed(config.seed + c);
    binary[c] = train_binary_svm(examples, label_set[c], sub);
  };
  if (config.workers <= 1) {
    for (std::size_t c = 0; c < k; ++c) train_one(c);
  } else {
    std::vector<std::future<void>> tasks;
    for (std::size_t c = 0; c < k; ++c) tasks.push_back(std::async(std::launch::async, train_one, c));
    for (auto& t : tasks) t.get();
  }
  for (auto& b : binary) {
    model.weights.push_back(std::move(b.weights));
    model.biases.push_back(b.bias);
  }
  return model;
}

const std::string& predict(const LinearModel& model, std::span<const double> features) {
  const std::vector<double> scores = model.decision_values(features);
  if (scores.empty()) throw Error("predict: model has no classes");
  // max_element keeps the first of equal maxima
  const auto best = std::max_element(scores.begin(), scores.end());
  return model.classes[static_cast<std::size_t>(best - scores.begin())];
}

// ---------------------------------------------------------------------------

void write_model(const LinearModel& model, std::ostream& out) {
  std::string line = "classes: ";
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    if (c) line += ',';
    line += model.classes[c];
  }
  out << line << '\n' << "dim: " << model.dim() << '\n';
  line = "lambda: ";
  text::append_number(line, model.lambda);
  out << line << '\n';
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    line = model.classes[c] + ' ';
    text::append_number(line, model.biases[c]);
    for (const double w : model.weights[c]) {
      line.push_back(' ');
      text::append_number(line, w);
    }
    out << line << '\n';
  }
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_model(model, out);
}

namespace {

std::string_view header_value(const std::string& line, std::string_view key,
                              const std::string& source, std::size_t n) {
  std::string_view s = line;
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  if (s.substr(0, key.size()) != key || s.size() <= key.size() || s[key.size()] != ':') {
    throw ParseError(source, n, "expected '" + std::string(key) + ": ...'");
  }
  s.remove_prefix(key.size() + 1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

LinearModel read_model(std::istream& in, const std::string& source) {
  std::string line;
  LinearModel model;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing 'classes:' header");
  {
    const std::string list(header_value(line, "classes", source, 1));
    std::stringstream ss(list);
    for (std::string c; std::getline(ss, c, ',');) {
      if (c.empty()) throw ParseError(source, 1, "empty class name");
      model.classes.push_back(c);
    }
    if (model.classes.empty()) throw ParseError(source, 1, "no classes");
  }
  if (!std::getline(in, line)) throw ParseError(source, 2, "missing 'dim:' header");
  const auto dim = text::parse_number<std::size_t>(header_value(line, "dim", source, 2));
  if (!dim || *dim == 0) throw ParseError(source, 2, "invalid dimension");
  if (!std::getline(in, line)) throw ParseError(source, 3, "missing 'lambda:' header");
  const auto lambda = text::parse_number<double>(header_value(line, "lambda", source, 3));
  if (!lambda) throw ParseError(source, 3, "invalid lambda");
  model.lambda = *lambda;

  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const std::size_t n = 4 + c;
    if (!std::getline(in, line)) throw ParseError(source, n, "missing weights for a class");
    const auto fields = text::split_fields(line);
    if (fields.empty() || fields[0] != model.classes[c]) {
      throw ParseError(source, n, "expected weights for class '" + model.classes[c] + "'");
    }
    if (fields.size() != *dim + 2) {
      throw DimensionMismatch(source + ":" + std::to_string(n) + ": expected " +
                              std::to_string(*dim) + " weights, found " +
                              std::to_string(fields.size() < 2 ? 0 : fields.size() - 2));
    }
    std::vector<double> values;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto v = text::parse_number<double>(fields[f]);
      if (!v) throw ParseError(source, n, "invalid number '" + std::string(fields[f]) + "'");
      values.push_back(*v);
    }
    model.biases.push_back(values.front());
    model.weights.emplace_back(values.begin() + 1, values.end());
  }
  return model;
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_model(in, path.string());
}

std::vector<double> SparseCounts::dense() const {
  std::vector<double> out(dim, 0.0);
  for (const auto& [i, c] : entries) out[i] = c;
  return out;
}

SparseCounts bag_of_words_baseline(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::map<std::size_t, double> counts;
  for (const auto& t : tokens) {
    if (const auto idx = vocab.find(t)) counts[*idx] += 1.0;
  }
  SparseCounts out;
  out.dim = vocab.size();
  out.entries.assign(counts.begin(), counts.end());
  return out;
}

}  // namespace citesent
