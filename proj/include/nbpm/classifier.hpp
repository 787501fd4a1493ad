#pragma once

// Naive-Bayes categorization against per-category models, the multinomial
// baseline with Laplace smoothing, and the evaluation harness.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "nbpm/category_model.hpp"
#include "nbpm/corpus.hpp"
#include "nbpm/error.hpp"
#include "nbpm/inference.hpp"
#include "nbpm/parallel.hpp"
#include "nbpm/predictive.hpp"
#include "nbpm/special_functions.hpp"

namespace nbpm {

struct Classification {
  std::size_t index = 0;
  std::vector<double> scores;      // per-category predictive log-likelihoods
  std::vector<double> posteriors;  // uniform category prior
};

// Softmax of per-category log-scores; ties go to the earliest category.
inline Classification classify_scores(std::vector<double> scores) {
  detail::require(!scores.empty(), "classify: no categories");
  const double lse = log_sum_exp(scores);
  if (!(lse > kNegInf)) throw DomainError("classify: row is unscorable (every category gives log-likelihood -inf)");
  Classification out;
  out.posteriors.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out.posteriors[i] = std::exp(scores[i] - lse);
  out.index = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
  out.scores = std::move(scores);
  return out;
}

// ---------------------------------------------------------------------------

struct ClassifierBundle {
  static constexpr int kFormatVersion = 1;

  std::vector<std::string> labels;
  std::vector<CategoryModel> models;
  VocabularyMode mode = VocabularyMode::infinite;
  std::size_t vocabulary_size = 0;  // finite mode
  std::optional<std::vector<std::string>> vocabulary;

  Process kind() const { return models.at(0).kind; }
  std::size_t size() const noexcept { return labels.size(); }

  std::size_t samples_per_category() const {
    std::size_t s = models.at(0).samples.size();
    for (const auto& m : models) s = std::min(s, m.samples.size());
    return s;
  }

  void validate() const {
    detail::require(labels.size() >= 2, "bundle: needs at least two categories");
    detail::require(labels.size() == models.size(), "bundle: one model per category");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) detail::require(seen.insert(l).second, "bundle: duplicate category label '" + l + "'");
    for (const auto& m : models) {
      m.validate();
      detail::require(m.kind == models.front().kind, "bundle: categories use different processes");
    }
    if (mode == VocabularyMode::finite) {
      detail::require(vocabulary_size > 0, "bundle: finite mode needs a vocabulary size");
      if (vocabulary) detail::require(vocabulary->size() == vocabulary_size, "bundle: vocabulary size mismatch");
    }
  }

  PredictOptions predict_options() const {
    PredictOptions o;
    o.mode = mode;
    o.vocabulary_size = vocabulary_size;
    if (vocabulary)
      o.vocabulary = std::make_shared<const std::unordered_set<std::string>>(vocabulary->begin(), vocabulary->end());
    return o;
  }

  // Copy keeping samples [first, first + count) of every category.
  ClassifierBundle with_samples(std::size_t first, std::size_t count) const {
    detail::require(count > 0 && first + count <= samples_per_category(), "bundle: sample range out of bounds");
    ClassifierBundle out = *this;
    for (auto& m : out.models)
      m.samples = std::vector<PosteriorSample>(m.samples.begin() + static_cast<std::ptrdiff_t>(first),
                                               m.samples.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
  }

  friend bool operator==(const ClassifierBundle&, const ClassifierBundle&) = default;
};

inline std::string to_string(VocabularyMode m) { return m == VocabularyMode::infinite ? "infinite" : "finite"; }

inline VocabularyMode parse_mode(const std::string& s) {
  if (s == "infinite") return VocabularyMode::infinite;
  if (s == "finite") return VocabularyMode::finite;
  throw DomainError("unknown mode '" + s + "' (expected infinite or finite)");
}

inline nlohmann::json bundle_to_json(const ClassifierBundle& b) {
  nlohmann::json cats = nlohmann::json::array();
  for (std::size_t i = 0; i < b.size(); ++i) cats.push_back({{"label", b.labels[i]}, {"model", model_to_json(b.models[i])}});
  nlohmann::json j = {{"format", "nbpm-bundle"},
                      {"version", ClassifierBundle::kFormatVersion},
                      {"mode", to_string(b.mode)},
                      {"vocabulary_size", b.vocabulary_size},
                      {"categories", cats}};
  j["vocabulary"] = b.vocabulary ? nlohmann::json(*b.vocabulary) : nlohmann::json(nullptr);
  return j;
}

inline ClassifierBundle bundle_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "nbpm-bundle") throw DomainError("not a classifier bundle document");
  const int version = j.at("version").get<int>();
  if (version != ClassifierBundle::kFormatVersion)
    throw DomainError("unsupported bundle version " + std::to_string(version));
  ClassifierBundle b;
  b.mode = parse_mode(j.at("mode").get<std::string>());
  j.at("vocabulary_size").get_to(b.vocabulary_size);
  if (!j.at("vocabulary").is_null()) b.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  for (const auto& c : j.at("categories")) {
    b.labels.push_back(c.at("label").get<std::string>());
    b.models.push_back(model_from_json(c.at("model")));
  }
  b.validate();
  return b;
}

inline void save_bundle(const ClassifierBundle& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bundle_to_json(b).dump() << '\n';
}

inline ClassifierBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return bundle_from_json(nlohmann::json::parse(in));
}

// ---------------------------------------------------------------------------

struct TrainOptions {
  Process kind = Process::gnbp;
  VocabularyMode mode = VocabularyMode::infinite;
  ChainConfig chain;
  std::size_t jobs = 1;  // categories trained in parallel
};

namespace detail {

inline std::uint64_t category_seed(std::uint64_t seed, std::size_t category) {
  return splitmix64(seed ^ splitmix64(0xC47E6012ull + category));
}

// Union of features in order of first appearance.
inline std::vector<std::string> corpus_features(const Corpus& corpus) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& d : corpus.documents)
    for (const auto& [f, n] : d.counts.entries())
      if (seen.insert(f).second) out.push_back(f);
  return out;
}

}  // namespace detail

// One sampler run per category, categories in order of first appearance.
// Category i uses a seed derived from (chain.seed, i); chains within a
// category run sequentially.
inline ClassifierBundle train_bundle(const Corpus& train, const TrainOptions& opt) {
  train.validate();
  ClassifierBundle b;
  b.labels = train.labels();
  b.mode = opt.mode;
  if (opt.mode == VocabularyMode::finite) {
    b.vocabulary = train.vocabulary ? *train.vocabulary : detail::corpus_features(train);
    b.vocabulary_size = b.vocabulary->size();
  }
  b.models.resize(b.labels.size());
  parallel_for(b.labels.size(), opt.jobs, [&](std::size_t i) {
    ChainConfig cfg = opt.chain;
    cfg.seed = detail::category_seed(opt.chain.seed, i);
    cfg.jobs = 1;
    cfg.trace = false;
    const CountMatrix m = build_matrix(train, b.labels[i]);
    b.models[i] = run_chain(opt.kind, m, cfg).model;
  });
  b.validate();
  return b;
}

class Classifier {
 public:
  explicit Classifier(ClassifierBundle bundle, bool kplus_correction = true) : bundle_(std::move(bundle)) {
    bundle_.validate();
    PredictOptions o = bundle_.predict_options();
    o.kplus_correction = kplus_correction;
    for (const auto& m : bundle_.models) predictors_.emplace_back(m, o);
  }

  const ClassifierBundle& bundle() const noexcept { return bundle_; }

  std::vector<double> scores(const RowVector& row) const {
    std::vector<double> s(predictors_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = predictors_[i].predict(row);
    return s;
  }

  Classification classify(const RowVector& row) const { return classify_scores(scores(row)); }

  const std::string& label(const Classification& c) const { return bundle_.labels.at(c.index); }

 private:
  ClassifierBundle bundle_;
  std::vector<Predictor> predictors_;
};

// ---------------------------------------------------------------------------

// sum_v n_v ln[(n_.v + 1) / sum_v (n_.v + 1)] over the vocabulary of
// `column_sums`; features outside `vocab` are dropped.
inline double multinomial_laplace_loglik(std::span<const count_t> column_sums, const FeatureIndex& vocab,
                                         const RowVector& row) {
  double denom = 0.0;
  for (count_t n : column_sums) denom += static_cast<double>(n) + 1.0;
  const double log_denom = std::log(denom);
  double out = 0.0;
  for (const auto& [f, n] : row.entries()) {
    const auto v = vocab.find(f);
    if (!v) continue;
    out += static_cast<double>(n) * (std::log(static_cast<double>(column_sums[*v]) + 1.0) - log_denom);
  }
  return out;
}

class MultinomialBaseline {
 public:
  // Vocabulary: the corpus's declared vocabulary, or else every training
  // feature.
  explicit MultinomialBaseline(const Corpus& train)
      : labels_(train.labels()),
        vocabulary_(train.vocabulary ? *train.vocabulary : detail::corpus_features(train)),
        index_(vocabulary_) {
    detail::require(labels_.size() >= 2, "baseline: needs at least two categories");
    sums_.assign(labels_.size(), std::vector<count_t>(vocabulary_.size(), 0));
    std::unordered_map<std::string, std::size_t> cat;
    for (std::size_t i = 0; i < labels_.size(); ++i) cat.emplace(labels_[i], i);
    for (const auto& d : train.documents)
      for (const auto& [f, n] : d.counts.entries())
        if (const auto v = index_.find(f)) sums_[cat.at(d.label)][*v] += n;
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }
  const std::vector<count_t>& column_sums(std::size_t category) const { return sums_.at(category); }

  std::vector<double> scores(const RowVector& row) const {
    std::vector<double> s(sums_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = multinomial_laplace_loglik(sums_[i], index_, row);
    return s;
  }

  Classification classify(const RowVector& row) const { return classify_scores(scores(row)); }

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> vocabulary_;
  FeatureIndex index_;
  std::vector<std::vector<count_t>> sums_;
};

// ---------------------------------------------------------------------------

struct EvaluationReport {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<std::size_t> predictions;              // per test document

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : confusion) t += std::accumulate(row.begin(), row.end(), std::size_t{0});
    return t;
  }
  std::size_t correct() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < confusion.size(); ++i) c += confusion[i][i];
    return c;
  }
  double accuracy() const { return static_cast<double>(correct()) / static_cast<double>(total()); }
  std::size_t category_total(std::size_t i) const {
    return std::accumulate(confusion[i].begin(), confusion[i].end(), std::size_t{0});
  }
  // Recall of category i; NaN when it has no test documents.
  double category_accuracy(std::size_t i) const {
    const std::size_t n = category_total(i);
    return n == 0 ? std::nan("") : static_cast<double>(confusion[i][i]) / static_cast<double>(n);
  }

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

using RowScorer = std::function<std::size_t(const RowVector&)>;

// Classifies every test document with `scorer` (documents in parallel over
// `jobs` threads). Labels must name categories in `labels`.
inline EvaluationReport evaluate(const std::vector<std::string>& labels, const std::vector<Document>& test,
                                 const RowScorer& scorer, std::size_t jobs = 1) {
  detail::require(!test.empty(), "evaluate: empty test set");
  std::unordered_map<std::string, std::size_t> cat;
  for (std::size_t i = 0; i < labels.size(); ++i) cat.emplace(labels[i], i);
  std::vector<std::size_t> truth(test.size());
  for (std::size_t d = 0; d < test.size(); ++d) {
    const auto it = cat.find(test[d].label);
    detail::require(it != cat.end(), "evaluate: document '" + test[d].id + "' has unknown label '" + test[d].label + "'");
    truth[d] = it->second;
  }
  EvaluationReport r;
  r.labels = labels;
  r.predictions.assign(test.size(), 0);
  parallel_for(test.size(), jobs, [&](std::size_t d) { r.predictions[d] = scorer(test[d].counts); });
  r.confusion.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  for (std::size_t d = 0; d < test.size(); ++d) ++r.confusion[truth[d]][r.predictions[d]];
  return r;
}

inline EvaluationReport evaluate(const Classifier& clf, const std::vector<Document>& test, std::size_t jobs = 1) {
  return evaluate(clf.bundle().labels, test, [&](const RowVector& row) { return clf.classify(row).index; }, jobs);
}

// The baseline's labels are reordered to match `labels`.
inline EvaluationReport evaluate(const MultinomialBaseline& base, const std::vector<std::string>& labels,
                                 const std::vector<Document>& test, std::size_t jobs = 1) {
  std::vector<std::size_t> to_report(base.labels().size());
  for (std::size_t i = 0; i < base.labels().size(); ++i) {
    const auto it = std::find(labels.begin(), labels.end(), base.labels()[i]);
    detail::require(it != labels.end(), "evaluate: baseline category missing from the bundle");
    to_report[i] = static_cast<std::size_t>(it - labels.begin());
  }
  return evaluate(labels, test, [&](const RowVector& row) { return to_report[base.classify(row).index]; }, jobs);
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
  detail::require(!xs.empty(), "mean_sd: no values");
  MeanSd out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

// category,documents,correct,accuracy rows followed by an overall row.
inline void write_report_csv(std::ostream& out, const EvaluationReport& r) {
  out << std::setprecision(10);
  out << "category,documents,correct,accuracy\n";
  for (std::size_t i = 0; i < r.labels.size(); ++i)
    out << r.labels[i] << ',' << r.category_total(i) << ',' << r.confusion[i][i] << ',' << r.category_accuracy(i)
        << '\n';
  out << "overall," << r.total() << ',' << r.correct() << ',' << r.accuracy() << '\n';
}

// Rows are true categories, columns predicted categories.
inline void write_confusion_csv(std::ostream& out, const EvaluationReport& r) {
  out << "true\\predicted";
  for (const auto& l : r.labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    out << r.labels[i];
    for (std::size_t n : r.confusion[i]) out << ',' << n;
    out << '\n';
  }
}

inline std::string format_report(const EvaluationReport& r, const std::string& title) {
  std::ostringstream out;
  std::size_t width = 8;
  for (const auto& l : r.labels) width = std::max(width, l.size());
  out << title << ": accuracy " << std::fixed << std::setprecision(2) << 100.0 * r.accuracy() << "% (" << r.correct()
      << '/' << r.total() << ")\n";
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << r.labels[i] << std::right << std::setw(8);
    if (r.category_total(i) == 0)
      out << "n/a";
    else
      out << 100.0 * r.category_accuracy(i) << '%';
    out << "  (" << r.confusion[i][i] << '/' << r.category_total(i) << ")\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------

struct SVariabilityRun {
  std::size_t samples = 0;  // S
  std::size_t group = 0;
  double accuracy = 0.0;
  std::vector<std::size_t> predictions;
};

// Splits the retained samples of every category into consecutive groups of
// S and classifies the test set with each group on its own, for every S in
// `sizes` that fits.
inline std::vector<SVariabilityRun> s_variability(const ClassifierBundle& bundle, const std::vector<Document>& test,
                                                  const std::vector<std::size_t>& sizes, std::size_t jobs = 1) {
  std::vector<SVariabilityRun> out;
  const std::size_t available = bundle.samples_per_category();
  for (std::size_t S : sizes) {
    detail::require(S > 0, "s-variability: group size must be positive");
    for (std::size_t g = 0; (g + 1) * S <= available; ++g) {
      const Classifier clf(bundle.with_samples(g * S, S));
      const EvaluationReport r = evaluate(clf, test, jobs);
      out.push_back({S, g, r.accuracy(), r.predictions});
    }
  }
  return out;
}

}  // namespace nbpm
