#pragma once

// Predictive log-likelihood of a new row count vector under a trained
// CategoryModel, Monte Carlo averaged over its retained samples.

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nbpm/category_model.hpp"
#include "nbpm/distributions.hpp"
#include "nbpm/error.hpp"
#include "nbpm/priors.hpp"
#include "nbpm/special_functions.hpp"

namespace nbpm {

// Sparse feature -> count map. Zero counts are not stored; insertion order is
// kept.
class RowVector {
 public:
  RowVector() = default;
  RowVector(std::initializer_list<std::pair<std::string, count_t>> init) {
    for (const auto& [f, n] : init) add(f, n);
  }

  // Adds `n` to the count of `feature`.
  void add(const std::string& feature, count_t n) {
    detail::require(n >= 0, "row vector: negative count");
    if (n == 0) return;
    auto it = index_.find(feature);
    if (it == index_.end()) {
      index_.emplace(feature, entries_.size());
      entries_.emplace_back(feature, n);
    } else {
      entries_[it->second].second += n;
    }
    total_ += n;
  }

  const std::vector<std::pair<std::string, count_t>>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  count_t total() const noexcept { return total_; }

  count_t count(const std::string& feature) const {
    auto it = index_.find(feature);
    return it == index_.end() ? 0 : entries_[it->second].second;
  }

  friend bool operator==(const RowVector& a, const RowVector& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<std::pair<std::string, count_t>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  count_t total_ = 0;
};

// A row split by membership in the model vocabulary: counts over the model's
// K columns (zeros included) and the new features in row order.
struct AlignedRow {
  std::vector<count_t> existing;
  std::vector<std::string> new_features;
  std::vector<count_t> fresh;

  std::size_t kplus() const noexcept { return fresh.size(); }
};

class FeatureIndex {
 public:
  explicit FeatureIndex(const std::vector<std::string>& features) {
    map_.reserve(features.size());
    for (std::size_t k = 0; k < features.size(); ++k) map_.emplace(features[k], k);
    size_ = features.size();
  }
  std::optional<std::size_t> find(const std::string& f) const {
    auto it = map_.find(f);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t size() const noexcept { return size_; }

 private:
  std::unordered_map<std::string, std::size_t> map_;
  std::size_t size_ = 0;
};

inline AlignedRow align(const RowVector& row, const FeatureIndex& index) {
  AlignedRow out;
  out.existing.assign(index.size(), 0);
  for (const auto& [f, n] : row.entries()) {
    if (auto k = index.find(f)) {
      out.existing[*k] = n;
    } else {
      out.new_features.push_back(f);
      out.fresh.push_back(n);
    }
  }
  return out;
}

inline AlignedRow align(const RowVector& row, const CategoryModel& model) {
  return align(row, FeatureIndex(model.features));
}

enum class VocabularyMode { infinite, finite };

struct PredictOptions {
  VocabularyMode mode = VocabularyMode::infinite;
  // Finite mode: vocabulary size V, and optionally the vocabulary itself.
  // Without an explicit vocabulary every feature counts as in-vocabulary.
  std::size_t vocabulary_size = 0;
  std::shared_ptr<const std::unordered_set<std::string>> vocabulary;
  // Divide by K+! for the arbitrary labelling of the new columns. Turning it
  // off is a debugging switch.
  bool kplus_correction = true;
  int em_iterations = 20;
};

struct PredictDiagnostics {
  std::vector<double> per_sample;
  std::size_t discarded_features = 0;
  std::size_t kplus = 0;
};

namespace detail {

// GNBP plug-in estimate of the new row's probability parameter.
inline double gnbp_plugin_p(const Hyperparameters& h, count_t row_total, double total_mass) {
  const double n = static_cast<double>(row_total);
  return (h.a0 + n) / (h.a0 + h.b0 + n + total_mass);
}

}  // namespace detail

// Scores rows against one CategoryModel. Construction precomputes the feature
// index and the column-sum histogram; scoring is const and thread-safe.
class Predictor {
 public:
  explicit Predictor(CategoryModel model, PredictOptions options = {})
      : model_(std::move(model)), options_(std::move(options)), index_(model_.features) {
    model_.validate();
    if (options_.mode == VocabularyMode::finite) {
      detail::require(options_.vocabulary_size >= model_.cols(),
                      "finite mode: vocabulary size must be at least the model's column count");
    }
    for (count_t n : model_.column_sums) {
      ++histogram_[n];
      sum_column_sums_ += static_cast<double>(n);
    }
    for (const auto& s : model_.samples) {
      double l = 0.0;
      for (count_t x : s.table_sums) l += static_cast<double>(x);
      sum_table_sums_.push_back(l);
    }
  }

  const CategoryModel& model() const noexcept { return model_; }
  const PredictOptions& options() const noexcept { return options_; }
  const FeatureIndex& index() const noexcept { return index_; }

  // BNBP new-row dispersion: fixed-point iterations of
  //   l_k = r [psi(r + n_k) - psi(r)],  r = (a0 - 1 + l.) / (b0 + p_* - sum_k ln(1 - p_k))
  // from r = 1, over every positive count of the row; l. = 1 for an empty row.
  double bnbp_row_dispersion(const PosteriorSample& s, const AlignedRow& a) const {
    const auto& h = model_.hyper;
    const double denom = h.b0 + s.remainder + s.neg_log1m_weight_sum;
    const bool empty_row = kept_total(a) == 0;
    double r = 1.0;
    for (int it = 0; it < options_.em_iterations; ++it) {
      double l = 0.0;
      auto add = [&](count_t n) {
        if (n > 0) l += r * (digamma(r + static_cast<double>(n)) - digamma(r));
      };
      for (count_t n : a.existing) add(n);
      for (count_t n : a.fresh) add(n);
      if (empty_row) l = 1.0;
      r = (h.a0 - 1.0 + l) / denom;
    }
    return r;
  }

  // Log-likelihood of an aligned row under retained sample i.
  double sample_loglik(std::size_t i, const AlignedRow& a) const {
    const PosteriorSample& s = model_.samples.at(i);
    return options_.mode == VocabularyMode::infinite ? infinite_loglik(i, s, a) : finite_loglik(i, s, a);
  }

  double predict(const RowVector& row, PredictDiagnostics* diag = nullptr) const {
    AlignedRow a = align(row, index_);
    std::size_t discarded = 0;
    if (options_.mode == VocabularyMode::finite && options_.vocabulary) {
      AlignedRow kept;
      kept.existing = std::move(a.existing);
      for (std::size_t i = 0; i < a.fresh.size(); ++i) {
        if (options_.vocabulary->count(a.new_features[i])) {
          kept.new_features.push_back(a.new_features[i]);
          kept.fresh.push_back(a.fresh[i]);
        } else {
          ++discarded;
        }
      }
      a = std::move(kept);
    }
    if (options_.mode == VocabularyMode::finite)
      detail::require(model_.cols() + a.fresh.size() <= options_.vocabulary_size,
                      "finite mode: row and model features exceed the vocabulary size");
    std::vector<double> per(model_.samples.size());
    for (std::size_t i = 0; i < per.size(); ++i) per[i] = sample_loglik(i, a);
    const double out = log_mean_exp(per);
    if (diag) {
      diag->per_sample = std::move(per);
      diag->discarded_features = discarded;
      diag->kplus = a.fresh.size();
    }
    return out;
  }

 private:
  // Total of zero-count BNB terms over all model columns, for the given
  // (r', c + r.) and additive shape offset.
  double bnb_zero_total(double r, double cr, double shape_offset) const {
    const double head = log_gamma(cr + r) - log_gamma(cr);
    double acc = 0.0;
    for (const auto& [n, mult] : histogram_) {
      const double e = static_cast<double>(n) + shape_offset;
      acc += static_cast<double>(mult) * (head + log_gamma(e + cr) - log_gamma(e + cr + r));
    }
    return acc;
  }

  static double bnb_zero(double r, double e, double cr) {
    return log_gamma(cr + r) + log_gamma(e + cr) - log_gamma(e + cr + r) - log_gamma(cr);
  }

  // Row total after any finite-mode discards.
  static count_t kept_total(const AlignedRow& a) {
    count_t t = 0;
    for (count_t n : a.existing) t += n;
    for (count_t n : a.fresh) t += n;
    return t;
  }

  double infinite_loglik(std::size_t i, const PosteriorSample& s, const AlignedRow& a) const {
    const std::size_t kplus = a.fresh.size();
    double acc = options_.kplus_correction ? -log_factorial(static_cast<count_t>(kplus)) : 0.0;
    const double J = static_cast<double>(model_.rows);
    switch (model_.kind) {
      case Process::nbp: {
        const double log_p = -std::log1p(J + s.c);
        const double log1mp = -std::log1p(1.0 / (J + s.c));
        acc += detail::poisson_log_pmf(static_cast<count_t>(kplus), s.gamma0 * std::log1p(1.0 / (J + s.c)));
        acc += sum_column_sums_ * log1mp;  // every existing column at zero
        for (std::size_t k = 0; k < a.existing.size(); ++k) {
          if (a.existing[k] == 0) continue;
          const double r = static_cast<double>(model_.column_sums[k]);
          acc += detail::nb_log_pmf(a.existing[k], r, log_p, log1mp) - r * log1mp;
        }
        for (count_t n : a.fresh) acc += detail::logarithmic_log_pmf(n, log_p, log1mp);
        return acc;
      }
      case Process::gnbp: {
        const double p = detail::gnbp_plugin_p(model_.hyper, kept_total(a), s.total_mass);
        const double qn = -std::log1p(-p);
        const double cq = s.c + s.row_mass;
        const double zero_per_table = -std::log1p(qn / cq);
        acc += detail::poisson_log_pmf(static_cast<count_t>(kplus), s.gamma0 * std::log1p(qn / cq));
        acc += sum_table_sums_[i] * zero_per_table;
        for (std::size_t k = 0; k < a.existing.size(); ++k) {
          if (a.existing[k] == 0) continue;
          const double e = static_cast<double>(s.table_sums[k]);
          acc += log_pmf(GammaNegativeBinomial{e, cq, p}, a.existing[k]) - e * zero_per_table;
        }
        for (count_t n : a.fresh) acc += log_pmf(LogLog{cq, p}, n);
        return acc;
      }
      case Process::bnbp: {
        const double r = bnbp_row_dispersion(s, a);
        const double cr = s.c + s.row_mass;
        acc += detail::poisson_log_pmf(static_cast<count_t>(kplus), s.gamma0 * (digamma(cr + r) - digamma(cr)));
        acc += bnb_zero_total(r, cr, 0.0);
        for (std::size_t k = 0; k < a.existing.size(); ++k) {
          if (a.existing[k] == 0) continue;
          const double e = static_cast<double>(model_.column_sums[k]);
          acc += log_pmf(BetaNegativeBinomial{r, e, cr}, a.existing[k]) - bnb_zero(r, e, cr);
        }
        for (count_t n : a.fresh) acc += log_pmf(DigammaDist{r, cr}, n);
        return acc;
      }
    }
    return kNegInf;
  }

  // Product over all V vocabulary terms with gamma0 / V added to each
  // term's shape; terms outside the model and the row contribute zero counts.
  double finite_loglik(std::size_t i, const PosteriorSample& s, const AlignedRow& a) const {
    const double V = static_cast<double>(options_.vocabulary_size);
    const double eps = s.gamma0 / V;
    const double unseen_zero = V - static_cast<double>(model_.cols()) - static_cast<double>(a.fresh.size());
    const double J = static_cast<double>(model_.rows);
    double acc = 0.0;
    switch (model_.kind) {
      case Process::nbp: {
        const double log_p = -std::log1p(J + s.c);
        const double log1mp = -std::log1p(1.0 / (J + s.c));
        acc += (sum_column_sums_ + eps * static_cast<double>(model_.cols())) * log1mp;
        for (std::size_t k = 0; k < a.existing.size(); ++k) {
          if (a.existing[k] == 0) continue;
          const double r = static_cast<double>(model_.column_sums[k]) + eps;
          acc += detail::nb_log_pmf(a.existing[k], r, log_p, log1mp) - r * log1mp;
        }
        for (count_t n : a.fresh) acc += detail::nb_log_pmf(n, eps, log_p, log1mp);
        acc += unseen_zero * eps * log1mp;
        return acc;
      }
      case Process::gnbp: {
        const double p = detail::gnbp_plugin_p(model_.hyper, kept_total(a), s.total_mass);
        const double qn = -std::log1p(-p);
        const double cq = s.c + s.row_mass;
        const double zero_per_shape = -std::log1p(qn / cq);
        acc += (sum_table_sums_[i] + eps * static_cast<double>(model_.cols())) * zero_per_shape;
        for (std::size_t k = 0; k < a.existing.size(); ++k) {
          if (a.existing[k] == 0) continue;
          const double e = static_cast<double>(s.table_sums[k]) + eps;
          acc += log_pmf(GammaNegativeBinomial{e, cq, p}, a.existing[k]) - e * zero_per_shape;
        }
        for (count_t n : a.fresh) acc += log_pmf(GammaNegativeBinomial{eps, cq, p}, n);
        acc += unseen_zero * eps * zero_per_shape;
        return acc;
      }
      case Process::bnbp: {
        const double r = bnbp_row_dispersion(s, a);
        const double cr = s.c + s.row_mass;
        acc += bnb_zero_total(r, cr, eps);
        for (std::size_t k = 0; k < a.existing.size(); ++k) {
          if (a.existing[k] == 0) continue;
          const double e = static_cast<double>(model_.column_sums[k]) + eps;
          acc += log_pmf(BetaNegativeBinomial{r, e, cr}, a.existing[k]) - bnb_zero(r, e, cr);
        }
        for (count_t n : a.fresh) acc += log_pmf(BetaNegativeBinomial{r, eps, cr}, n);
        acc += unseen_zero * bnb_zero(r, eps, cr);
        return acc;
      }
    }
    return kNegInf;
  }

  CategoryModel model_;
  PredictOptions options_;
  FeatureIndex index_;
  std::map<count_t, std::size_t> histogram_;
  double sum_column_sums_ = 0.0;
  std::vector<double> sum_table_sums_;
};

inline double predict_row_loglik(const CategoryModel& model, const RowVector& row, const PredictOptions& options = {},
                                 PredictDiagnostics* diag = nullptr) {
  return Predictor(model, options).predict(row, diag);
}

}  // namespace nbpm
