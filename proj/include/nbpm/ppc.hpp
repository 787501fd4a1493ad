#pragma once

// Posterior predictive check: regenerate a count matrix from a trained
// category model and summarize it next to the training data.

#include <algorithm>
#include <map>
#include <ostream>

#include "nbpm/category_model.hpp"
#include "nbpm/count_matrix.hpp"
#include "nbpm/error.hpp"
#include "nbpm/priors.hpp"
#include "nbpm/rng.hpp"

namespace nbpm {

// Elementwise mean of the retained samples' (gamma0, c, row parameters).
inline ModelParams posterior_mean_params(const CategoryModel& model) {
  model.validate();
  const double S = static_cast<double>(model.samples.size());
  double g = 0.0, c = 0.0;
  std::vector<double> row(model.kind == Process::nbp ? 0 : model.rows, 0.0);
  for (const auto& s : model.samples) {
    g += s.gamma0;
    c += s.c;
    detail::require(s.row.size() == row.size(), "ppc: sample row parameters do not match the model's rows");
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += s.row[j];
  }
  for (double& x : row) x /= S;
  ModelParams p;
  switch (model.kind) {
    case Process::nbp: p = ModelParams::nbp(g / S, c / S); break;
    case Process::gnbp: p = ModelParams::gnbp(g / S, c / S, std::move(row)); break;
    case Process::bnbp: p = ModelParams::bnbp(g / S, c / S, std::move(row)); break;
  }
  p.hyper = model.hyper;
  return p;
}

inline ModelParams sample_params(const CategoryModel& model, std::size_t i) {
  const PosteriorSample& s = model.samples.at(i);
  ModelParams p;
  switch (model.kind) {
    case Process::nbp: p = ModelParams::nbp(s.gamma0, s.c); break;
    case Process::gnbp: p = ModelParams::gnbp(s.gamma0, s.c, s.row); break;
    case Process::bnbp: p = ModelParams::bnbp(s.gamma0, s.c, s.row); break;
  }
  p.hyper = model.hyper;
  return p;
}

struct PpcOptions {
  // Simulate from one retained sample drawn uniformly instead of the
  // posterior means.
  bool per_draw = false;
};

struct MatrixSummary {
  std::size_t columns = 0;
  count_t total = 0;
  count_t max_count = 0;
  std::map<count_t, std::size_t> column_sum_histogram;
};

inline MatrixSummary summarize_matrix(const CountMatrix& m) {
  MatrixSummary s;
  s.columns = m.cols();
  s.total = m.total();
  s.max_count = m.max_count();
  for (count_t n : m.column_sums()) ++s.column_sum_histogram[n];
  return s;
}

struct PpcReport {
  ModelParams params;
  CountMatrix simulated;
  MatrixSummary simulated_summary;
  // From the model's stored column sums; the training maximum is not kept.
  std::size_t observed_columns = 0;
  count_t observed_total = 0;
  std::map<count_t, std::size_t> observed_column_sum_histogram;
};

inline PpcReport ppc_report(const CategoryModel& model, Rng& rng, const PpcOptions& opt = {}) {
  model.validate();
  detail::require(model.cols() > 0, "ppc: model was trained on a matrix with no columns");
  detail::require(model.rows > 0, "ppc: model was trained on a matrix with no rows");
  PpcReport r;
  if (opt.per_draw) {
    std::uniform_int_distribution<std::size_t> pick(0, model.samples.size() - 1);
    r.params = sample_params(model, pick(rng));
  } else {
    r.params = posterior_mean_params(model);
  }
  r.simulated = simulate_sequential(r.params, model.rows, rng, Ordering::append_right).counts;
  r.simulated_summary = summarize_matrix(r.simulated);
  r.observed_columns = model.cols();
  for (count_t n : model.column_sums) {
    r.observed_total += n;
    ++r.observed_column_sum_histogram[n];
  }
  return r;
}

inline count_t heatmap_value(count_t n) { return std::min<count_t>(n, 3); }

// Dense J x K grid with counts above 3 shown as 3.
inline void write_heatmap_csv(std::ostream& out, const CountMatrix& m) {
  const auto dense = m.dense();
  for (const auto& row : dense) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << heatmap_value(row[k]);
    out << '\n';
  }
}

inline void write_histogram_csv(std::ostream& out, const PpcReport& r) {
  std::map<count_t, std::pair<std::size_t, std::size_t>> merged;
  for (const auto& [n, c] : r.observed_column_sum_histogram) merged[n].first = c;
  for (const auto& [n, c] : r.simulated_summary.column_sum_histogram) merged[n].second = c;
  out << "column_sum,observed_columns,simulated_columns\n";
  for (const auto& [n, c] : merged) out << n << ',' << c.first << ',' << c.second << '\n';
}

inline void write_ppc_summary_csv(std::ostream& out, const PpcReport& r) {
  out << "statistic,observed,simulated\n";
  out << "columns," << r.observed_columns << ',' << r.simulated_summary.columns << '\n';
  out << "total," << r.observed_total << ',' << r.simulated_summary.total << '\n';
  out << "max_count,," << r.simulated_summary.max_count << '\n';
}

}  // namespace nbpm
