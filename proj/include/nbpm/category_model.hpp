#pragma once

// Trained model of one category: the feature vocabulary and column sums of its
// training matrix plus S retained posterior samples, each reduced to the
// quantities the predictive formulas read. Persisted as versioned JSON.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nbpm/error.hpp"
#include "nbpm/priors.hpp"

namespace nbpm {

struct PosteriorSample {
  double gamma0 = 1.0;
  double c = 1.0;
  std::vector<double> row;          // p_j (GNBP) or r_j (BNBP)
  double row_mass = 0.0;            // q. (GNBP) or r. (BNBP)
  double total_mass = 0.0;          // G(Omega) (NBP, GNBP)
  double remainder = 0.0;           // G(Omega \ D_J) (NBP, GNBP) or p_* (BNBP)
  double neg_log1m_weight_sum = 0.0;  // -sum_k ln(1 - p_k) (BNBP)
  std::vector<count_t> table_sums;  // l_.k (GNBP)

  friend bool operator==(const PosteriorSample&, const PosteriorSample&) = default;
};

struct CategoryModel {
  static constexpr int kFormatVersion = 1;

  Process kind = Process::nbp;
  Hyperparameters hyper;
  std::size_t rows = 0;  // J
  std::vector<std::string> features;
  std::vector<count_t> column_sums;  // n_.k
  std::vector<PosteriorSample> samples;

  std::size_t cols() const noexcept { return column_sums.size(); }

  void validate() const {
    detail::require(features.size() == column_sums.size(), "category model: features and column sums differ in length");
    detail::require(!samples.empty(), "category model: needs at least one posterior sample");
    for (const auto& s : samples) {
      detail::require(s.gamma0 > 0.0 && s.c > 0.0, "category model: sample with non-positive gamma0 or c");
      if (kind == Process::gnbp)
        detail::require(s.table_sums.size() == column_sums.size(), "category model: GNBP sample needs l_.k per column");
    }
  }

  friend bool operator==(const CategoryModel&, const CategoryModel&) = default;
};

inline void to_json(nlohmann::json& j, const Hyperparameters& h) {
  j = {{"a0", h.a0}, {"b0", h.b0}, {"c0", h.c0}, {"d0", h.d0}, {"e0", h.e0}, {"f0", h.f0}};
}

inline void from_json(const nlohmann::json& j, Hyperparameters& h) {
  j.at("a0").get_to(h.a0);
  j.at("b0").get_to(h.b0);
  j.at("c0").get_to(h.c0);
  j.at("d0").get_to(h.d0);
  j.at("e0").get_to(h.e0);
  j.at("f0").get_to(h.f0);
}

inline void to_json(nlohmann::json& j, const PosteriorSample& s) {
  j = {{"gamma0", s.gamma0},
       {"c", s.c},
       {"row", s.row},
       {"row_mass", s.row_mass},
       {"total_mass", s.total_mass},
       {"remainder", s.remainder},
       {"neg_log1m_weight_sum", s.neg_log1m_weight_sum},
       {"table_sums", s.table_sums}};
}

inline void from_json(const nlohmann::json& j, PosteriorSample& s) {
  j.at("gamma0").get_to(s.gamma0);
  j.at("c").get_to(s.c);
  j.at("row").get_to(s.row);
  j.at("row_mass").get_to(s.row_mass);
  j.at("total_mass").get_to(s.total_mass);
  j.at("remainder").get_to(s.remainder);
  j.at("neg_log1m_weight_sum").get_to(s.neg_log1m_weight_sum);
  j.at("table_sums").get_to(s.table_sums);
}

inline nlohmann::json model_to_json(const CategoryModel& m) {
  return {{"format", "nbpm-category-model"},
          {"version", CategoryModel::kFormatVersion},
          {"process", to_string(m.kind)},
          {"hyperparameters", m.hyper},
          {"rows", m.rows},
          {"features", m.features},
          {"column_sums", m.column_sums},
          {"samples", m.samples}};
}

inline CategoryModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "nbpm-category-model")
    throw DomainError("not a category model document");
  const int version = j.at("version").get<int>();
  if (version != CategoryModel::kFormatVersion)
    throw DomainError("unsupported category model version " + std::to_string(version));
  CategoryModel m;
  m.kind = parse_process(j.at("process").get<std::string>());
  j.at("hyperparameters").get_to(m.hyper);
  j.at("rows").get_to(m.rows);
  j.at("features").get_to(m.features);
  j.at("column_sums").get_to(m.column_sums);
  j.at("samples").get_to(m.samples);
  m.validate();
  return m;
}

// Doubles are written with round-trip precision, so a save/load cycle
// reproduces the model exactly.
inline void save_model(const CategoryModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << model_to_json(m).dump() << '\n';
}

inline CategoryModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return model_from_json(nlohmann::json::parse(in));
}

}  // namespace nbpm
