#pragma once

// The three random count matrix priors:
//   NBPM(gamma0, c)                 gamma process, Poisson sampling
//   GNBPM(gamma0, c, p_1..p_J)      gamma process, negative binomial sampling
//   BNBPM(gamma0, c, r_1..r_J)      beta process, negative binomial sampling
// with their unordered-matrix log-PMFs, the column-i.i.d. and row-by-row
// generators, and the row-increment prediction rules.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbpm/count_matrix.hpp"
#include "nbpm/distributions.hpp"
#include "nbpm/error.hpp"
#include "nbpm/rng.hpp"
#include "nbpm/special_functions.hpp"
#include "nbpm/stirling.hpp"

namespace nbpm {

enum class Process { nbp, gnbp, bnbp };

inline std::string to_string(Process p) {
  switch (p) {
    case Process::nbp: return "nbp";
    case Process::gnbp: return "gnbp";
    case Process::bnbp: return "bnbp";
  }
  return "?";
}

inline Process parse_process(const std::string& s) {
  if (s == "nbp") return Process::nbp;
  if (s == "gnbp") return Process::gnbp;
  if (s == "bnbp") return Process::bnbp;
  throw DomainError("unknown process '" + s + "' (expected nbp, gnbp or bnbp)");
}

// Gamma / Beta hyperpriors. gamma0 ~ Gamma(e0, 1/f0), c ~ Gamma(c0, 1/d0),
// p_j ~ Beta(a0, b0) for the GNBP, r_j ~ Gamma(a0, 1/b0) for the BNBP.
struct Hyperparameters {
  double a0 = 0.001;
  double b0 = 0.001;
  double c0 = 0.001;
  double d0 = 0.001;
  double e0 = 0.001;
  double f0 = 0.001;

  static Hyperparameters defaults(Process kind) {
    Hyperparameters h;
    if (kind == Process::bnbp) h.c0 = h.d0 = 1.0;
    return h;
  }

  void validate() const {
    for (double x : {a0, b0, c0, d0, e0, f0})
      detail::require(x > 0.0 && std::isfinite(x), "hyperparameters must be positive");
  }

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

struct ModelParams {
  Process kind = Process::nbp;
  double gamma0 = 1.0;
  double c = 1.0;
  // p_j (GNBP) or r_j (BNBP); empty for the NBP.
  std::vector<double> row;
  Hyperparameters hyper;

  static ModelParams nbp(double gamma0, double c) { return {Process::nbp, gamma0, c, {}, Hyperparameters::defaults(Process::nbp)}; }
  static ModelParams gnbp(double gamma0, double c, std::vector<double> p) {
    return {Process::gnbp, gamma0, c, std::move(p), Hyperparameters::defaults(Process::gnbp)};
  }
  static ModelParams bnbp(double gamma0, double c, std::vector<double> r) {
    return {Process::bnbp, gamma0, c, std::move(r), Hyperparameters::defaults(Process::bnbp)};
  }

  // q_j = -ln(1 - p_j) for the GNBP.
  double q(std::size_t j) const { return -std::log1p(-row.at(j)); }

  // q_. (GNBP) or r_. (BNBP) over the first `j` rows.
  double row_mass(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < j; ++i) s += kind == Process::gnbp ? q(i) : row.at(i);
    return s;
  }

  ModelParams prefix(std::size_t j) const {
    ModelParams out = *this;
    if (kind != Process::nbp) {
      detail::require(j <= row.size(), "prefix: more rows than row parameters");
      out.row.resize(j);
    }
    return out;
  }

  // Checks domains; with `rows` given, the row-parameter vector must have
  // at least that many entries.
  void validate(std::optional<std::size_t> rows = std::nullopt) const {
    detail::require(gamma0 > 0.0 && std::isfinite(gamma0), "gamma0 must be positive");
    detail::require(c > 0.0 && std::isfinite(c), "c must be positive");
    if (kind == Process::gnbp) {
      for (double p : row) detail::require(p > 0.0 && p < 1.0, "GNBP: p_j must lie in (0,1)");
    } else if (kind == Process::bnbp) {
      for (double r : row) detail::require(r > 0.0 && std::isfinite(r), "BNBP: r_j must be positive");
    }
    if (rows && kind != Process::nbp)
      detail::require(row.size() >= *rows, "row parameter vector shorter than the number of rows");
  }
};

// ---------------------------------------------------------------------------
// Matrix log-PMFs

namespace detail {

inline double nb_log_pmf(count_t n, double r, double log_p, double log1mp) {
  const double base = r * log1mp;
  if (n == 0) return base;
  const double nd = static_cast<double>(n);
  return log_gamma(nd + r) - log_gamma(r) - log_factorial(n) + nd * log_p + base;
}

inline double logarithmic_log_pmf(count_t n, double log_p, double log1mp) {
  if (n < 1) return kNegInf;
  const double nd = static_cast<double>(n);
  return nd * log_p - std::log(nd) - std::log(-log1mp);
}

inline double poisson_log_pmf(count_t k, double lambda) {
  if (k == 0) return -lambda;
  return static_cast<double>(k) * std::log(lambda) - lambda - log_factorial(k);
}

// ln(K_J! K+! / K_{J+1}!): the reciprocal count of order-preserving insertions.
inline double log_insertion_factor(std::size_t k_old, std::size_t k_new) {
  return log_factorial(static_cast<count_t>(k_old)) + log_factorial(static_cast<count_t>(k_new)) -
         log_factorial(static_cast<count_t>(k_old + k_new));
}

}  // namespace detail

// NBP: gamma0^K exp(-gamma0 ln((J+c)/c)) / K! * prod_k Gamma(n_.k) / (J+c)^n_.k / prod_j n_jk!.
// GNBP (joint with tables l_jk): gamma0^K exp(-gamma0 ln((c+q.)/c)) / K!
//     * prod_k Gamma(l_.k) / (c+q.)^l_.k * prod_j |s(n_jk,l_jk)| p_j^n_jk / n_jk!.
// BNBP: gamma0^K exp(-gamma0 [psi(c+r.) - psi(c)]) / K!
//     * prod_k Gamma(n_.k) Gamma(c+r.) / Gamma(c+n_.k+r.) * prod_j Gamma(n_jk+r_j) / (n_jk! Gamma(r_j)).
inline double log_pmf(const ModelParams& params, const CountMatrix& m, const CountMatrix* tables = nullptr) {
  const std::size_t J = m.rows();
  params.validate(J);
  const double K = static_cast<double>(m.cols());
  const double log_k_fact = log_factorial(static_cast<count_t>(m.cols()));
  const double lg0 = std::log(params.gamma0);
  switch (params.kind) {
    case Process::nbp: {
      detail::require(tables == nullptr, "NBP log_pmf takes no table counts");
      const double jc = static_cast<double>(J) + params.c;
      const double log_jc = std::log(jc);
      double acc = K * lg0 - params.gamma0 * std::log1p(static_cast<double>(J) / params.c) - log_k_fact;
      for (std::size_t k = 0; k < m.cols(); ++k) {
        const double n = static_cast<double>(m.column_sum(k));
        acc += log_gamma(n) - n * log_jc;
        for (const auto& e : m.column(k)) acc -= log_factorial(e.count);
      }
      return acc;
    }
    case Process::gnbp: {
      detail::require(tables != nullptr, "GNBP log_pmf needs the table-count matrix");
      validate(AugmentedMatrix{m, *tables});
      const double qdot = params.row_mass(J);
      const double log_cq = std::log(params.c + qdot);
      std::vector<double> log_p(J);
      for (std::size_t j = 0; j < J; ++j) log_p[j] = std::log(params.row[j]);
      double acc = K * lg0 - params.gamma0 * log1p_ratio(qdot, params.c) - log_k_fact;
      for (std::size_t k = 0; k < m.cols(); ++k) {
        const double l = static_cast<double>(tables->column_sum(k));
        acc += log_gamma(l) - l * log_cq;
        const auto& cn = m.column(k);
        const auto& cl = tables->column(k);
        for (std::size_t i = 0; i < cn.size(); ++i) {
          acc += stirling_log_ratio(cn[i].count, cl[i].count) + static_cast<double>(cn[i].count) * log_p[cn[i].row];
        }
      }
      return acc;
    }
    case Process::bnbp: {
      detail::require(tables == nullptr, "BNBP log_pmf takes no table counts");
      const double rdot = params.row_mass(J);
      const double cr = params.c + rdot;
      const double lg_cr = log_gamma(cr);
      double acc = K * lg0 - log_k_fact - params.gamma0 * (digamma(cr) - digamma(params.c));
      for (std::size_t k = 0; k < m.cols(); ++k) {
        const double n = static_cast<double>(m.column_sum(k));
        acc += log_gamma(n) + lg_cr - log_gamma(cr + n);
        for (const auto& e : m.column(k)) {
          const double r = params.row[e.row];
          acc += log_gamma(static_cast<double>(e.count) + r) - log_factorial(e.count) - log_gamma(r);
        }
      }
      return acc;
    }
  }
  return kNegInf;
}

inline double log_pmf(const ModelParams& params, const AugmentedMatrix& aug) {
  return log_pmf(params, aug.counts, &aug.tables);
}

// Log-probability of a matrix in the column order produced by adding rows one
// at a time with new columns appended on the right, given the per-row counts
// of new columns: f(N_J) K_J! / prod_j K+_j!.
inline double log_ordered_pmf(const ModelParams& params, const CountMatrix& m, std::span<const count_t> new_columns,
                              const CountMatrix* tables = nullptr) {
  double acc = log_pmf(params, m, tables) + log_factorial(static_cast<count_t>(m.cols()));
  count_t total = 0;
  for (count_t kp : new_columns) {
    acc -= log_factorial(kp);
    total += kp;
  }
  detail::require(static_cast<std::size_t>(total) == m.cols(), "log_ordered_pmf: new-column record must sum to K");
  return acc;
}

// ---------------------------------------------------------------------------
// Row increments

// Row J+1 split over the existing columns and the new columns it introduces.
// For the GNBP, the table counts of the new row may be supplied (joint rule)
// or left empty (tables marginalized: GNB and LogLog terms).
struct NewRow {
  std::vector<count_t> existing;
  std::vector<count_t> fresh;
  std::vector<count_t> existing_tables;
  std::vector<count_t> fresh_tables;

  bool has_tables() const { return !existing_tables.empty() || !fresh_tables.empty(); }
};

// Sufficient statistics a prediction rule needs from the existing matrix.
// column_stat holds n_.k (NBP, BNBP) or l_.k (GNBP).
struct IncrementContext {
  Process kind = Process::nbp;
  double gamma0 = 1.0;
  double c = 1.0;
  double rows = 0.0;       // J (NBP)
  double row_mass = 0.0;   // q. (GNBP) or r. (BNBP)
  double new_param = 0.0;  // p_{J+1} (GNBP) or r_{J+1} (BNBP)
  std::span<const count_t> column_stat;
};

// Rate of the Poisson number of new columns brought by the next row.
inline double new_column_rate(const IncrementContext& ctx) {
  switch (ctx.kind) {
    case Process::nbp: return ctx.gamma0 * std::log1p(1.0 / (ctx.rows + ctx.c));
    case Process::gnbp: {
      const double qn = -std::log1p(-ctx.new_param);
      return ctx.gamma0 * std::log1p(qn / (ctx.c + ctx.row_mass));
    }
    case Process::bnbp: {
      const double a = ctx.c + ctx.row_mass;
      return ctx.gamma0 * (digamma(a + ctx.new_param) - digamma(a));
    }
  }
  return 0.0;
}

// Log of the prediction rule without the insertion factor:
//   prod_existing F(n_k) * prod_new H(n_k) * Pois(K+; rate)
// with (F, H) = (NB, Log), (GNB, LogLog), (BNB, Digam). This is the law of the
// new row when its new columns are appended on the right in a fixed order.
inline double appended_row_log_prob(const IncrementContext& ctx, std::span<const count_t> existing,
                                    std::span<const count_t> fresh) {
  detail::require(existing.size() == ctx.column_stat.size(), "row increment: existing part must cover every column");
  for (count_t n : fresh) detail::require(n >= 1, "row increment: new columns need a positive count");
  double acc = detail::poisson_log_pmf(static_cast<count_t>(fresh.size()), new_column_rate(ctx));
  switch (ctx.kind) {
    case Process::nbp: {
      const double log_p = -std::log1p(ctx.rows + ctx.c);         // 1/(J+c+1)
      const double log1mp = -std::log1p(1.0 / (ctx.rows + ctx.c));  // (J+c)/(J+c+1)
      for (std::size_t k = 0; k < existing.size(); ++k)
        acc += detail::nb_log_pmf(existing[k], static_cast<double>(ctx.column_stat[k]), log_p, log1mp);
      for (count_t n : fresh) acc += detail::logarithmic_log_pmf(n, log_p, log1mp);
      return acc;
    }
    case Process::gnbp: {
      const double cq = ctx.c + ctx.row_mass;
      for (std::size_t k = 0; k < existing.size(); ++k)
        acc += log_pmf(GammaNegativeBinomial{static_cast<double>(ctx.column_stat[k]), cq, ctx.new_param}, existing[k]);
      for (count_t n : fresh) acc += log_pmf(LogLog{cq, ctx.new_param}, n);
      return acc;
    }
    case Process::bnbp: {
      const double cr = ctx.c + ctx.row_mass;
      for (std::size_t k = 0; k < existing.size(); ++k)
        acc += log_pmf(BetaNegativeBinomial{ctx.new_param, static_cast<double>(ctx.column_stat[k]), cr}, existing[k]);
      for (count_t n : fresh) acc += log_pmf(DigammaDist{ctx.new_param, cr}, n);
      return acc;
    }
  }
  return kNegInf;
}

// GNBP joint rule with the new row's table counts:
//   prod_all SumLog(n_k; l_k, p') * prod_existing NB(l_k; l_.k, p~) * prod_new Log(l_k; p~) * Pois(K+)
// with p~ = q'/(c+q.+q').
inline double appended_row_log_prob_joint(const IncrementContext& ctx, const NewRow& row) {
  detail::require(ctx.kind == Process::gnbp, "joint row rule applies to the GNBP only");
  detail::require(row.existing.size() == ctx.column_stat.size() && row.existing_tables.size() == row.existing.size() &&
                      row.fresh_tables.size() == row.fresh.size(),
                  "row increment: table counts must match the row");
  const double p = ctx.new_param;
  const double qn = -std::log1p(-p);
  const double cq = ctx.c + ctx.row_mass;
  const double log_pt = std::log(qn) - std::log(cq + qn);
  const double log1mpt = -std::log1p(qn / cq);
  double acc = detail::poisson_log_pmf(static_cast<count_t>(row.fresh.size()), ctx.gamma0 * std::log1p(qn / cq));
  auto sumlog = [p](count_t n, count_t l) {
    if (n < 0 || l < 0 || (n == 0) != (l == 0) || l > n)
      throw DomainError("row increment: need table count l with l = 0 iff n = 0 and l <= n");
    return log_pmf(SumLogarithmic{l, p}, n);
  };
  for (std::size_t k = 0; k < row.existing.size(); ++k) {
    acc += sumlog(row.existing[k], row.existing_tables[k]);
    acc += detail::nb_log_pmf(row.existing_tables[k], static_cast<double>(ctx.column_stat[k]), log_pt, log1mpt);
  }
  for (std::size_t k = 0; k < row.fresh.size(); ++k) {
    detail::require(row.fresh[k] >= 1, "row increment: new columns need a positive count");
    acc += sumlog(row.fresh[k], row.fresh_tables[k]);
    acc += detail::logarithmic_log_pmf(row.fresh_tables[k], log_pt, log1mpt);
  }
  return acc;
}

inline IncrementContext make_increment_context(const ModelParams& params, const CountMatrix& existing,
                                               const CountMatrix* tables) {
  const std::size_t J = existing.rows();
  IncrementContext ctx;
  ctx.kind = params.kind;
  ctx.gamma0 = params.gamma0;
  ctx.c = params.c;
  ctx.rows = static_cast<double>(J);
  if (params.kind != Process::nbp) {
    detail::require(params.row.size() == J + 1, "row increment: need row parameters for rows 1..J+1");
    ctx.row_mass = params.row_mass(J);
    ctx.new_param = params.row[J];
  }
  if (params.kind == Process::gnbp) {
    detail::require(tables != nullptr, "GNBP row increment needs the existing table counts");
    validate(AugmentedMatrix{existing, *tables});
    ctx.column_stat = tables->column_sums();
  } else {
    detail::require(tables == nullptr, "table counts apply to the GNBP only");
    ctx.column_stat = existing.column_sums();
  }
  return ctx;
}

// log p(N+_{J+1} | N_J, theta): the appended-row law times the insertion
// factor K_J! K+! / K_{J+1}!. `params` carries row parameters for rows 1..J+1.
// For the GNBP with new-row tables this is the joint rule, which telescopes
// against the joint log_pmf; without them the tables of the new row are
// summed out.
inline double row_increment_log_pmf(const ModelParams& params, const CountMatrix& existing, const CountMatrix* tables,
                                    const NewRow& row) {
  params.validate();
  const IncrementContext ctx = make_increment_context(params, existing, tables);
  const double ins = detail::log_insertion_factor(existing.cols(), row.fresh.size());
  if (params.kind == Process::gnbp && row.has_tables()) return ins + appended_row_log_prob_joint(ctx, row);
  detail::require(!row.has_tables(), "table counts apply to the GNBP only");
  return ins + appended_row_log_prob(ctx, row.existing, row.fresh);
}

// ---------------------------------------------------------------------------
// Simulation

struct SimulatedMatrix {
  CountMatrix counts;
  std::optional<CountMatrix> tables;  // GNBP
  std::vector<count_t> new_columns;   // K+_j per row (sequential construction)
};

enum class Ordering { append_right, random_insert };

namespace detail {

inline void require_row_params(const ModelParams& params, std::size_t J) {
  params.validate(J);
  if (params.kind != Process::nbp)
    detail::require(params.row.size() == J, "simulate: row parameter vector length must equal J");
}

}  // namespace detail

// Draws K ~ Pois(rate) i.i.d. columns:
//   NBP:  n_.k ~ Log(J/(J+c)),            column ~ Mult(n_.k, 1/J, ..., 1/J)
//   GNBP: l_.k ~ Log(q./(c+q.)),          tables ~ Mult(l_.k, q_j/q.), n_jk ~ SumLog(l_jk, p_j)
//   BNBP: n_.k ~ Digam(r., c),            column ~ DirMult(n_.k, r_1..r_J)
inline SimulatedMatrix simulate_columnwise(const ModelParams& params, std::size_t J, Rng& rng) {
  detail::require(J >= 1, "simulate: J must be positive");
  detail::require_row_params(params, J);
  SimulatedMatrix out{CountMatrix(J), std::nullopt, {}};
  const double Jd = static_cast<double>(J);
  switch (params.kind) {
    case Process::nbp: {
      const count_t K = poisson_variate(rng, params.gamma0 * log1p_ratio(Jd, params.c));
      const std::vector<double> w(J, 1.0);
      const double log1mp = -log1p_ratio(Jd, params.c);
      for (count_t k = 0; k < K; ++k) {
        const count_t n = detail::sample_logarithmic_log1mp(rng, log1mp);
        const auto cnt = multinomial_variate(rng, n, w);
        CountMatrix::Column col;
        for (std::size_t j = 0; j < J; ++j)
          if (cnt[j] > 0) col.push_back({j, cnt[j]});
        out.counts.add_column(std::move(col));
      }
      return out;
    }
    case Process::gnbp: {
      std::vector<double> q(J);
      for (std::size_t j = 0; j < J; ++j) q[j] = params.q(j);
      const double qdot = params.row_mass(J);
      const count_t K = poisson_variate(rng, params.gamma0 * log1p_ratio(qdot, params.c));
      CountMatrix tables(J);
      const double log1mp = -log1p_ratio(qdot, params.c);
      for (count_t k = 0; k < K; ++k) {
        const count_t l = detail::sample_logarithmic_log1mp(rng, log1mp);
        const auto lj = multinomial_variate(rng, l, q);
        CountMatrix::Column cn, cl;
        for (std::size_t j = 0; j < J; ++j) {
          if (lj[j] == 0) continue;
          cl.push_back({j, lj[j]});
          cn.push_back({j, detail::sample_sumlog_log1mp(rng, lj[j], -q[j])});
        }
        out.counts.add_column(std::move(cn));
        tables.add_column(std::move(cl));
      }
      out.tables = std::move(tables);
      return out;
    }
    case Process::bnbp: {
      const double rdot = params.row_mass(J);
      const count_t K = poisson_variate(rng, params.gamma0 * (digamma(params.c + rdot) - digamma(params.c)));
      for (count_t k = 0; k < K; ++k) {
        const count_t n = sample(DigammaDist{rdot, params.c}, rng);
        const auto cnt = sample(DirichletMultinomial{n, params.row}, rng);
        CountMatrix::Column col;
        for (std::size_t j = 0; j < J; ++j)
          if (cnt[j] > 0) col.push_back({j, cnt[j]});
        out.counts.add_column(std::move(col));
      }
      return out;
    }
  }
  return out;
}

// Draws row J+1 from the prediction rule given the existing matrix (and
// table counts for the GNBP). `params` carries row parameters for 1..J+1.
// For the GNBP the new row's table counts are filled in as well.
inline NewRow sample_next_row(const ModelParams& params, const CountMatrix& existing, const CountMatrix* tables,
                              Rng& rng) {
  params.validate();
  const IncrementContext ctx = make_increment_context(params, existing, tables);
  const std::size_t K = existing.cols();
  NewRow row;
  row.existing.assign(K, 0);
  const count_t kplus = poisson_variate(rng, new_column_rate(ctx));
  switch (params.kind) {
    case Process::nbp: {
      const double jc = ctx.rows + ctx.c;
      const double log_odds = -std::log(jc);
      const double log1mp = -std::log1p(1.0 / jc);
      for (std::size_t k = 0; k < K; ++k)
        row.existing[k] = detail::sample_nb_log_odds(rng, static_cast<double>(ctx.column_stat[k]), log_odds);
      for (count_t t = 0; t < kplus; ++t) row.fresh.push_back(detail::sample_logarithmic_log1mp(rng, log1mp));
      return row;
    }
    case Process::gnbp: {
      const double qn = -std::log1p(-ctx.new_param);
      const double cq = ctx.c + ctx.row_mass;
      const double log_odds = std::log(qn) - std::log(cq);
      const double log1mpt = -std::log1p(qn / cq);
      row.existing_tables.assign(K, 0);
      for (std::size_t k = 0; k < K; ++k) {
        const count_t l = detail::sample_nb_log_odds(rng, static_cast<double>(ctx.column_stat[k]), log_odds);
        row.existing_tables[k] = l;
        row.existing[k] = detail::sample_sumlog_log1mp(rng, l, -qn);
      }
      for (count_t t = 0; t < kplus; ++t) {
        const count_t l = detail::sample_logarithmic_log1mp(rng, log1mpt);
        row.fresh_tables.push_back(l);
        row.fresh.push_back(detail::sample_sumlog_log1mp(rng, l, -qn));
      }
      return row;
    }
    case Process::bnbp: {
      const double cr = ctx.c + ctx.row_mass;
      for (std::size_t k = 0; k < K; ++k)
        row.existing[k] = sample(BetaNegativeBinomial{ctx.new_param, static_cast<double>(ctx.column_stat[k]), cr}, rng);
      for (count_t t = 0; t < kplus; ++t) row.fresh.push_back(sample(DigammaDist{ctx.new_param, cr}, rng));
      return row;
    }
  }
  return row;
}

namespace detail {

// Appends `row` to the matrix; with random_insert, the new columns are placed
// at a uniformly drawn order-preserving interleaving with the old ones.
inline CountMatrix append_with_ordering(const CountMatrix& m, const std::vector<count_t>& existing,
                                        const std::vector<count_t>& fresh, Ordering ordering, Rng& rng,
                                        std::vector<std::size_t>* order_out) {
  CountMatrix appended = m.append_row(existing, fresh);
  const std::size_t k_old = m.cols();
  const std::size_t k_all = appended.cols();
  std::vector<std::size_t> order(k_all);
  for (std::size_t i = 0; i < k_all; ++i) order[i] = i;
  if (ordering == Ordering::random_insert && !fresh.empty() && k_old > 0) {
    // Choose which of the k_all slots hold new columns: a uniform subset.
    std::vector<char> is_new(k_all, 0);
    std::fill(is_new.end() - static_cast<std::ptrdiff_t>(fresh.size()), is_new.end(), 1);
    std::shuffle(is_new.begin(), is_new.end(), rng);
    std::size_t next_old = 0, next_new = k_old;
    for (std::size_t i = 0; i < k_all; ++i) order[i] = is_new[i] ? next_new++ : next_old++;
    appended = appended.permute_columns(order);
  }
  if (order_out) *order_out = std::move(order);
  return appended;
}

}  // namespace detail

// Builds the matrix one row at a time from the prediction rules, recording
// K+_j for each row.
inline SimulatedMatrix simulate_sequential(const ModelParams& params, std::size_t J, Rng& rng,
                                           Ordering ordering = Ordering::append_right) {
  detail::require(J >= 1, "simulate: J must be positive");
  detail::require_row_params(params, J);
  SimulatedMatrix out{CountMatrix(0), std::nullopt, {}};
  std::optional<CountMatrix> tables;
  if (params.kind == Process::gnbp) tables = CountMatrix(0);
  for (std::size_t j = 0; j < J; ++j) {
    const ModelParams sub = params.prefix(params.kind == Process::nbp ? 0 : j + 1);
    const NewRow row = sample_next_row(sub, out.counts, tables ? &*tables : nullptr, rng);
    std::vector<std::size_t> order;
    out.counts = detail::append_with_ordering(out.counts, row.existing, row.fresh, ordering, rng, &order);
    if (tables) {
      CountMatrix t = tables->append_row(row.existing_tables, row.fresh_tables);
      tables = t.permute_columns(order);
    }
    out.new_columns.push_back(static_cast<count_t>(row.fresh.size()));
  }
  out.tables = std::move(tables);
  return out;
}

}  // namespace nbpm
