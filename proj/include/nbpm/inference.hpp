#pragma once

// Gibbs samplers for the NBP, GNBP and BNBP, the Metropolis-Hastings move for
// the BNBP concentration, and chain orchestration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include "nbpm/category_model.hpp"
#include "nbpm/count_matrix.hpp"
#include "nbpm/distributions.hpp"
#include "nbpm/error.hpp"
#include "nbpm/priors.hpp"
#include "nbpm/rng.hpp"

namespace nbpm {

struct LatentState {
  ModelParams params;
  std::vector<double> weights;  // r_k (NBP, GNBP) or p_k (BNBP), one per column
  double remainder = 0.0;       // G(Omega \ D_J) (NBP, GNBP) or p_* (BNBP)
  std::optional<CountMatrix> tables;  // l_jk (GNBP, BNBP)

  // G(Omega) for the gamma-process models.
  double total_mass() const {
    double s = remainder;
    for (double w : weights) s += w;
    return s;
  }

  // -sum_k ln(1 - p_k) for the BNBP.
  double neg_log1m_weight_sum() const {
    double s = 0.0;
    for (double p : weights) s -= std::log1p(-p);
    return s;
  }
};

enum class Retention { independent_chains, thinned_single_chain };

struct ChainConfig {
  std::size_t iterations = 2500;
  std::size_t burn_in = 0;  // thinned-single-chain only
  std::size_t samples = 10;
  Retention retention = Retention::independent_chains;
  std::uint64_t seed = 1;
  std::optional<Hyperparameters> hyper;  // process default when empty
  std::size_t jobs = 1;                  // chains run concurrently
  bool trace = false;

  void validate() const {
    detail::require(samples >= 1, "chain config: need at least one retained sample");
    detail::require(iterations >= 1, "chain config: need at least one iteration");
    detail::require(iterations > burn_in, "chain config: iterations must exceed burn-in");
    if (retention == Retention::thinned_single_chain)
      detail::require(iterations - burn_in >= samples, "chain config: too few post-burn-in iterations for S samples");
  }
};

// Switches for tests: holding gamma0 or c fixed, and a deliberately wrong
// r_k rate (c instead of c + J) for the NBP, used to check that the
// sampler-correctness harness detects errors.
struct SweepOptions {
  bool update_gamma0 = true;
  bool update_c = true;
  bool corrupt_nbp_weight_rate = false;
};

// ---------------------------------------------------------------------------
// Closed-form conditionals. Each returns (shape, scale) or (a, b) so the
// parameters themselves can be inspected.

struct GammaParams {
  double shape;
  double scale;
};
struct BetaParams {
  double a;
  double b;
};

namespace conditional {

inline GammaParams nbp_gamma0(const Hyperparameters& h, std::size_t K, std::size_t J, double c) {
  return {h.e0 + static_cast<double>(K), 1.0 / (h.f0 + log1p_ratio(static_cast<double>(J), c))};
}
inline GammaParams nbp_weight(count_t column_sum, std::size_t J, double c) {
  return {static_cast<double>(column_sum), 1.0 / (c + static_cast<double>(J))};
}
inline GammaParams nbp_remainder(double gamma0, std::size_t J, double c) {
  return {gamma0, 1.0 / (c + static_cast<double>(J))};
}
inline GammaParams concentration(const Hyperparameters& h, double gamma0, double total_mass) {
  return {h.c0 + gamma0, 1.0 / (h.d0 + total_mass)};
}

inline GammaParams gnbp_gamma0(const Hyperparameters& h, std::size_t K, double qdot, double c) {
  return {h.e0 + static_cast<double>(K), 1.0 / (h.f0 + log1p_ratio(qdot, c))};
}
inline GammaParams gnbp_weight(count_t table_sum, double qdot, double c) {
  return {static_cast<double>(table_sum), 1.0 / (c + qdot)};
}
inline GammaParams gnbp_remainder(double gamma0, double qdot, double c) { return {gamma0, 1.0 / (c + qdot)}; }
inline BetaParams gnbp_row(const Hyperparameters& h, count_t row_sum, double total_mass) {
  return {h.a0 + static_cast<double>(row_sum), h.b0 + total_mass};
}

inline GammaParams bnbp_gamma0(const Hyperparameters& h, std::size_t K, double rdot, double c) {
  return {h.e0 + static_cast<double>(K), 1.0 / (h.f0 + digamma(c + rdot) - digamma(c))};
}
inline BetaParams bnbp_weight(count_t column_sum, double rdot, double c) {
  return {static_cast<double>(column_sum), c + rdot};
}
inline GammaParams bnbp_row(const Hyperparameters& h, count_t table_row_sum, double remainder,
                            double neg_log1m_weight_sum) {
  return {h.a0 + static_cast<double>(table_row_sum), 1.0 / (h.b0 + remainder + neg_log1m_weight_sum)};
}
// Independence proposal for the BNBP concentration.
inline GammaParams bnbp_c_proposal(const Hyperparameters& h, double gamma0, double remainder, double weight_sum) {
  return {h.c0 + gamma0, 1.0 / (h.d0 + remainder + weight_sum)};
}

}  // namespace conditional

namespace detail {

inline double draw(Rng& rng, const GammaParams& g) { return gamma_variate(rng, g.shape, g.scale); }
inline double draw(Rng& rng, const BetaParams& b) { return beta_variate(rng, b.a, b.b); }

inline double log_gamma_density(double x, const GammaParams& g) {
  return (g.shape - 1.0) * std::log(x) - x / g.scale - log_gamma(g.shape) - g.shape * std::log(g.scale);
}

inline void check_state(const CountMatrix& m, const LatentState& s) {
  detail::require(s.weights.size() == m.cols(), "state: one atom weight per column required");
  s.params.validate(m.rows());
  if (s.params.kind != Process::nbp)
    detail::require(s.params.row.size() == m.rows(), "state: one row parameter per row required");
  if (s.params.kind != Process::nbp) {
    detail::require(s.tables.has_value(), "state: table counts required");
    validate(AugmentedMatrix{m, *s.tables});
  }
}

// Table counts l_jk ~ CRT(n_jk, r), with r = weight(j, k).
template <typename RateFn>
CountMatrix draw_tables(const CountMatrix& m, RateFn rate, Rng& rng) {
  CountMatrix out(m.rows());
  for (std::size_t k = 0; k < m.cols(); ++k) {
    CountMatrix::Column col;
    col.reserve(m.column(k).size());
    for (const auto& e : m.column(k)) col.push_back({e.row, crt_sample(e.count, rate(e.row, k), rng)});
    out.add_column(std::move(col), m.label(k));
  }
  return out;
}

}  // namespace detail

// Log of the c-dependent part of the BNBP target: Gamma(c0, 1/d0) prior
// times the beta-process-marginalized matrix likelihood.
inline double bnbp_log_c_target(const CountMatrix& m, const ModelParams& params, double c) {
  const double rdot = params.row_mass(m.rows());
  const double cr = c + rdot;
  const double lg_cr = log_gamma(cr);
  double acc = (params.hyper.c0 - 1.0) * std::log(c) - params.hyper.d0 * c -
               params.gamma0 * (digamma(cr) - digamma(c));
  for (std::size_t k = 0; k < m.cols(); ++k) acc += lg_cr - log_gamma(cr + static_cast<double>(m.column_sum(k)));
  return acc;
}

struct MhResult {
  double c;
  bool accepted;
};

// Log acceptance ratio for moving (c, p) to (c', p') where c' was drawn from
// the proposal built on p and p' from the conditional given c'. It is zero
// when c' = c and p' = p.
inline double mh_log_acceptance(const CountMatrix& m, const ModelParams& params, double c_old, double remainder_old,
                                double weight_sum_old, double c_new, double remainder_new, double weight_sum_new) {
  const auto q_fwd = conditional::bnbp_c_proposal(params.hyper, params.gamma0, remainder_old, weight_sum_old);
  const auto q_rev = conditional::bnbp_c_proposal(params.hyper, params.gamma0, remainder_new, weight_sum_new);
  return bnbp_log_c_target(m, params, c_new) - bnbp_log_c_target(m, params, c_old) +
         detail::log_gamma_density(c_old, q_rev) - detail::log_gamma_density(c_new, q_fwd);
}

// Metropolis-Hastings update of the BNBP concentration c. Proposes
// c' ~ Gamma(c0 + gamma0, 1/(d0 + p_* + sum_k p_k)), then draws fresh
// p'_k ~ Beta(n_.k, c' + r.) and p'_* ~ logBeta(gamma0, c' + r.); on
// acceptance the state takes (c', p'), otherwise it is left unchanged.
inline MhResult mh_update_c(const CountMatrix& m, LatentState& state, Rng& rng) {
  detail::require(state.params.kind == Process::bnbp, "mh_update_c applies to the BNBP only");
  detail::check_state(m, state);
  const ModelParams& params = state.params;
  const double rdot = params.row_mass(m.rows());
  double weight_sum = 0.0;
  for (double p : state.weights) weight_sum += p;
  const auto proposal = conditional::bnbp_c_proposal(params.hyper, params.gamma0, state.remainder, weight_sum);
  const double c_new = detail::draw(rng, proposal);
  std::vector<double> p_new(m.cols());
  double weight_sum_new = 0.0;
  for (std::size_t k = 0; k < m.cols(); ++k) {
    p_new[k] = detail::draw(rng, conditional::bnbp_weight(m.column_sum(k), rdot, c_new));
    weight_sum_new += p_new[k];
  }
  const double rem_new = logbeta_sample(params.gamma0, c_new + rdot, rng);
  const double log_ratio =
      mh_log_acceptance(m, params, params.c, state.remainder, weight_sum, c_new, rem_new, weight_sum_new);
  if (std::log(uniform01(rng)) < log_ratio) {
    state.params.c = c_new;
    state.weights = std::move(p_new);
    state.remainder = rem_new;
    return {c_new, true};
  }
  return {params.c, false};
}

// One systematic-scan sweep. Update orders:
//   NBP:  gamma0, r_k, G(Omega \ D_J), c
//   GNBP: gamma0, l_jk, r_k, G(Omega \ D_J), p_j, c
//   BNBP: gamma0, p_k, p_*, l_jk, r_j, c (Metropolis-Hastings)
inline LatentState gibbs_sweep(const CountMatrix& m, const LatentState& in, Rng& rng, const SweepOptions& opt = {},
                               MhResult* mh = nullptr) {
  detail::check_state(m, in);
  LatentState s = in;
  ModelParams& th = s.params;
  const Hyperparameters& h = th.hyper;
  const std::size_t J = m.rows();
  const std::size_t K = m.cols();
  switch (th.kind) {
    case Process::nbp: {
      if (opt.update_gamma0) th.gamma0 = detail::draw(rng, conditional::nbp_gamma0(h, K, J, th.c));
      for (std::size_t k = 0; k < K; ++k) {
        auto g = conditional::nbp_weight(m.column_sum(k), J, th.c);
        if (opt.corrupt_nbp_weight_rate) g.scale = 1.0 / th.c;
        s.weights[k] = detail::draw(rng, g);
      }
      s.remainder = detail::draw(rng, conditional::nbp_remainder(th.gamma0, J, th.c));
      if (opt.update_c) th.c = detail::draw(rng, conditional::concentration(h, th.gamma0, s.total_mass()));
      return s;
    }
    case Process::gnbp: {
      double qdot = th.row_mass(J);
      if (opt.update_gamma0) th.gamma0 = detail::draw(rng, conditional::gnbp_gamma0(h, K, qdot, th.c));
      s.tables = detail::draw_tables(m, [&](std::size_t, std::size_t k) { return s.weights[k]; }, rng);
      for (std::size_t k = 0; k < K; ++k)
        s.weights[k] = detail::draw(rng, conditional::gnbp_weight(s.tables->column_sum(k), qdot, th.c));
      s.remainder = detail::draw(rng, conditional::gnbp_remainder(th.gamma0, qdot, th.c));
      const double G = s.total_mass();
      const auto rows = m.row_sums();
      for (std::size_t j = 0; j < J; ++j) {
        double p = detail::draw(rng, conditional::gnbp_row(h, rows[j], G));
        th.row[j] = std::min(p, std::nextafter(1.0, 0.0));
      }
      if (opt.update_c) th.c = detail::draw(rng, conditional::concentration(h, th.gamma0, G));
      return s;
    }
    case Process::bnbp: {
      const double rdot = th.row_mass(J);
      if (opt.update_gamma0) th.gamma0 = detail::draw(rng, conditional::bnbp_gamma0(h, K, rdot, th.c));
      for (std::size_t k = 0; k < K; ++k)
        s.weights[k] = detail::draw(rng, conditional::bnbp_weight(m.column_sum(k), rdot, th.c));
      s.remainder = logbeta_sample(th.gamma0, th.c + rdot, rng);
      s.tables = detail::draw_tables(m, [&](std::size_t j, std::size_t) { return th.row[j]; }, rng);
      const auto table_rows = s.tables->row_sums();
      const double nlw = s.neg_log1m_weight_sum();
      for (std::size_t j = 0; j < J; ++j)
        th.row[j] = detail::draw(rng, conditional::bnbp_row(h, table_rows[j], s.remainder, nlw));
      if (opt.update_c) {
        const MhResult r = mh_update_c(m, s, rng);
        if (mh) *mh = r;
      }
      return s;
    }
  }
  return s;
}

// Draws the atom weights and remainder (and, for the BNBP, the tables) from
// their exact conditionals given the data and (gamma0, c, row parameters).
// The GNBP weights condition on the tables, which must already be present.
inline void draw_latent_given_params(const CountMatrix& m, LatentState& s, Rng& rng) {
  const ModelParams& th = s.params;
  const std::size_t J = m.rows();
  const std::size_t K = m.cols();
  s.weights.assign(K, 0.0);
  switch (th.kind) {
    case Process::nbp:
      for (std::size_t k = 0; k < K; ++k) s.weights[k] = detail::draw(rng, conditional::nbp_weight(m.column_sum(k), J, th.c));
      s.remainder = detail::draw(rng, conditional::nbp_remainder(th.gamma0, J, th.c));
      return;
    case Process::gnbp: {
      detail::require(s.tables.has_value(), "GNBP latent draw needs table counts");
      const double qdot = th.row_mass(J);
      for (std::size_t k = 0; k < K; ++k)
        s.weights[k] = detail::draw(rng, conditional::gnbp_weight(s.tables->column_sum(k), qdot, th.c));
      s.remainder = detail::draw(rng, conditional::gnbp_remainder(th.gamma0, qdot, th.c));
      return;
    }
    case Process::bnbp: {
      const double rdot = th.row_mass(J);
      for (std::size_t k = 0; k < K; ++k)
        s.weights[k] = detail::draw(rng, conditional::bnbp_weight(m.column_sum(k), rdot, th.c));
      s.remainder = logbeta_sample(th.gamma0, th.c + rdot, rng);
      s.tables = detail::draw_tables(m, [&](std::size_t j, std::size_t) { return th.row[j]; }, rng);
      return;
    }
  }
}

namespace detail {

inline CountMatrix unit_tables(const CountMatrix& m) {
  CountMatrix t(m.rows());
  for (std::size_t k = 0; k < m.cols(); ++k) {
    CountMatrix::Column col;
    for (const auto& e : m.column(k)) col.push_back({e.row, 1});
    t.add_column(std::move(col), m.label(k));
  }
  return t;
}

}  // namespace detail

// gamma0 = 1, c = 1, p_j = 0.5, r_j = 1, l_jk = min(n_jk, 1), atom weights
// and remainder from one conditional draw.
inline LatentState initial_state(Process kind, const CountMatrix& m, const Hyperparameters& hyper, Rng& rng) {
  LatentState s;
  s.params.kind = kind;
  s.params.gamma0 = 1.0;
  s.params.c = 1.0;
  s.params.hyper = hyper;
  if (kind == Process::gnbp) s.params.row.assign(m.rows(), 0.5);
  if (kind == Process::bnbp) s.params.row.assign(m.rows(), 1.0);
  if (kind != Process::nbp) s.tables = detail::unit_tables(m);
  draw_latent_given_params(m, s, rng);
  if (kind == Process::bnbp) s.tables = detail::unit_tables(m);
  return s;
}

inline PosteriorSample summarize(const CountMatrix& m, const LatentState& s) {
  PosteriorSample out;
  out.gamma0 = s.params.gamma0;
  out.c = s.params.c;
  out.row = s.params.row;
  out.remainder = s.remainder;
  switch (s.params.kind) {
    case Process::nbp: out.total_mass = s.total_mass(); break;
    case Process::gnbp:
      out.total_mass = s.total_mass();
      out.row_mass = s.params.row_mass(m.rows());
      out.table_sums = s.tables->column_sums();
      break;
    case Process::bnbp:
      out.row_mass = s.params.row_mass(m.rows());
      out.neg_log1m_weight_sum = s.neg_log1m_weight_sum();
      break;
  }
  return out;
}

struct TraceRow {
  std::size_t chain;
  std::size_t iteration;  // 1-based
  double gamma0;
  double c;
  double mass;  // G(Omega) (NBP, GNBP) or p_* + sum_k p_k (BNBP)
  double log_likelihood;
};

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "chain,iteration,gamma0,c,mass,log_likelihood\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.chain << ',' << r.iteration << ',' << r.gamma0 << ',' << r.c << ',' << r.mass << ',' << r.log_likelihood
        << '\n';
}

struct ChainResult {
  CategoryModel model;
  std::vector<LatentState> retained;
  std::vector<TraceRow> trace;
  std::size_t mh_proposals = 0;
  std::size_t mh_accepts = 0;
};

namespace detail {

inline TraceRow trace_row(const CountMatrix& m, const LatentState& s, std::size_t chain, std::size_t it) {
  const double mass = s.total_mass();
  const double ll = log_pmf(s.params, m, s.params.kind == Process::gnbp ? &*s.tables : nullptr);
  return {chain, it, s.params.gamma0, s.params.c, mass, ll};
}

struct SingleChain {
  std::vector<LatentState> retained;
  std::vector<TraceRow> trace;
  std::size_t mh_proposals = 0;
  std::size_t mh_accepts = 0;
};

// Runs one chain; keeps iterates whose 1-based index satisfies `keep`.
inline SingleChain run_single_chain(Process kind, const CountMatrix& m, const Hyperparameters& hyper,
                                    std::size_t iterations, std::uint64_t seed, std::size_t chain, bool trace,
                                    const std::function<bool(std::size_t)>& keep) {
  SingleChain out;
  Rng rng = make_stream(seed, chain);
  LatentState s = initial_state(kind, m, hyper, rng);
  for (std::size_t it = 1; it <= iterations; ++it) {
    MhResult mh{0.0, false};
    s = gibbs_sweep(m, s, rng, {}, &mh);
    if (kind == Process::bnbp) {
      ++out.mh_proposals;
      out.mh_accepts += mh.accepted ? 1 : 0;
    }
    if (trace) out.trace.push_back(trace_row(m, s, chain, it));
    if (keep(it)) out.retained.push_back(s);
  }
  return out;
}

}  // namespace detail

// Runs the sampler and retains S posterior samples:
//   independent-chains: S chains from streams (seed, 0..S-1), each keeping its
//   final iterate;
//   thinned-single-chain: one chain, S iterates evenly spaced after burn-in,
//   the last being the final iterate.
inline ChainResult run_chain(Process kind, const CountMatrix& m, const ChainConfig& config) {
  config.validate();
  detail::require(m.rows() > 0 || m.cols() > 0, "run_chain: matrix has no rows and no columns");
  detail::require(m.rows() > 0, "run_chain: matrix has no rows");
  const Hyperparameters hyper = config.hyper.value_or(Hyperparameters::defaults(kind));
  hyper.validate();

  std::vector<detail::SingleChain> chains;
  if (config.retention == Retention::independent_chains) {
    chains.resize(config.samples);
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(config.jobs, config.samples));
    auto work = [&](std::size_t first) {
      for (std::size_t ch = first; ch < config.samples; ch += n_threads) {
        chains[ch] = detail::run_single_chain(kind, m, hyper, config.iterations, config.seed, ch, config.trace,
                                              [&](std::size_t it) { return it == config.iterations; });
      }
    };
    if (n_threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
      for (auto& t : pool) t.join();
    }
  } else {
    const std::size_t span = config.iterations - config.burn_in;
    const std::size_t stride = span / config.samples;
    const std::size_t first = config.iterations - stride * (config.samples - 1);
    chains.push_back(detail::run_single_chain(kind, m, hyper, config.iterations, config.seed, 0, config.trace,
                                              [&](std::size_t it) {
                                                return it >= first && (it - first) % stride == 0;
                                              }));
  }

  ChainResult out;
  out.model.kind = kind;
  out.model.hyper = hyper;
  out.model.rows = m.rows();
  out.model.features = m.labels();
  out.model.column_sums = m.column_sums();
  for (auto& ch : chains) {
    for (auto& s : ch.retained) {
      out.model.samples.push_back(summarize(m, s));
      out.retained.push_back(std::move(s));
    }
    out.trace.insert(out.trace.end(), ch.trace.begin(), ch.trace.end());
    out.mh_proposals += ch.mh_proposals;
    out.mh_accepts += ch.mh_accepts;
  }
  return out;
}

}  // namespace nbpm
