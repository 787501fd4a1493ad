#pragma once

// Joint-distribution ("getting it right") tests of the Gibbs samplers.
//
// Marginal-conditional runs draw (theta, N, latents) exactly: theta from the
// hyperpriors, N by column-wise simulation, latents from their conditionals.
// Successive-conditional runs alternate a Gibbs sweep with a fresh draw of
// (N, latents) given theta; statistics are read right after each sweep. Both
// leave the same joint law invariant, so the means of any statistic agree.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nbpm/count_matrix.hpp"
#include "nbpm/inference.hpp"
#include "nbpm/priors.hpp"
#include "nbpm/rng.hpp"

namespace nbpm {

struct GewekeConfig {
  Process kind = Process::nbp;
  std::size_t rows = 3;
  std::size_t rounds = 10000;
  std::size_t batches = 50;  // batch means for the successive-conditional chain
  std::uint64_t seed = 1;
  std::optional<Hyperparameters> hyper;  // geweke_hyperparameters(kind) when empty
  SweepOptions sweep;
  double fixed_gamma0 = 2.0;  // used when sweep.update_gamma0 is false
  double fixed_c = 2.0;       // used when sweep.update_c is false
};

// Proper hyperpriors that keep the simulated matrices small. For the BNBP,
// c is concentrated above 2 so the column sums have finite variance.
inline Hyperparameters geweke_hyperparameters(Process kind) {
  Hyperparameters h;
  h.e0 = 2.0;
  h.f0 = 1.0;
  switch (kind) {
    case Process::nbp:
      h.c0 = 4.0;
      h.d0 = 2.0;
      break;
    case Process::gnbp:
      h.a0 = 2.0;
      h.b0 = 4.0;
      h.c0 = 4.0;
      h.d0 = 2.0;
      break;
    case Process::bnbp:
      h.a0 = 2.0;
      h.b0 = 2.0;
      h.c0 = 40.0;
      h.d0 = 10.0;
      break;
  }
  return h;
}

inline constexpr std::size_t kGewekeStatistics = 5;

inline std::array<std::string, kGewekeStatistics> geweke_statistic_names(Process kind) {
  return {"gamma0", "c", "columns", "log1p_total", kind == Process::nbp ? "total_mass" : "mean_row_param"};
}

struct GewekeStatistic {
  std::string name;
  double forward_mean = 0.0;
  double forward_se = 0.0;
  double successive_mean = 0.0;
  double successive_se = 0.0;
  double z = 0.0;
};

struct GewekeReport {
  Process kind = Process::nbp;
  std::vector<GewekeStatistic> statistics;
  // Set when the successive-conditional chain left the parameter domain.
  std::optional<std::string> divergence;

  double max_abs_z() const {
    if (divergence) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (const auto& s : statistics) m = std::max(m, std::abs(s.z));
    return m;
  }
  bool passed(double threshold = 4.0) const { return max_abs_z() < threshold; }
};

namespace detail {

struct GewekeDraw {
  LatentState state;
  CountMatrix counts;
};

inline std::array<double, kGewekeStatistics> geweke_statistics(const GewekeDraw& d) {
  const ModelParams& th = d.state.params;
  double last = 0.0;
  if (th.kind == Process::nbp) {
    last = d.state.total_mass();
  } else {
    for (double x : th.row) last += x;
    last /= static_cast<double>(th.row.size());
  }
  return {th.gamma0, th.c, static_cast<double>(d.counts.cols()), std::log1p(static_cast<double>(d.counts.total())),
          last};
}

// (N, latents) given theta.
inline GewekeDraw draw_data_given_params(const ModelParams& th, std::size_t J, Rng& rng) {
  SimulatedMatrix sim = simulate_columnwise(th, J, rng);
  GewekeDraw d{LatentState{}, std::move(sim.counts)};
  d.state.params = th;
  if (th.kind == Process::gnbp) d.state.tables = std::move(sim.tables);
  draw_latent_given_params(d.counts, d.state, rng);
  return d;
}

inline ModelParams draw_params(const GewekeConfig& cfg, const Hyperparameters& h, Rng& rng) {
  ModelParams th;
  th.kind = cfg.kind;
  th.hyper = h;
  th.gamma0 = cfg.sweep.update_gamma0 ? gamma_variate(rng, h.e0, 1.0 / h.f0) : cfg.fixed_gamma0;
  th.c = cfg.sweep.update_c ? gamma_variate(rng, h.c0, 1.0 / h.d0) : cfg.fixed_c;
  if (cfg.kind == Process::gnbp) {
    th.row.resize(cfg.rows);
    for (double& p : th.row) p = std::min(beta_variate(rng, h.a0, h.b0), std::nextafter(1.0, 0.0));
  } else if (cfg.kind == Process::bnbp) {
    th.row.resize(cfg.rows);
    for (double& r : th.row) r = gamma_variate(rng, h.a0, 1.0 / h.b0);
  }
  return th;
}

}  // namespace detail

inline GewekeReport run_geweke(const GewekeConfig& cfg) {
  detail::require(cfg.rows >= 1, "geweke: need at least one row");
  detail::require(cfg.batches >= 2 && cfg.rounds >= 2 * cfg.batches, "geweke: too few rounds for the batch count");
  const Hyperparameters h = cfg.hyper.value_or(geweke_hyperparameters(cfg.kind));
  h.validate();
  const std::size_t n = cfg.rounds;
  using Stats = std::array<double, kGewekeStatistics>;

  // Marginal-conditional: i.i.d. exact draws.
  std::vector<Stats> fwd(n);
  {
    Rng rng = make_stream(cfg.seed, 0);
    for (std::size_t i = 0; i < n; ++i)
      fwd[i] = detail::geweke_statistics(detail::draw_data_given_params(detail::draw_params(cfg, h, rng), cfg.rows, rng));
  }

  // Successive-conditional chain, started from an exact draw.
  std::vector<Stats> sc(n);
  {
    Rng rng = make_stream(cfg.seed, 1);
    detail::GewekeDraw d = detail::draw_data_given_params(detail::draw_params(cfg, h, rng), cfg.rows, rng);
    try {
      for (std::size_t i = 0; i < n; ++i) {
        d.state = gibbs_sweep(d.counts, d.state, rng, cfg.sweep);
        sc[i] = detail::geweke_statistics(d);
        d = detail::draw_data_given_params(d.state.params, cfg.rows, rng);
      }
    } catch (const DomainError& e) {
      GewekeReport failed;
      failed.kind = cfg.kind;
      failed.divergence = e.what();
      return failed;
    }
  }

  GewekeReport report;
  report.kind = cfg.kind;
  const auto names = geweke_statistic_names(cfg.kind);
  const std::size_t B = cfg.batches;
  const std::size_t len = n / B;
  for (std::size_t t = 0; t < kGewekeStatistics; ++t) {
    GewekeStatistic st;
    st.name = names[t];
    double m = 0.0, v = 0.0;
    for (const auto& x : fwd) m += x[t];
    m /= static_cast<double>(n);
    for (const auto& x : fwd) v += (x[t] - m) * (x[t] - m);
    v /= static_cast<double>(n - 1);
    st.forward_mean = m;
    st.forward_se = std::sqrt(v / static_cast<double>(n));

    std::vector<double> batch(B, 0.0);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t i = b * len; i < (b + 1) * len; ++i) batch[b] += sc[i][t];
      batch[b] /= static_cast<double>(len);
    }
    double bm = 0.0, bv = 0.0;
    for (double x : batch) bm += x;
    bm /= static_cast<double>(B);
    for (double x : batch) bv += (x - bm) * (x - bm);
    bv /= static_cast<double>(B - 1);
    st.successive_mean = bm;
    st.successive_se = std::sqrt(bv / static_cast<double>(B));

    const double se = std::hypot(st.forward_se, st.successive_se);
    st.z = se > 0.0 ? (st.forward_mean - st.successive_mean) / se : 0.0;
    report.statistics.push_back(st);
  }
  return report;
}

inline void write_geweke_csv(std::ostream& out, const GewekeReport& r) {
  out.precision(10);
  out << "process,statistic,forward_mean,forward_se,successive_mean,successive_se,z\n";
  if (r.divergence) out << to_string(r.kind) << ",diverged,,,,,inf\n";
  for (const auto& s : r.statistics)
    out << to_string(r.kind) << ',' << s.name << ',' << s.forward_mean << ',' << s.forward_se << ','
        << s.successive_mean << ',' << s.successive_se << ',' << s.z << '\n';
}

}  // namespace nbpm
