#pragma once

// Count distributions the random-matrix priors are assembled from: their
// log-PMFs (natural log, -inf outside the support) and exact samplers.
//
// Parameterizations:
//   Logarithmic(p)                  P(u) = p^u / (u * -ln(1-p)),            u >= 1
//   SumLogarithmic(l, p)            sum of l Logarithmic(p) draws,          n >= l
//   NegativeBinomial(r, p)          Gamma(n+r)/(n! Gamma(r)) p^n (1-p)^r,   n >= 0
//   GammaNegativeBinomial(e, c, p)  NB(r, p) with r ~ Gamma(e, 1/c),        n >= 0
//   BetaNegativeBinomial(r, e, c)   NB(r, p) with p ~ Beta(e, c),           n >= 0
//   LogLog(c, p)                    SumLog(l, p), l ~ Log(q / (c + q)),     n >= 1
//   DigammaDist(r, c)               limit of BNB(r, e -> 0, c) given n > 0, n >= 1
//   DirichletMultinomial(n, r_1..J) multinomial with Dirichlet(r) weights
//   Poisson(lambda)
// where q = -ln(1 - p) throughout.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nbpm/error.hpp"
#include "nbpm/rng.hpp"
#include "nbpm/special_functions.hpp"
#include "nbpm/stirling.hpp"

namespace nbpm {

struct Logarithmic {
  double p;
};
struct SumLogarithmic {
  count_t l;
  double p;
};
struct NegativeBinomial {
  double r;
  double p;
};
struct GammaNegativeBinomial {
  double e;
  double c;
  double p;
};
struct BetaNegativeBinomial {
  double r;
  double e;
  double c;
};
struct LogLog {
  double c;
  double p;
};
struct DigammaDist {
  double r;
  double c;
};
struct DirichletMultinomial {
  count_t n_total;
  std::vector<double> r;
};
struct Poisson {
  double lambda;
};

using DistSpec = std::variant<Logarithmic, SumLogarithmic, NegativeBinomial, GammaNegativeBinomial,
                              BetaNegativeBinomial, LogLog, DigammaDist, DirichletMultinomial, Poisson>;

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline bool is_probability(double p) { return p > 0.0 && p < 1.0; }
inline bool is_positive(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace detail

inline void validate(const Logarithmic& d) {
  detail::require(detail::is_probability(d.p), "Logarithmic: p must lie in (0,1)");
}
inline void validate(const SumLogarithmic& d) {
  detail::require(detail::is_probability(d.p), "SumLogarithmic: p must lie in (0,1)");
  detail::require(d.l >= 0, "SumLogarithmic: l must be >= 0");
}
inline void validate(const NegativeBinomial& d) {
  detail::require(detail::is_positive(d.r), "NegativeBinomial: r must be positive");
  detail::require(detail::is_probability(d.p), "NegativeBinomial: p must lie in (0,1)");
}
inline void validate(const GammaNegativeBinomial& d) {
  detail::require(detail::is_positive(d.e), "GNB: shape must be positive");
  detail::require(detail::is_positive(d.c), "GNB: c must be positive");
  detail::require(detail::is_probability(d.p), "GNB: p must lie in (0,1)");
}
inline void validate(const BetaNegativeBinomial& d) {
  detail::require(detail::is_positive(d.r) && detail::is_positive(d.e) && detail::is_positive(d.c),
                  "BNB: r, e, c must be positive");
}
inline void validate(const LogLog& d) {
  detail::require(detail::is_positive(d.c), "LogLog: c must be positive");
  detail::require(detail::is_probability(d.p), "LogLog: p must lie in (0,1)");
}
inline void validate(const DigammaDist& d) {
  detail::require(detail::is_positive(d.r) && detail::is_positive(d.c), "Digamma: r, c must be positive");
}
inline void validate(const DirichletMultinomial& d) {
  detail::require(d.n_total >= 0, "DirMult: n_total must be >= 0");
  detail::require(!d.r.empty(), "DirMult: needs at least one category");
  for (double x : d.r) detail::require(detail::is_positive(x), "DirMult: r_j must be positive");
}
inline void validate(const Poisson& d) {
  detail::require(d.lambda >= 0.0 && std::isfinite(d.lambda), "Poisson: lambda must be >= 0");
}
inline void validate(const DistSpec& spec) {
  std::visit([](const auto& d) { validate(d); }, spec);
}

// ---------------------------------------------------------------------------
// Log-PMFs

inline double log_pmf(const Logarithmic& d, count_t u) {
  validate(d);
  if (u < 1) return kNegInf;
  const double n = static_cast<double>(u);
  return n * std::log(d.p) - std::log(n) - std::log(-std::log1p(-d.p));
}

inline double log_pmf(const SumLogarithmic& d, count_t n) {
  validate(d);
  if (d.l == 0) return n == 0 ? 0.0 : kNegInf;
  if (n < d.l) return kNegInf;
  const double q = -std::log1p(-d.p);
  return static_cast<double>(n) * std::log(d.p) + log_factorial(d.l) + stirling_log_ratio(n, d.l) -
         static_cast<double>(d.l) * std::log(q);
}

inline double log_pmf(const NegativeBinomial& d, count_t n) {
  validate(d);
  if (n < 0) return kNegInf;
  const double base = d.r * std::log1p(-d.p);
  if (n == 0) return base;
  const double nd = static_cast<double>(n);
  return log_gamma(nd + d.r) - log_gamma(d.r) - log_factorial(n) + nd * std::log(d.p) + base;
}

inline double log_pmf(const GammaNegativeBinomial& d, count_t n) {
  validate(d);
  if (n < 0) return kNegInf;
  const double q = -std::log1p(-d.p);
  const double base = -d.e * std::log1p(q / d.c);  // e ln(c / (c + q))
  if (n == 0) return base;
  const auto g = stirling_table().row(n);
  const double log_cq = std::log(d.c + q);
  const double lg_e = log_gamma(d.e);
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (count_t l = 1; l <= n; ++l) {
    const double ld = static_cast<double>(l);
    terms[static_cast<std::size_t>(l - 1)] = g[static_cast<std::size_t>(l)] + log_gamma(d.e + ld) - lg_e - ld * log_cq;
  }
  return base + static_cast<double>(n) * std::log(d.p) + log_sum_exp(terms);
}

inline double log_pmf(const BetaNegativeBinomial& d, count_t n) {
  validate(d);
  if (n < 0) return kNegInf;
  const double nd = static_cast<double>(n);
  return log_gamma(d.r + nd) - log_factorial(n) - log_gamma(d.r) + log_gamma(d.c + d.r) + log_gamma(d.e + nd) +
         log_gamma(d.e + d.c) - log_gamma(d.e + d.c + d.r + nd) - log_gamma(d.e) - log_gamma(d.c);
}

inline double log_pmf(const LogLog& d, count_t n) {
  validate(d);
  if (n < 1) return kNegInf;
  const double q = -std::log1p(-d.p);
  const auto g = stirling_table().row(n);
  const double log_cq = std::log(d.c + q);
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (count_t l = 1; l <= n; ++l) {
    const double ld = static_cast<double>(l);
    terms[static_cast<std::size_t>(l - 1)] = g[static_cast<std::size_t>(l)] + log_gamma(ld) - ld * log_cq;
  }
  return static_cast<double>(n) * std::log(d.p) + log_sum_exp(terms) - std::log(std::log1p(q / d.c));
}

inline double log_pmf(const DigammaDist& d, count_t n) {
  validate(d);
  if (n < 1) return kNegInf;
  const double nd = static_cast<double>(n);
  return log_gamma(d.r + nd) + log_gamma(d.c + d.r) - std::log(nd) - log_gamma(d.c + nd + d.r) - log_gamma(d.r) -
         std::log(digamma(d.c + d.r) - digamma(d.c));
}

inline double log_pmf(const Poisson& d, count_t n) {
  validate(d);
  if (n < 0) return kNegInf;
  if (d.lambda == 0.0) return n == 0 ? 0.0 : kNegInf;
  return static_cast<double>(n) * std::log(d.lambda) - d.lambda - log_factorial(n);
}

inline double log_pmf(const DirichletMultinomial& d, std::span<const count_t> counts) {
  validate(d);
  detail::require(counts.size() == d.r.size(), "DirMult: count vector length must equal len(r)");
  count_t total = 0;
  for (count_t x : counts) {
    if (x < 0) return kNegInf;
    total += x;
  }
  if (total != d.n_total) return kNegInf;
  double r_sum = 0.0;
  double acc = log_factorial(d.n_total);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    r_sum += d.r[j];
    if (counts[j] > 0) {
      acc += log_gamma(static_cast<double>(counts[j]) + d.r[j]) - log_gamma(d.r[j]) - log_factorial(counts[j]);
    }
  }
  return acc + log_gamma(r_sum) - log_gamma(static_cast<double>(d.n_total) + r_sum);
}

// Scalar dispatch. DirichletMultinomial needs the vector overload.
inline double count_log_pmf(const DistSpec& spec, count_t value) {
  return std::visit(
      [value](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DirichletMultinomial>) {
          if (d.r.size() != 1) throw DomainError("DirMult: vector-valued; use the count-vector overload");
          const count_t one[1] = {value};
          return log_pmf(d, std::span<const count_t>(one));
        } else {
          return log_pmf(d, value);
        }
      },
      spec);
}

inline double count_log_pmf(const DistSpec& spec, std::span<const count_t> value) {
  if (const auto* dm = std::get_if<DirichletMultinomial>(&spec)) return log_pmf(*dm, value);
  if (value.size() != 1) throw DomainError("count_log_pmf: scalar distribution given a vector value");
  return count_log_pmf(spec, value[0]);
}

// ---------------------------------------------------------------------------
// Samplers. The *_log1mp helpers take ln(1 - p) so that p close to 1 keeps
// full precision; the priors pass exact values such as ln(c / (J + c)).

namespace detail {

// Kemp (1981) "LK" algorithm for the logarithmic series distribution.
inline count_t sample_logarithmic_log1mp(Rng& rng, double log1mp) {
  const double p = -std::expm1(log1mp);
  for (;;) {
    const double v = uniform01(rng);
    if (v >= p) return 1;
    const double u = uniform01(rng);
    const double q = -std::expm1(log1mp * u);
    if (v <= q * q) {
      const double x = std::floor(1.0 + std::log(v) / std::log(q));
      if (!(x >= 1.0)) continue;
      return clip_count(x);
    }
    if (v >= q) return 1;
    return 2;
  }
}

inline count_t sample_sumlog_log1mp(Rng& rng, count_t l, double log1mp) {
  count_t n = 0;
  for (count_t t = 0; t < l; ++t) {
    n += sample_logarithmic_log1mp(rng, log1mp);
    if (n >= kMaxCount) return kMaxCount;
  }
  return n;
}

// NB(r, p) written in terms of the odds p / (1 - p) as a Gamma-Poisson mixture.
inline count_t sample_nb_log_odds(Rng& rng, double r, double log_odds) {
  const double rate = std::exp(log_gamma_variate(rng, r) + log_odds);
  return poisson_variate(rng, std::min(rate, 1e300));
}

inline double log_odds_from_p(double p) { return std::log(p) - std::log1p(-p); }

// Truncated Gamma(2, rate) on (0, upper) by inverting 1 - e^{-x}(1 + x).
inline double sample_truncated_gamma2(Rng& rng, double rate, double upper) {
  const double xmax = rate * upper;
  auto cdf = [](double x) { return -std::expm1(-x) - x * std::exp(-x); };
  const double target = uniform01(rng) * cdf(xmax);
  double lo = 0.0;
  double hi = xmax;
  double x = std::min(xmax, 1.0);
  for (int it = 0; it < 200; ++it) {
    const double f = cdf(x) - target;
    if (f > 0.0) hi = x; else lo = x;
    const double dens = x * std::exp(-x);
    double next = dens > 0.0 ? x - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, x) || hi - lo <= 1e-15 * std::max(1.0, hi)) {
      x = next;
      break;
    }
    x = next;
  }
  return x / rate;
}

}  // namespace detail

inline count_t sample(const Logarithmic& d, Rng& rng) {
  validate(d);
  return detail::sample_logarithmic_log1mp(rng, std::log1p(-d.p));
}

inline count_t sample(const SumLogarithmic& d, Rng& rng) {
  validate(d);
  return detail::sample_sumlog_log1mp(rng, d.l, std::log1p(-d.p));
}

inline count_t sample(const NegativeBinomial& d, Rng& rng) {
  validate(d);
  return detail::sample_nb_log_odds(rng, d.r, detail::log_odds_from_p(d.p));
}

inline count_t sample(const GammaNegativeBinomial& d, Rng& rng) {
  validate(d);
  const double r = gamma_variate(rng, d.e, 1.0 / d.c);
  return detail::sample_nb_log_odds(rng, r, detail::log_odds_from_p(d.p));
}

inline count_t sample(const BetaNegativeBinomial& d, Rng& rng) {
  validate(d);
  // p ~ Beta(e, c): log odds is the difference of two log-gamma variates.
  const double log_odds = log_gamma_variate(rng, d.e) - log_gamma_variate(rng, d.c);
  return detail::sample_nb_log_odds(rng, d.r, log_odds);
}

inline count_t sample(const LogLog& d, Rng& rng) {
  validate(d);
  const double q = -std::log1p(-d.p);
  const count_t l = detail::sample_logarithmic_log1mp(rng, -std::log1p(q / d.c));  // p' = q/(c+q)
  return detail::sample_sumlog_log1mp(rng, l, -q);
}

// Digamma(r, c): draw the beta-process atom weight from its size-biased law
// in q = -ln(1 - p), whose density is proportional to
//   (1 - e^{-rq}) e^{-cq} / (1 - e^{-q}),
// by rejection from the envelope e^{-cq} min(1, rq)(1 + 1/q), then a
// zero-truncated compound-Poisson count given the weight.
inline count_t sample(const DigammaDist& d, Rng& rng) {
  validate(d);
  const double r = d.r;
  const double c = d.c;
  const double q0 = 1.0 / r;
  const double e0 = std::exp(-c * q0);
  // Envelope masses: (0,q0) r(1+q)e^{-cq};  (q0,inf) e^{-cq};  (q0,inf) e^{-cq}/q.
  const double mass_exp = -std::expm1(-c * q0) / c;
  const double mass_gamma2 = (-std::expm1(-c * q0) - c * q0 * e0) / (c * c);
  const double m1 = r * (mass_exp + mass_gamma2);
  const double m2 = e0 / c;
  const double m3 = exponential_integral_e1(c * q0);
  const double total = m1 + m2 + m3;
  for (;;) {
    const double u = uniform01(rng) * total;
    double q;
    double bound;
    if (u < m1) {
      if (uniform01(rng) * (mass_exp + mass_gamma2) < mass_exp) {
        q = -std::log1p(-uniform01(rng) * -std::expm1(-c * q0)) / c;
      } else {
        q = detail::sample_truncated_gamma2(rng, c, q0);
      }
      bound = r * (1.0 + q);
    } else {
      q = q0 + exponential_variate(rng, c);
      if (u >= m1 + m2)
        while (uniform01(rng) >= q0 / q) q = q0 + exponential_variate(rng, c);
      bound = 1.0 + 1.0 / q;
    }
    if (!(q > 0.0)) continue;
    const double accept = -std::expm1(-r * q) / (-std::expm1(-q) * bound);
    if (uniform01(rng) >= accept) continue;
    const count_t l = zero_truncated_poisson_variate(rng, r * q);
    return detail::sample_sumlog_log1mp(rng, l, -q);
  }
}

inline count_t sample(const Poisson& d, Rng& rng) {
  validate(d);
  return poisson_variate(rng, d.lambda);
}

inline std::vector<count_t> sample(const DirichletMultinomial& d, Rng& rng) {
  validate(d);
  std::vector<double> logw(d.r.size());
  for (std::size_t j = 0; j < d.r.size(); ++j) logw[j] = log_gamma_variate(rng, d.r[j]);
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(d.r.size());
  for (std::size_t j = 0; j < d.r.size(); ++j) w[j] = std::exp(logw[j] - top);
  return multinomial_variate(rng, d.n_total, w);
}

// Result of a draw from any DistSpec: a single count, or a count vector for
// DirichletMultinomial.
using CountValue = std::variant<count_t, std::vector<count_t>>;

inline CountValue count_sample(const DistSpec& spec, Rng& rng) {
  return std::visit([&rng](const auto& d) -> CountValue { return sample(d, rng); }, spec);
}

// ---------------------------------------------------------------------------
// Chinese restaurant table draw: l = sum_{t=1}^{n} Bernoulli(r / (r + t - 1)).

inline count_t crt_sample(count_t n, double r, Rng& rng) {
  detail::require(r > 0.0 && std::isfinite(r), "crt_sample: r must be positive");
  detail::require(n >= 0, "crt_sample: n must be >= 0");
  if (n == 0) return 0;
  constexpr count_t kDirectLimit = 256;
  count_t l = 1;  // trial t = 1 succeeds with probability 1
  if (n <= kDirectLimit) {
    for (count_t t = 2; t <= n; ++t) {
      if (uniform01(rng) * (r + static_cast<double>(t) - 1.0) < r) ++l;
    }
    return l;
  }
  // Skip ahead between successes. From trial a on, the probability of no
  // success through trial b is Gamma(b) Gamma(r+a-1) / (Gamma(a-1) Gamma(r+b)).
  count_t a = 2;
  while (a <= n) {
    const double log_u = std::log(uniform01(rng));
    const double base = log_gamma(r + static_cast<double>(a) - 1.0) - log_gamma(static_cast<double>(a) - 1.0);
    auto log_survival = [&](count_t b) {
      return base + log_gamma(static_cast<double>(b)) - log_gamma(r + static_cast<double>(b));
    };
    if (log_survival(n) > log_u) break;  // no further success
    count_t lo = a;
    count_t hi = n;
    while (lo < hi) {
      const count_t mid = lo + (hi - lo) / 2;
      if (log_survival(mid) <= log_u) hi = mid; else lo = mid + 1;
    }
    ++l;
    a = lo + 1;
  }
  return l;
}

// ---------------------------------------------------------------------------
// logBeta(gamma0, c): p_* = sum_i lambda_i with lambda_i a compound Poisson
// sum of Pois(gamma0/(c+i)) Exp(c+i) jumps. The series is truncated at the
// first I with remaining mean gamma0 * trigamma(c + I + 1) below tol.

inline constexpr double kDefaultLogBetaTolerance = 1e-8;

inline double logbeta_sample(double gamma0, double c, Rng& rng, double tol = kDefaultLogBetaTolerance) {
  detail::require(gamma0 > 0.0 && std::isfinite(gamma0), "logbeta_sample: gamma0 must be positive");
  detail::require(c > 0.0 && std::isfinite(c), "logbeta_sample: c must be positive");
  detail::require(tol > 0.0, "logbeta_sample: tol must be positive");

  // Last index kept: smallest I with gamma0 * trigamma(c + I + 1) < tol.
  double last = 0.0;
  if (gamma0 * trigamma(c + 1.0) >= tol) {
    double hi = 1.0;
    while (gamma0 * trigamma(c + hi + 1.0) >= tol) hi *= 2.0;
    double lo = hi / 2.0;
    while (hi - lo > 0.5) {
      const double mid = std::floor(0.5 * (lo + hi));
      if (gamma0 * trigamma(c + mid + 1.0) < tol) hi = mid; else lo = mid;
      if (mid == lo && hi - lo <= 1.0) break;
    }
    last = hi;
  }

  constexpr double kDirect = 64.0;
  double total = 0.0;
  const double direct_end = std::min(last, kDirect - 1.0);
  for (double i = 0.0; i <= direct_end; i += 1.0) {
    const count_t jumps = poisson_variate(rng, gamma0 / (c + i));
    if (jumps > 0) total += gamma_variate(rng, static_cast<double>(jumps), 1.0 / (c + i));
  }
  if (last >= kDirect) {
    // Indices kDirect..last: jump count is Poisson with the summed rate, each
    // jump's index has probability proportional to 1/(c+i). Indices are drawn
    // from the continuous density 1/(c+x) on [a, b) and thinned.
    const double a = kDirect;
    const double b = last + 1.0;
    const count_t jumps = poisson_variate(rng, gamma0 * (digamma(c + b) - digamma(c + a)));
    const double log_span = std::log((c + b) / (c + a));
    auto weight = [c](double i) { return (1.0 / (c + i)) / std::log1p(1.0 / (c + i)); };
    const double bound = weight(a);
    for (count_t t = 0; t < jumps; ++t) {
      double i;
      do {
        const double x = (c + a) * std::exp(uniform01(rng) * log_span) - c;
        i = std::min(std::floor(x), last);
      } while (uniform01(rng) * bound >= weight(i));
      total += exponential_variate(rng, c + i);
    }
  }
  return std::max(total, std::numeric_limits<double>::min());
}

}  // namespace nbpm
