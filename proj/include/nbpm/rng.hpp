#pragma once

// Seeded random streams and the continuous / elementary discrete variates the
// count samplers are built from. Every sampler in the library takes an Rng&
// explicitly; nothing draws from global state.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "nbpm/error.hpp"

namespace nbpm {

using count_t = std::int64_t;
using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counts are clipped here; a draw this large only arises from parameters
// whose distribution has no finite mean.
inline constexpr count_t kMaxCount = count_t{1} << 52;

inline count_t clip_count(double x) {
  if (!(x < static_cast<double>(kMaxCount))) return kMaxCount;
  return static_cast<count_t>(x);
}

}  // namespace detail

// Independent stream for (seed, index); used for per-chain and per-job rngs.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index = 0) {
  const std::uint64_t a = detail::splitmix64(seed ^ detail::splitmix64(index + 0x632BE59BD9B4E019ull));
  const std::uint64_t b = detail::splitmix64(a + index);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

// Uniform on the open interval (0, 1).
inline double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double exponential_variate(Rng& rng, double rate) {
  return -std::log(uniform01(rng)) / rate;
}

inline double standard_normal(Rng& rng) {
  // Marsaglia polar method; one value per call keeps the stream stateless.
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s < 1.0 && s > 0.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

// log of a Gamma(shape, 1) variate. Working in log space keeps very small
// shapes (e.g. the 0.001 hyperparameters) from underflowing to zero.
inline double log_gamma_variate(Rng& rng, double shape) {
  detail::require(shape > 0.0 && std::isfinite(shape), "gamma variate: shape must be positive");
  double boost_log = 0.0;
  if (shape < 1.0) {
    boost_log = std::log(uniform01(rng)) / shape;
    shape += 1.0;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d * v) + boost_log;
    }
  }
}

// Gamma(shape, scale) with mean shape * scale. Results below the smallest
// normal double are returned as that value so the draw stays positive.
inline double gamma_variate(Rng& rng, double shape, double scale) {
  detail::require(scale > 0.0 && std::isfinite(scale), "gamma variate: scale must be positive");
  const double x = std::exp(log_gamma_variate(rng, shape)) * scale;
  return std::max(x, std::numeric_limits<double>::min());
}

// Beta(a, b) on the open interval (0, 1).
inline double beta_variate(Rng& rng, double a, double b) {
  const double la = log_gamma_variate(rng, a);
  const double lb = log_gamma_variate(rng, b);
  double p = 1.0 / (1.0 + std::exp(lb - la));
  if (p >= 1.0) p = std::nextafter(1.0, 0.0);
  if (p <= 0.0) p = std::numeric_limits<double>::min();
  return p;
}

inline count_t poisson_variate(Rng& rng, double lambda) {
  detail::require(lambda >= 0.0 && !std::isnan(lambda), "poisson variate: negative rate");
  if (lambda == 0.0) return 0;
  if (lambda > 1e15) return detail::clip_count(lambda + std::sqrt(lambda) * standard_normal(rng));
  std::poisson_distribution<count_t> dist(lambda);
  return dist(rng);
}

// Poisson(lambda) conditioned on a positive outcome.
inline count_t zero_truncated_poisson_variate(Rng& rng, double lambda) {
  detail::require(lambda > 0.0, "zero-truncated poisson: rate must be positive");
  if (lambda > 1.0) {
    for (;;) {
      const count_t k = poisson_variate(rng, lambda);
      if (k > 0) return k;
    }
  }
  // Inversion from k = 1 with P(k) = lambda^k / (k! (e^lambda - 1)).
  const double u = uniform01(rng);
  double term = lambda / std::expm1(lambda);
  double cdf = term;
  count_t k = 1;
  while (u > cdf && k < 1000) {
    ++k;
    term *= lambda / static_cast<double>(k);
    cdf += term;
  }
  return k;
}

inline count_t binomial_variate(Rng& rng, count_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<count_t> dist(trials, p);
  return dist(rng);
}

// Multinomial(total, weights / sum(weights)) by sequential conditional binomials.
inline std::vector<count_t> multinomial_variate(Rng& rng, count_t total, std::span<const double> weights) {
  std::vector<count_t> out(weights.size(), 0);
  double remaining_weight = 0.0;
  for (double w : weights) {
    detail::require(w >= 0.0, "multinomial: negative weight");
    remaining_weight += w;
  }
  detail::require(remaining_weight > 0.0 || total == 0, "multinomial: weights sum to zero");
  count_t remaining = total;
  for (std::size_t i = 0; i < weights.size() && remaining > 0; ++i) {
    if (i + 1 == weights.size()) {
      out[i] = remaining;
      break;
    }
    const double p = remaining_weight > 0.0 ? weights[i] / remaining_weight : 0.0;
    out[i] = binomial_variate(rng, remaining, std::min(p, 1.0));
    remaining -= out[i];
    remaining_weight -= weights[i];
  }
  return out;
}

}  // namespace nbpm
