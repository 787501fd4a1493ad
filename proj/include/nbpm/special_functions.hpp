#pragma once

// Log-gamma and polygamma functions for positive real arguments, plus the
// log-space reductions used throughout the library.
//
// All four functions shift the argument upward with the standard recurrence
// until it is at least kAsymptoticThreshold and then evaluate the Stirling /
// de Moivre asymptotic series. Accuracy is about 1e-15 absolute for
// log_gamma and about 1e-14 relative for the polygammas on (0, 1e300).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>

#include "nbpm/error.hpp"

namespace nbpm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

namespace detail {

inline constexpr double kAsymptoticThreshold = 15.0;

}  // namespace detail

inline double log_gamma(double x) {
  if (!(x > 0.0)) {
    if (std::isnan(x)) return x;
    throw DomainError("log_gamma: argument must be positive");
  }
  double shift = 0.0;  // log of x (x+1) ... (x+m-1)
  if (x < detail::kAsymptoticThreshold) {
    double product = 1.0;
    while (x < detail::kAsymptoticThreshold) {
      product *= x;
      x += 1.0;
    }
    shift = std::log(product);
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 +
                                                     inv2 * (1.0 / 156.0)))))));
  constexpr double half_log_two_pi = 0.91893853320467274178032973640562;
  return (x - 0.5) * std::log(x) - x + half_log_two_pi + series - shift;
}

inline double digamma(double x) {
  if (!(x > 0.0)) {
    if (std::isnan(x)) return x;
    throw DomainError("digamma: argument must be positive");
  }
  double acc = 0.0;
  while (x < detail::kAsymptoticThreshold) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (-1.0 / 12.0 +
              inv2 * (1.0 / 120.0 +
                      inv2 * (-1.0 / 252.0 +
                              inv2 * (1.0 / 240.0 +
                                      inv2 * (-1.0 / 132.0 +
                                              inv2 * (691.0 / 32760.0 +
                                                      inv2 * (-1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv + series;
}

// First derivative of digamma.
inline double trigamma(double x) {
  if (!(x > 0.0)) {
    if (std::isnan(x)) return x;
    throw DomainError("trigamma: argument must be positive");
  }
  double acc = 0.0;
  while (x < detail::kAsymptoticThreshold) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * inv2 *
      (1.0 / 6.0 +
       inv2 * (-1.0 / 30.0 +
               inv2 * (1.0 / 42.0 +
                       inv2 * (-1.0 / 30.0 +
                               inv2 * (5.0 / 66.0 +
                                       inv2 * (-691.0 / 2730.0 + inv2 * (7.0 / 6.0)))))));
  return acc + inv + 0.5 * inv2 + series;
}

// Second derivative of digamma (negative on the positive axis).
inline double tetragamma(double x) {
  if (!(x > 0.0)) {
    if (std::isnan(x)) return x;
    throw DomainError("tetragamma: argument must be positive");
  }
  double acc = 0.0;
  while (x < detail::kAsymptoticThreshold) {
    acc -= 2.0 / (x * x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * inv2 * inv2 *
      (1.0 / 6.0 +
       inv2 * (-1.0 / 6.0 +
               inv2 * (3.0 / 10.0 +
                       inv2 * (-5.0 / 6.0 + inv2 * (8983.0 / 2730.0)))));
  return acc - inv2 - inv * inv2 - 0.5 * inv2 * inv2 + series;
}

// Exponential integral E1(x) = int_x^inf e^{-t} / t dt for x > 0.
inline double exponential_integral_e1(double x) {
  if (!(x > 0.0)) throw DomainError("exponential_integral_e1: argument must be positive");
  constexpr double euler_gamma = 0.57721566490153286060651209008240;
  if (x <= 1.0) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= -x / k;
      const double add = term / k;
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(x) - sum;
  }
  // Lentz continued fraction for e^x E1(x).
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

inline double log_factorial(std::int64_t n) {
  if (n < 0) throw DomainError("log_factorial: negative argument");
  if (n < 2) return 0.0;
  return log_gamma(static_cast<double>(n) + 1.0);
}

// ln(1 + x / c) for x >= 0, c > 0, finite even when x / c overflows.
inline double log1p_ratio(double x, double c) {
  const double r = x / c;
  return std::isfinite(r) ? std::log1p(r) : std::log(x) - std::log(c);
}

// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == kNegInf) return kNegInf;
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double top = *std::max_element(values.begin(), values.end());
  if (top == kNegInf) return kNegInf;
  if (std::isinf(top)) return top;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

// log((1/n) sum_i exp(v_i)).
inline double log_mean_exp(std::span<const double> values) {
  if (values.empty()) throw DomainError("log_mean_exp: empty input");
  return log_sum_exp(values) - std::log(static_cast<double>(values.size()));
}

}  // namespace nbpm
