#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <vector>

#include "nbpm/error.hpp"
#include "nbpm/special_functions.hpp"

namespace nbpm {

// Memoized table of g(n, l) = ln|s(n, l)| - ln(n!), where |s(n, l)| are the
// unsigned Stirling numbers of the first kind, for 1 <= l <= n.
//
// Rows are filled with the log-space recursion
//   g(n, 1) = g(n-1, 1) + ln((n-1)/n)
//   g(n, n) = g(n-1, n-1) - ln n
//   g(n, l) = ln((n-1)/n) + g(n-1, l)
//             + ln(1 + exp(g(n-1, l-1) - g(n-1, l) - ln(n-1)))   2 <= l <= n-1
// which never forms |s(n, l)| itself. The table grows on demand and a row,
// once published, is never modified, so spans handed out stay valid for the
// lifetime of the table.
class StirlingTable {
 public:
  StirlingTable() {
    rows_.emplace_back();          // n = 0 is unused
    rows_.push_back({kNegInf, 0.0});  // n = 1
  }

  StirlingTable(const StirlingTable&) = delete;
  StirlingTable& operator=(const StirlingTable&) = delete;

  // g(n, l). l = 0 gives -inf for n >= 1; l outside [0, n] is a domain error.
  double log_ratio(std::int64_t n, std::int64_t l) {
    if (n < 1) throw DomainError("stirling_log_ratio: n must be >= 1");
    if (l < 0 || l > n) throw DomainError("stirling_log_ratio: l must lie in [1, n]");
    if (l == 0) return kNegInf;
    return row(n)[static_cast<std::size_t>(l)];
  }

  // Row n as a span indexed by l in [0, n]; entry 0 is -inf.
  std::span<const double> row(std::int64_t n) {
    if (n < 1) throw DomainError("stirling row: n must be >= 1");
    const auto idx = static_cast<std::size_t>(n);
    {
      std::shared_lock lock(mutex_);
      if (idx < rows_.size()) return rows_[idx];
    }
    std::unique_lock lock(mutex_);
    while (rows_.size() <= idx) extend();
    return rows_[idx];
  }

  std::int64_t max_n() const {
    std::shared_lock lock(mutex_);
    return static_cast<std::int64_t>(rows_.size()) - 1;
  }

 private:
  void extend() {
    const std::size_t n = rows_.size();
    const std::vector<double>& prev = rows_[n - 1];
    std::vector<double> cur(n + 1, kNegInf);
    const double nd = static_cast<double>(n);
    const double log_shrink = std::log((nd - 1.0) / nd);
    const double log_nm1 = std::log(nd - 1.0);
    cur[1] = prev[1] + log_shrink;
    cur[n] = prev[n - 1] - std::log(nd);
    for (std::size_t l = 2; l < n; ++l) {
      cur[l] = log_shrink + prev[l] + std::log1p(std::exp(prev[l - 1] - prev[l] - log_nm1));
    }
    rows_.push_back(std::move(cur));
  }

  mutable std::shared_mutex mutex_;
  std::deque<std::vector<double>> rows_;
};

// Process-wide table shared by the PMFs.
inline StirlingTable& stirling_table() {
  static StirlingTable table;
  return table;
}

inline double stirling_log_ratio(std::int64_t n, std::int64_t l) {
  return stirling_table().log_ratio(n, l);
}

}  // namespace nbpm
