#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nbpm/error.hpp"
#include "nbpm/rng.hpp"

namespace nbpm {

struct MatrixEntry {
  std::size_t row;
  count_t count;

  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

// Sparse J x K count matrix stored by column. Each column keeps its positive
// entries sorted by row and carries an opaque feature label. Columns with no
// positive entry are rejected.
class CountMatrix {
 public:
  using Column = std::vector<MatrixEntry>;

  CountMatrix() = default;
  explicit CountMatrix(std::size_t rows) : rows_(rows) {}

  // Dense constructor: dense[j][k]. Columns summing to zero are an error.
  static CountMatrix from_dense(const std::vector<std::vector<count_t>>& dense) {
    CountMatrix m(dense.size());
    const std::size_t cols = dense.empty() ? 0 : dense.front().size();
    for (const auto& row : dense) detail::require(row.size() == cols, "from_dense: ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      Column col;
      for (std::size_t j = 0; j < dense.size(); ++j) {
        if (dense[j][k] != 0) col.push_back({j, dense[j][k]});
      }
      m.add_column(std::move(col));
    }
    return m;
  }

  // Appends a column. Entries may be given in any order; zero counts are
  // dropped; the result must contain at least one positive count.
  void add_column(Column col, std::string label = {}) {
    std::sort(col.begin(), col.end(), [](const MatrixEntry& a, const MatrixEntry& b) { return a.row < b.row; });
    Column kept;
    kept.reserve(col.size());
    count_t sum = 0;
    for (const auto& e : col) {
      detail::require(e.row < rows_, "add_column: row index out of range");
      detail::require(e.count >= 0, "add_column: negative count");
      if (e.count == 0) continue;
      detail::require(kept.empty() || kept.back().row != e.row, "add_column: duplicate row");
      kept.push_back(e);
      sum += e.count;
    }
    detail::require(sum > 0, "add_column: column has no positive count");
    cols_.push_back(std::move(kept));
    sums_.push_back(sum);
    labels_.push_back(label.empty() ? std::to_string(cols_.size() - 1) : std::move(label));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_.size(); }
  bool empty() const noexcept { return cols_.empty(); }

  const Column& column(std::size_t k) const { return cols_.at(k); }
  count_t column_sum(std::size_t k) const { return sums_.at(k); }
  const std::vector<count_t>& column_sums() const noexcept { return sums_; }
  const std::string& label(std::size_t k) const { return labels_.at(k); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  void set_labels(std::vector<std::string> labels) {
    detail::require(labels.size() == cols_.size(), "set_labels: label count must equal column count");
    labels_ = std::move(labels);
  }

  count_t at(std::size_t j, std::size_t k) const {
    const auto& col = cols_.at(k);
    auto it = std::lower_bound(col.begin(), col.end(), j,
                               [](const MatrixEntry& e, std::size_t r) { return e.row < r; });
    return (it != col.end() && it->row == j) ? it->count : 0;
  }

  count_t total() const { return std::accumulate(sums_.begin(), sums_.end(), count_t{0}); }

  count_t max_count() const {
    count_t best = 0;
    for (const auto& col : cols_)
      for (const auto& e : col) best = std::max(best, e.count);
    return best;
  }

  std::vector<count_t> row_sums() const {
    std::vector<count_t> out(rows_, 0);
    for (const auto& col : cols_)
      for (const auto& e : col) out[e.row] += e.count;
    return out;
  }

  std::vector<std::vector<count_t>> dense() const {
    std::vector<std::vector<count_t>> out(rows_, std::vector<count_t>(cols_.size(), 0));
    for (std::size_t k = 0; k < cols_.size(); ++k)
      for (const auto& e : cols_[k]) out[e.row][k] = e.count;
    return out;
  }

  // First `j` rows, with columns that become empty removed.
  CountMatrix prefix_rows(std::size_t j) const {
    detail::require(j <= rows_, "prefix_rows: more rows than the matrix has");
    CountMatrix out(j);
    for (std::size_t k = 0; k < cols_.size(); ++k) {
      Column col;
      for (const auto& e : cols_[k])
        if (e.row < j) col.push_back(e);
      if (!col.empty()) out.add_column(std::move(col), labels_[k]);
    }
    return out;
  }

  // Matrix with the columns reordered: column i of the result is column order[i].
  CountMatrix permute_columns(const std::vector<std::size_t>& order) const {
    detail::require(order.size() == cols_.size(), "permute_columns: order must cover every column");
    CountMatrix out(rows_);
    for (std::size_t k : order) out.add_column(cols_.at(k), labels_.at(k));
    return out;
  }

  CountMatrix permute_rows(const std::vector<std::size_t>& perm) const {
    detail::require(perm.size() == rows_, "permute_rows: permutation length must equal row count");
    CountMatrix out(rows_);
    for (std::size_t k = 0; k < cols_.size(); ++k) {
      Column col;
      for (const auto& e : cols_[k]) col.push_back({perm.at(e.row), e.count});
      out.add_column(std::move(col), labels_[k]);
    }
    return out;
  }

  // Appends a row: `existing` gives counts over the current columns (zeros
  // allowed), `fresh` gives the counts of new columns, appended on the right.
  CountMatrix append_row(const std::vector<count_t>& existing, const std::vector<count_t>& fresh,
                         const std::vector<std::string>& fresh_labels = {}) const {
    detail::require(existing.size() == cols_.size(), "append_row: existing part must cover every column");
    CountMatrix out(rows_ + 1);
    for (std::size_t k = 0; k < cols_.size(); ++k) {
      Column col = cols_[k];
      detail::require(existing[k] >= 0, "append_row: negative count");
      if (existing[k] > 0) col.push_back({rows_, existing[k]});
      out.add_column(std::move(col), labels_[k]);
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      detail::require(fresh[i] >= 1, "append_row: new column counts must be >= 1");
      out.add_column({{rows_, fresh[i]}}, i < fresh_labels.size() ? fresh_labels[i] : std::string{});
    }
    return out;
  }

  // Same shape and entries; labels are ignored.
  bool same_counts(const CountMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const CountMatrix& a, const CountMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.labels_ == b.labels_;
  }

 private:
  std::size_t rows_ = 0;
  std::vector<Column> cols_;
  std::vector<count_t> sums_;
  std::vector<std::string> labels_;
};

// Count matrix paired with latent table counts of identical sparsity:
// tables.at(j,k) lies in [1, counts.at(j,k)] wherever counts.at(j,k) > 0.
struct AugmentedMatrix {
  CountMatrix counts;
  CountMatrix tables;
};

inline void validate(const AugmentedMatrix& aug) {
  const auto& n = aug.counts;
  const auto& l = aug.tables;
  detail::require(n.rows() == l.rows() && n.cols() == l.cols(), "augmented matrix: shape mismatch");
  for (std::size_t k = 0; k < n.cols(); ++k) {
    const auto& cn = n.column(k);
    const auto& cl = l.column(k);
    detail::require(cn.size() == cl.size(), "augmented matrix: table counts must share the count sparsity");
    for (std::size_t i = 0; i < cn.size(); ++i) {
      detail::require(cn[i].row == cl[i].row, "augmented matrix: table counts must share the count sparsity");
      detail::require(cl[i].count >= 1 && cl[i].count <= cn[i].count, "augmented matrix: need 1 <= l_jk <= n_jk");
    }
  }
}

inline AugmentedMatrix make_augmented(CountMatrix counts, CountMatrix tables) {
  AugmentedMatrix aug{std::move(counts), std::move(tables)};
  validate(aug);
  return aug;
}

// ---------------------------------------------------------------------------
// Canonical form: columns sorted lexicographically by their dense count
// sequence (row 0 first). Two matrices are equal as unordered-column matrices
// iff their canonical forms have the same counts.

namespace detail {

inline bool column_less(const CountMatrix::Column& a, const CountMatrix::Column& b) {
  // Lexicographic comparison of the dense sequences, computed on the sparse form.
  std::size_t i = 0;
  for (; i < a.size() && i < b.size(); ++i) {
    if (a[i].row != b[i].row) return a[i].row > b[i].row;  // a has a nonzero earlier: a is larger
    if (a[i].count != b[i].count) return a[i].count < b[i].count;
  }
  if (i == a.size() && i == b.size()) return false;
  return i == a.size();  // a ran out first: its next entry is a zero where b is positive
}

inline std::vector<std::size_t> canonical_order(const CountMatrix& m) {
  std::vector<std::size_t> order(m.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&m](std::size_t a, std::size_t b) { return column_less(m.column(a), m.column(b)); });
  return order;
}

}  // namespace detail

inline CountMatrix canonical_form(const CountMatrix& m) { return m.permute_columns(detail::canonical_order(m)); }

inline AugmentedMatrix canonical_form(const AugmentedMatrix& aug) {
  // Order by (counts, tables) so that the pair is canonical jointly.
  std::vector<std::size_t> order(aug.counts.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&aug](std::size_t a, std::size_t b) {
    const auto& na = aug.counts.column(a);
    const auto& nb = aug.counts.column(b);
    if (detail::column_less(na, nb)) return true;
    if (detail::column_less(nb, na)) return false;
    return detail::column_less(aug.tables.column(a), aug.tables.column(b));
  });
  return {aug.counts.permute_columns(order), aug.tables.permute_columns(order)};
}

// Compact string key of the canonical form, for histogramming matrices.
inline std::string canonical_key(const CountMatrix& m) {
  const CountMatrix c = canonical_form(m);
  std::string key = std::to_string(c.rows()) + ":";
  for (std::size_t k = 0; k < c.cols(); ++k) {
    if (k) key += '|';
    for (const auto& e : c.column(k)) {
      key += std::to_string(e.row);
      key += '=';
      key += std::to_string(e.count);
      key += ',';
    }
  }
  return key;
}

inline std::string canonical_key(const AugmentedMatrix& aug) {
  const AugmentedMatrix c = canonical_form(aug);
  std::string key = std::to_string(c.counts.rows()) + ":";
  for (std::size_t k = 0; k < c.counts.cols(); ++k) {
    if (k) key += '|';
    const auto& cn = c.counts.column(k);
    const auto& cl = c.tables.column(k);
    for (std::size_t i = 0; i < cn.size(); ++i) {
      key += std::to_string(cn[i].row) + '=' + std::to_string(cn[i].count) + '/' + std::to_string(cl[i].count) + ',';
    }
  }
  return key;
}

// ---------------------------------------------------------------------------
// Triplet text format: header "J K", then one "j k n" line per positive entry
// (0-indexed), ordered by row then column. Labels go to a sidecar, one per line.

inline void write_triplets(std::ostream& out, const CountMatrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  struct Triplet {
    std::size_t j, k;
    count_t n;
  };
  std::vector<Triplet> all;
  for (std::size_t k = 0; k < m.cols(); ++k)
    for (const auto& e : m.column(k)) all.push_back({e.row, k, e.count});
  std::sort(all.begin(), all.end(), [](const Triplet& a, const Triplet& b) {
    return a.j != b.j ? a.j < b.j : a.k < b.k;
  });
  for (const auto& t : all) out << t.j << ' ' << t.k << ' ' << t.n << '\n';
}

inline void write_labels(std::ostream& out, const CountMatrix& m) {
  for (const auto& l : m.labels()) out << l << '\n';
}

inline CountMatrix read_triplets(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("triplet file: missing header", 0);
  std::size_t rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    hs >> rows >> cols;
    std::string extra;
    if (!hs || (hs >> extra)) throw ParseError("triplet file: header must be 'J K'", line_no);
  }
  std::vector<CountMatrix::Column> columns(cols);
  while (next_line()) {
    std::istringstream ls(line);
    long long j = -1, k = -1, n = 0;
    std::string extra;
    ls >> j >> k >> n;
    if (!ls || (ls >> extra)) throw ParseError("triplet file: expected 'j k n'", line_no);
    if (j < 0 || static_cast<std::size_t>(j) >= rows || k < 0 || static_cast<std::size_t>(k) >= cols)
      throw ParseError("triplet file: index out of range", line_no);
    if (n <= 0) throw ParseError("triplet file: counts must be positive", line_no);
    columns[static_cast<std::size_t>(k)].push_back({static_cast<std::size_t>(j), n});
  }
  CountMatrix m(rows);
  for (std::size_t k = 0; k < cols; ++k) {
    if (columns[k].empty()) throw ParseError("triplet file: column " + std::to_string(k) + " has no entries", 0);
    try {
      m.add_column(std::move(columns[k]));
    } catch (const DomainError& e) {
      throw ParseError(std::string("triplet file: ") + e.what(), 0);
    }
  }
  return m;
}

inline std::vector<std::string> read_labels(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

}  // namespace nbpm
