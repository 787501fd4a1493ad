#pragma once

// Labeled bag-of-words corpora: the uci-bow and sparse-tsv formats,
// stratified train/test splits, and per-category count matrices.
//
// uci-bow: a docword file
//     D
//     W
//     NNZ
//     docID wordID count      (NNZ lines, 1-indexed)
// plus a vocabulary file (token of wordID w on line w) and a label file of
// "docID label" lines.
//
// sparse-tsv: one document per line, "docID<TAB>label<TAB>token:count,...".

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nbpm/count_matrix.hpp"
#include "nbpm/error.hpp"
#include "nbpm/predictive.hpp"
#include "nbpm/rng.hpp"

namespace nbpm {

struct Document {
  std::string id;
  std::string label;
  RowVector counts;

  friend bool operator==(const Document& a, const Document& b) {
    return a.id == b.id && a.label == b.label && a.counts == b.counts;
  }
};

struct Corpus {
  std::vector<Document> documents;
  std::optional<std::vector<std::string>> vocabulary;

  // Distinct labels in order of first appearance.
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& d : documents)
      if (seen.insert(d.label).second) out.push_back(d.label);
    return out;
  }

  std::vector<const Document*> with_label(const std::string& label) const {
    std::vector<const Document*> out;
    for (const auto& d : documents)
      if (d.label == label) out.push_back(&d);
    return out;
  }

  void validate(bool require_labels = true) const {
    std::unordered_set<std::string> ids;
    for (const auto& d : documents) {
      detail::require(ids.insert(d.id).second, "corpus: duplicate document id '" + d.id + "'");
      if (require_labels) detail::require(!d.label.empty(), "corpus: document '" + d.id + "' has no label");
    }
    if (vocabulary) {
      std::unordered_set<std::string> vocab(vocabulary->begin(), vocabulary->end());
      for (const auto& d : documents)
        for (const auto& [f, n] : d.counts.entries())
          detail::require(vocab.count(f) > 0, "corpus: feature '" + f + "' is not in the declared vocabulary");
    }
  }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.documents == b.documents && a.vocabulary == b.vocabulary;
  }
};

enum class CorpusFormat { uci_bow, sparse_tsv };

inline CorpusFormat parse_corpus_format(const std::string& s) {
  if (s == "uci-bow") return CorpusFormat::uci_bow;
  if (s == "sparse-tsv") return CorpusFormat::sparse_tsv;
  throw DomainError("unknown corpus format '" + s + "' (expected uci-bow or sparse-tsv)");
}

// File locations of a uci-bow corpus. An empty label path leaves every
// document unlabeled.
struct UciBowPaths {
  std::string docword;
  std::string vocab;
  std::string labels;

  // docword.txt, vocab.txt and labels.txt inside `dir`.
  static UciBowPaths in_directory(const std::string& dir) {
    const std::filesystem::path p(dir);
    return {(p / "docword.txt").string(), (p / "vocab.txt").string(), (p / "labels.txt").string()};
  }
};

namespace detail {

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

inline bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

inline long long parse_integer(const std::string& tok, std::size_t line, const char* what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string("expected an integer ") + what + ", got '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError(std::string("expected an integer ") + what + ", got '" + tok + "'", line);
  return v;
}

}  // namespace detail

inline Corpus load_uci_bow(const UciBowPaths& paths) {
  Corpus corpus;
  auto in = detail::open_in(paths.docword);
  std::string line;
  std::size_t line_no = 0;
  long long header[3];
  for (int h = 0; h < 3; ++h) {
    if (!std::getline(in, line)) throw ParseError("docword: truncated header", line_no + 1);
    ++line_no;
    std::istringstream ls(line);
    std::string tok, extra;
    if (!(ls >> tok) || (ls >> extra)) throw ParseError("docword: header lines hold one integer each", line_no);
    header[h] = detail::parse_integer(tok, line_no, "in header");
    if (header[h] < 0) throw ParseError("docword: negative header value", line_no);
  }
  const auto D = static_cast<std::size_t>(header[0]);
  const auto W = static_cast<std::size_t>(header[1]);
  const auto NNZ = static_cast<std::size_t>(header[2]);

  std::vector<std::string> vocab;
  {
    auto vin = detail::open_in(paths.vocab);
    while (std::getline(vin, line)) vocab.push_back(detail::strip_cr(line));
    while (!vocab.empty() && vocab.back().empty()) vocab.pop_back();
  }
  if (vocab.size() != W)
    throw ParseError("vocabulary has " + std::to_string(vocab.size()) + " tokens but the header says W = " +
                         std::to_string(W),
                     0);

  corpus.documents.resize(D);
  for (std::size_t d = 0; d < D; ++d) corpus.documents[d].id = std::to_string(d + 1);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    std::istringstream ls(line);
    std::string a, b, c, extra;
    if (!(ls >> a >> b >> c) || (ls >> extra)) throw ParseError("docword: expected 'docID wordID count'", line_no);
    const long long doc = detail::parse_integer(a, line_no, "docID");
    const long long word = detail::parse_integer(b, line_no, "wordID");
    const long long n = detail::parse_integer(c, line_no, "count");
    if (doc < 1 || static_cast<std::size_t>(doc) > D) throw ParseError("docword: docID out of range", line_no);
    if (word < 1 || static_cast<std::size_t>(word) > W) throw ParseError("docword: wordID out of range", line_no);
    if (n <= 0) throw ParseError("docword: counts must be positive", line_no);
    corpus.documents[static_cast<std::size_t>(doc - 1)].counts.add(vocab[static_cast<std::size_t>(word - 1)], n);
    ++seen;
  }
  if (seen != NNZ)
    throw ParseError("docword: header says NNZ = " + std::to_string(NNZ) + " but " + std::to_string(seen) +
                         " entries were read",
                     0);

  if (!paths.labels.empty()) {
    auto lin = detail::open_in(paths.labels);
    std::size_t lno = 0;
    while (std::getline(lin, line)) {
      ++lno;
      if (detail::blank(line)) continue;
      std::istringstream ls(detail::strip_cr(line));
      std::string a, label, extra;
      if (!(ls >> a >> label) || (ls >> extra)) throw ParseError("labels: expected 'docID label'", lno);
      const long long doc = detail::parse_integer(a, lno, "docID");
      if (doc < 1 || static_cast<std::size_t>(doc) > D) throw ParseError("labels: docID out of range", lno);
      auto& slot = corpus.documents[static_cast<std::size_t>(doc - 1)].label;
      if (!slot.empty()) throw ParseError("labels: docID listed twice", lno);
      slot = label;
    }
  }
  corpus.vocabulary = std::move(vocab);
  return corpus;
}

// Writes the corpus with documents numbered 1..D in order. Features missing
// from the declared vocabulary are appended to it.
inline void save_uci_bow(const Corpus& corpus, const UciBowPaths& paths) {
  std::vector<std::string> vocab = corpus.vocabulary.value_or(std::vector<std::string>{});
  std::unordered_map<std::string, std::size_t> ids;
  for (std::size_t w = 0; w < vocab.size(); ++w) ids.emplace(vocab[w], w + 1);
  std::size_t nnz = 0;
  for (const auto& d : corpus.documents) {
    for (const auto& [f, n] : d.counts.entries()) {
      (void)n;
      if (ids.emplace(f, vocab.size() + 1).second) vocab.push_back(f);
      ++nnz;
    }
  }
  auto out = detail::open_out(paths.docword);
  out << corpus.documents.size() << '\n' << vocab.size() << '\n' << nnz << '\n';
  for (std::size_t d = 0; d < corpus.documents.size(); ++d)
    for (const auto& [f, n] : corpus.documents[d].counts.entries()) out << d + 1 << ' ' << ids.at(f) << ' ' << n << '\n';
  auto vout = detail::open_out(paths.vocab);
  for (const auto& t : vocab) vout << t << '\n';
  if (!paths.labels.empty()) {
    auto lout = detail::open_out(paths.labels);
    for (std::size_t d = 0; d < corpus.documents.size(); ++d)
      if (!corpus.documents[d].label.empty()) lout << d + 1 << ' ' << corpus.documents[d].label << '\n';
  }
}

inline Corpus load_sparse_tsv(const std::string& path) {
  Corpus corpus;
  auto in = detail::open_in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (detail::blank(line)) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError("sparse-tsv: expected 'docID<TAB>label<TAB>features'", line_no);
    Document doc;
    doc.id = line.substr(0, t1);
    doc.label = line.substr(t1 + 1, t2 - t1 - 1);
    if (doc.id.empty()) throw ParseError("sparse-tsv: empty document id", line_no);
    const std::string feats = line.substr(t2 + 1);
    if (feats.find('\t') != std::string::npos) throw ParseError("sparse-tsv: too many fields", line_no);
    std::size_t pos = 0;
    while (pos < feats.size()) {
      auto comma = feats.find(',', pos);
      if (comma == std::string::npos) comma = feats.size();
      const std::string item = feats.substr(pos, comma - pos);
      const auto colon = item.rfind(':');
      if (colon == std::string::npos || colon == 0)
        throw ParseError("sparse-tsv: expected token:count, got '" + item + "'", line_no);
      const long long n = detail::parse_integer(item.substr(colon + 1), line_no, "count");
      if (n <= 0) throw ParseError("sparse-tsv: counts must be positive", line_no);
      doc.counts.add(item.substr(0, colon), n);
      pos = comma + 1;
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

inline void save_sparse_tsv(const Corpus& corpus, const std::string& path) {
  auto out = detail::open_out(path);
  for (const auto& d : corpus.documents) {
    detail::require(d.id.find_first_of("\t\n") == std::string::npos, "sparse-tsv: document id holds a tab or newline");
    detail::require(d.label.find_first_of("\t\n") == std::string::npos, "sparse-tsv: label holds a tab or newline");
    out << d.id << '\t' << d.label << '\t';
    bool first = true;
    for (const auto& [f, n] : d.counts.entries()) {
      detail::require(f.find_first_of(",\t\n") == std::string::npos, "sparse-tsv: token '" + f + "' holds a separator");
      if (!first) out << ',';
      out << f << ':' << n;
      first = false;
    }
    out << '\n';
  }
}

// For uci-bow, `path` is a directory holding docword.txt, vocab.txt and
// labels.txt (the label file may be absent).
inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
  if (format == CorpusFormat::sparse_tsv) return load_sparse_tsv(path);
  UciBowPaths p = UciBowPaths::in_directory(path);
  if (!std::filesystem::exists(p.labels)) p.labels.clear();
  return load_uci_bow(p);
}

inline void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format) {
  if (format == CorpusFormat::sparse_tsv) return save_sparse_tsv(corpus, path);
  std::filesystem::create_directories(path);
  save_uci_bow(corpus, UciBowPaths::in_directory(path));
}

// ---------------------------------------------------------------------------

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

// Stratified split: within each label, max(1, round(fraction * J)) documents
// drawn uniformly go to training. Documents keep their corpus order.
inline CorpusSplit split_corpus(const Corpus& corpus, double fraction, std::uint64_t seed) {
  detail::require(fraction > 0.0 && fraction < 1.0, "split: fraction must lie in (0, 1)");
  Rng rng = make_stream(seed, 0x5eed);
  std::vector<char> in_train(corpus.documents.size(), 0);
  for (const auto& label : corpus.labels()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i)
      if (corpus.documents[i].label == label) idx.push_back(i);
    detail::require(!idx.empty(), "split: category '" + label + "' has no documents");
    const auto n_train = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * idx.size())));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < n_train && i < idx.size(); ++i) in_train[idx[i]] = 1;
  }
  CorpusSplit out;
  out.train.vocabulary = corpus.vocabulary;
  out.test.vocabulary = corpus.vocabulary;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i)
    (in_train[i] ? out.train : out.test).documents.push_back(corpus.documents[i]);
  return out;
}

// Count matrix of the given documents: one row per document, one column per
// feature present, columns in order of first appearance, labeled by feature.
inline CountMatrix build_matrix(const std::vector<const Document*>& docs) {
  std::unordered_map<std::string, std::size_t> col_of;
  std::vector<std::string> features;
  std::vector<CountMatrix::Column> cols;
  for (std::size_t j = 0; j < docs.size(); ++j) {
    for (const auto& [f, n] : docs[j]->counts.entries()) {
      auto [it, fresh] = col_of.emplace(f, features.size());
      if (fresh) {
        features.push_back(f);
        cols.emplace_back();
      }
      cols[it->second].push_back({j, n});
    }
  }
  CountMatrix m(docs.size());
  for (std::size_t k = 0; k < cols.size(); ++k) m.add_column(std::move(cols[k]), features[k]);
  return m;
}

inline CountMatrix build_matrix(const Corpus& corpus, const std::string& label) {
  return build_matrix(corpus.with_label(label));
}

}  // namespace nbpm
