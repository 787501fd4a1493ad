// Simulates a two-category corpus, trains GNBP category models on 80% of it
// and classifies the rest.

#include <iostream>
#include <numeric>
#include <string>

#include "nbpm/nbpm.hpp"

namespace {

// Rows of a GNBP matrix as documents; column k becomes token "<prefix><k>".
void add_category(nbpm::Corpus& corpus, const std::string& label, const std::string& prefix, double gamma0,
                  double p, std::size_t rows, nbpm::Rng& rng) {
  const auto params = nbpm::ModelParams::gnbp(gamma0, 1.0, std::vector<double>(rows, p));
  const nbpm::CountMatrix m = nbpm::simulate_columnwise(params, rows, rng).counts;
  const auto dense = m.dense();
  for (std::size_t j = 0; j < rows; ++j) {
    nbpm::Document d;
    d.id = label + "-" + std::to_string(j + 1);
    d.label = label;
    for (std::size_t k = 0; k < m.cols(); ++k)
      if (dense[j][k] > 0) d.counts.add(prefix + std::to_string(k % 40), dense[j][k]);
    corpus.documents.push_back(std::move(d));
  }
}

}  // namespace

int main() {
  nbpm::Rng rng = nbpm::make_stream(2024);
  nbpm::Corpus corpus;
  add_category(corpus, "sports", "w", 30.0, 0.6, 60, rng);
  add_category(corpus, "politics", "w", 30.0, 0.6, 60, rng);

  const nbpm::CorpusSplit split = nbpm::split_corpus(corpus, 0.8, 7);
  nbpm::TrainOptions opt;
  opt.kind = nbpm::Process::gnbp;
  opt.chain.iterations = 300;
  opt.chain.samples = 5;
  const nbpm::Classifier clf(nbpm::train_bundle(split.train, opt));

  const nbpm::EvaluationReport r = nbpm::evaluate(clf, split.test.documents);
  std::cout << nbpm::format_report(r, "gnbp");

  const nbpm::MultinomialBaseline base(split.train);
  std::cout << nbpm::format_report(nbpm::evaluate(base, clf.bundle().labels, split.test.documents),
                                   "multinomial-laplace");
}
