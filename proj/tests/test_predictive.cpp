#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "nbpm/inference.hpp"
#include "nbpm/predictive.hpp"
#include "support/oracles.hpp"

#include <boost/math/special_functions/beta.hpp>

using namespace nbpm;

namespace {

CategoryModel nbp_model(std::vector<std::string> features, std::vector<count_t> sums, std::size_t J, double gamma0,
                        double c) {
  CategoryModel m;
  m.kind = Process::nbp;
  m.hyper = Hyperparameters::defaults(Process::nbp);
  m.rows = J;
  m.features = std::move(features);
  m.column_sums = std::move(sums);
  PosteriorSample s;
  s.gamma0 = gamma0;
  s.c = c;
  m.samples.push_back(s);
  return m;
}

std::vector<std::string> labels(std::size_t K, const std::string& prefix = "f") {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < K; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

// Model trained briefly on a small random matrix; its retained samples give
// realistic parameter values.
CategoryModel trained(Process kind, std::uint64_t seed, std::size_t samples = 3) {
  Rng rng = make_stream(seed);
  std::uniform_int_distribution<int> v(0, 3);
  std::vector<std::vector<count_t>> dense(4, std::vector<count_t>(5, 0));
  for (auto& row : dense)
    for (auto& x : row) x = v(rng);
  for (std::size_t k = 0; k < 5; ++k) dense[k % 4][k] += 1;
  CountMatrix m = CountMatrix::from_dense(dense);
  m.set_labels(labels(5));
  ChainConfig cfg;
  cfg.iterations = 50;
  cfg.samples = samples;
  cfg.seed = seed;
  return run_chain(kind, m, cfg).model;
}

double log_tail_nb(double r, double p, count_t nstar) {
  // P(n > N*) for NB(r, p) = I_p(N* + 1, r).
  return boost::math::ibeta(static_cast<double>(nstar) + 1.0, r, p);
}

}  // namespace

// --- alignment --------------------------------------------------------------

TEST(Align, DocumentedCases) {
  const FeatureIndex idx({"a", "b"});
  const AlignedRow empty = align(RowVector{}, idx);
  EXPECT_EQ(empty.existing, (std::vector<count_t>{0, 0}));
  EXPECT_EQ(empty.kplus(), 0u);
  const AlignedRow on = align(RowVector{{"b", 1}, {"a", 4}}, idx);
  EXPECT_EQ(on.existing, (std::vector<count_t>{4, 1}));
  EXPECT_EQ(on.kplus(), 0u);
  const AlignedRow mixed = align(RowVector{{"b", 2}, {"z", 1}}, idx);
  EXPECT_EQ(mixed.existing, (std::vector<count_t>{0, 2}));
  EXPECT_EQ(mixed.new_features, (std::vector<std::string>{"z"}));
  EXPECT_EQ(mixed.fresh, (std::vector<count_t>{1}));
}

TEST(Align, NewFeaturesKeepRowOrderAndRowVectorSums) {
  RowVector r;
  r.add("y", 2);
  r.add("x", 1);
  r.add("y", 3);
  r.add("w", 0);
  EXPECT_EQ(r.total(), 6);
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(r.count("y"), 5);
  EXPECT_EQ(r.count("w"), 0);
  EXPECT_THROW(r.add("q", -1), DomainError);
  const AlignedRow a = align(r, FeatureIndex({"x"}));
  EXPECT_EQ(a.new_features, (std::vector<std::string>{"y"}));
  EXPECT_EQ(a.fresh, (std::vector<count_t>{5}));
  EXPECT_EQ(a.existing, (std::vector<count_t>{1}));
}

// --- infinite mode ----------------------------------------------------------

TEST(PredictInfinite, NbpDocumentedExample) {
  // NB(3, 1/4) at zero, and Pois(0; ln((J+c+1)/(J+c))) = -ln(4/3).
  const CategoryModel m = nbp_model({"a"}, {3}, 2, 1.0, 1.0);
  EXPECT_NEAR(predict_row_loglik(m, RowVector{}), 3.0 * std::log(0.75) - std::log(4.0 / 3.0), 1e-13);
}

TEST(PredictInfinite, NbpTelescopes) {
  // predict = log f(N_{J+1}) - log f(N_J) + ln(K_{J+1}! / (K_J! K+!)) - ln K+!
  Rng rng = make_stream(31);
  std::uniform_int_distribution<count_t> v(0, 4);
  for (int t = 0; t < 100; ++t) {
    const std::size_t J = 1 + t % 3, K = 1 + t % 4, kplus = t % 3;
    std::vector<std::vector<count_t>> dense(J, std::vector<count_t>(K, 0));
    for (auto& row : dense)
      for (auto& x : row) x = v(rng);
    for (std::size_t k = 0; k < K; ++k) dense[0][k] += 1;
    CountMatrix nj = CountMatrix::from_dense(dense);
    nj.set_labels(labels(K));
    std::vector<count_t> existing(K), fresh(kplus);
    RowVector row;
    for (std::size_t k = 0; k < K; ++k) {
      existing[k] = v(rng);
      row.add("f" + std::to_string(k), existing[k]);
    }
    for (std::size_t i = 0; i < kplus; ++i) {
      fresh[i] = 1 + v(rng);
      row.add("new" + std::to_string(i), fresh[i]);
    }
    const double gamma0 = 0.5 + 0.1 * t, c = 0.3 + 0.05 * t;
    const ModelParams prm = ModelParams::nbp(gamma0, c);
    const CountMatrix nj1 = nj.append_row(existing, fresh);
    const double want = log_pmf(prm, nj1) - log_pmf(prm, nj) + log_factorial(K + kplus) - log_factorial(K) -
                        log_factorial(kplus) - log_factorial(kplus);
    const double got = predict_row_loglik(nbp_model(nj.labels(), nj.column_sums(), J, gamma0, c), row);
    EXPECT_NEAR(got, want, 1e-10 * std::max(1.0, std::abs(want))) << t;
  }
}

TEST(PredictInfinite, MatchesRowIncrementRulePerSample) {
  // Each sample's score is the appended-row rule at that sample's parameters
  // (with the plug-in p or EM r for the new row), divided by K+!.
  for (Process kind : {Process::gnbp, Process::bnbp}) {
    const CategoryModel model = trained(kind, kind == Process::gnbp ? 41 : 42);
    const Predictor pred(model);
    const RowVector row{{"f1", 2}, {"f3", 1}, {"x", 4}, {"y", 1}, {"z", 2}};
    const AlignedRow a = align(row, pred.index());
    for (std::size_t i = 0; i < model.samples.size(); ++i) {
      const PosteriorSample& s = model.samples[i];
      IncrementContext ctx;
      ctx.kind = kind;
      ctx.gamma0 = s.gamma0;
      ctx.c = s.c;
      ctx.row_mass = s.row_mass;
      if (kind == Process::gnbp) {
        ctx.new_param = (model.hyper.a0 + 10.0) / (model.hyper.a0 + model.hyper.b0 + 10.0 + s.total_mass);
        ctx.column_stat = s.table_sums;
      } else {
        ctx.new_param = pred.bnbp_row_dispersion(s, a);
        ctx.column_stat = model.column_sums;
      }
      const double want = appended_row_log_prob(ctx, a.existing, a.fresh) - log_factorial(3);
      EXPECT_NEAR(pred.sample_loglik(i, a), want, 1e-10 * std::abs(want)) << to_string(kind);
    }
  }
}

TEST(PredictInfinite, NbpNormalizesOverRows) {
  // One column, K+ <= 2, counts <= N*: mass missing is bounded by the tails.
  const double gamma0 = 0.6, c = 1.0;
  const std::size_t J = 2;
  const count_t nstar = 60, nk = 3;
  // The ordered law sums to one over ordered new-column sequences.
  PredictOptions ordered;
  ordered.kplus_correction = false;
  const Predictor pred(nbp_model({"a"}, {nk}, J, gamma0, c), ordered);
  std::vector<double> terms;
  for (count_t n = 0; n <= nstar; ++n) {
    RowVector base;
    base.add("a", n);
    terms.push_back(pred.predict(base));
    for (count_t x = 1; x <= nstar; ++x) {
      RowVector one = base;
      one.add("x", x);
      terms.push_back(pred.predict(one));
      for (count_t y = 1; y <= nstar; ++y) {
        RowVector two = one;
        two.add("y", y);
        terms.push_back(pred.predict(two));
      }
    }
  }
  const double total = std::exp(log_sum_exp(terms));
  const double p = 1.0 / (J + c + 1.0);
  const double rate = gamma0 * std::log1p(1.0 / (J + c));
  const double pois_tail = 1.0 - std::exp(-rate) * (1.0 + rate + rate * rate / 2.0);
  double log_tail = 0.0;
  for (count_t x = nstar + 1; x < 2000; ++x) log_tail += std::exp(x * std::log(p) - std::log(static_cast<double>(x))) / -std::log1p(-p);
  const double bound = pois_tail + log_tail_nb(static_cast<double>(nk), p, nstar) + 2.0 * log_tail;
  EXPECT_LE(total, 1.0 + 1e-12);
  EXPECT_GE(total, 1.0 - bound - 1e-12);
  // Without the K+ = 2 rows the sum would fall short by more than the bound.
  EXPECT_GT(rate * rate / 2.0 * std::exp(-rate), 10.0 * bound);
}

TEST(PredictInfinite, KplusCorrectionOnlyAffectsTwoOrMore) {
  for (Process kind : {Process::nbp, Process::gnbp, Process::bnbp}) {
    const CategoryModel model = trained(kind, 50);
    PredictOptions off;
    off.kplus_correction = false;
    const Predictor on_p(model), off_p(model, off);
    const RowVector r0{{"f0", 1}}, r1{{"f0", 1}, {"n1", 2}}, r3{{"f0", 1}, {"n1", 2}, {"n2", 1}, {"n3", 5}};
    EXPECT_EQ(on_p.predict(r0), off_p.predict(r0));
    EXPECT_EQ(on_p.predict(r1), off_p.predict(r1));
    EXPECT_NEAR(off_p.predict(r3) - on_p.predict(r3), std::log(6.0), 1e-12);
  }
}

TEST(PredictInfinite, MonteCarloAverageLiesBetweenSamples) {
  for (Process kind : {Process::nbp, Process::gnbp, Process::bnbp}) {
    const CategoryModel model = trained(kind, 60, 6);
    const RowVector row{{"f2", 3}, {"zz", 1}};
    PredictDiagnostics d;
    const double v = predict_row_loglik(model, row, {}, &d);
    ASSERT_EQ(d.per_sample.size(), 6u);
    EXPECT_LE(v, *std::max_element(d.per_sample.begin(), d.per_sample.end()) + 1e-12);
    EXPECT_GE(v, *std::min_element(d.per_sample.begin(), d.per_sample.end()) - 1e-12);
    EXPECT_EQ(d.kplus, 1u);
  }
}

TEST(PredictInfinite, NuisanceEstimates) {
  Hyperparameters h;
  EXPECT_DOUBLE_EQ(detail::gnbp_plugin_p(h, 7, 3.0), (h.a0 + 7.0) / (h.a0 + h.b0 + 10.0));
  CategoryModel model = trained(Process::bnbp, 70);
  const Predictor pred(model);
  const PosteriorSample& s = model.samples[0];
  const double denom = h.b0 + s.remainder + s.neg_log1m_weight_sum;
  // Empty row: l. = 1.
  EXPECT_NEAR(pred.bnbp_row_dispersion(s, align(RowVector{}, pred.index())), model.hyper.a0 / denom, 1e-14);
  // Nonempty row: twenty fixed-point steps from r = 1 over every positive count.
  const RowVector row{{"f0", 4}, {"q", 2}};
  double r = 1.0;
  for (int i = 0; i < 20; ++i) {
    const double l = r * (oracle::digamma(r + 4.0) - oracle::digamma(r)) + r * (oracle::digamma(r + 2.0) - oracle::digamma(r));
    r = (model.hyper.a0 - 1.0 + l) / denom;
  }
  EXPECT_NEAR(pred.bnbp_row_dispersion(s, align(row, pred.index())), r, 1e-10 * r);
}

TEST(PredictInfinite, OwnCategoryScoresHigher) {
  // Rows drawn from A's prediction rule versus a model with the same
  // statistics over a disjoint vocabulary.
  Rng rng = make_stream(80);
  const std::vector<count_t> sums{30, 12, 9, 7, 4, 3, 2, 1, 1, 1};
  const std::size_t J = 20;
  const Predictor a(nbp_model(labels(10, "a"), sums, J, 3.0, 1.0));
  const Predictor b(nbp_model(labels(10, "b"), sums, J, 3.0, 1.0));
  CountMatrix existing = CountMatrix::from_dense({{30, 12, 9, 7, 4, 3, 2, 1, 1, 1}});
  existing.set_labels(labels(10, "a"));
  int wins = 0, ties = 0;
  for (int t = 0; t < 1000; ++t) {
    // The rule depends on (J, c) only through J + c: a one-row matrix with
    // c' = c + J - 1 stands in for the J-row one.
    const NewRow nr = sample_next_row(ModelParams::nbp(3.0, static_cast<double>(J)), existing, nullptr, rng);
    RowVector row;
    for (std::size_t k = 0; k < nr.existing.size(); ++k) row.add("a" + std::to_string(k), nr.existing[k]);
    for (std::size_t i = 0; i < nr.fresh.size(); ++i) row.add("new" + std::to_string(i), nr.fresh[i]);
    const double sa = a.predict(row), sb = b.predict(row);
    wins += sa > sb;
    ties += sa == sb;
  }
  EXPECT_GE(wins, 950) << "ties=" << ties;
}

// --- finite mode ------------------------------------------------------------

TEST(PredictFinite, NbpNormalizesOverVocabulary) {
  // V = 2, one model column: sum over (n_a, n_b) of the finite-mode PMF is 1.
  PredictOptions opt;
  opt.mode = VocabularyMode::finite;
  opt.vocabulary_size = 2;
  const Predictor pred(nbp_model({"a"}, {2}, 3, 1.5, 0.5), opt);
  std::vector<double> terms;
  for (count_t x = 0; x <= 400; ++x)
    for (count_t y = 0; y <= 400; ++y) {
      RowVector row;
      row.add("a", x);
      row.add("b", y);
      terms.push_back(pred.predict(row));
    }
  EXPECT_NEAR(std::exp(log_sum_exp(terms)), 1.0, 1e-6);
}

TEST(PredictFinite, NbpMatchesSmoothedProduct) {
  // prod_v NB(n_v; n_.v + gamma0/V, 1/(J+c+1)) over V = 5 terms.
  PredictOptions opt;
  opt.mode = VocabularyMode::finite;
  opt.vocabulary_size = 5;
  const double gamma0 = 2.0, c = 1.5;
  const std::size_t J = 3;
  const Predictor pred(nbp_model({"a", "b"}, {4, 1}, J, gamma0, c), opt);
  const RowVector row{{"a", 2}, {"z", 3}};
  const double p = 1.0 / (J + c + 1.0), eps = gamma0 / 5.0;
  const double want = std::log(oracle::nb_pmf(2, 4 + eps, p)) + std::log(oracle::nb_pmf(0, 1 + eps, p)) +
                      std::log(oracle::nb_pmf(3, eps, p)) + 2.0 * std::log(oracle::nb_pmf(0, eps, p));
  EXPECT_NEAR(pred.predict(row), want, 1e-12);
}

TEST(PredictFinite, DiscardsOutOfVocabularyFeatures) {
  PredictOptions opt;
  opt.mode = VocabularyMode::finite;
  opt.vocabulary_size = 4;
  opt.vocabulary = std::make_shared<std::unordered_set<std::string>>(std::unordered_set<std::string>{"a", "b", "c", "d"});
  const Predictor pred(nbp_model({"a", "b"}, {4, 1}, 3, 2.0, 1.5), opt);
  PredictDiagnostics d;
  const double with_oov = pred.predict(RowVector{{"a", 1}, {"c", 2}, {"zzz", 7}, {"yyy", 1}}, &d);
  EXPECT_EQ(d.discarded_features, 2u);
  EXPECT_EQ(d.kplus, 1u);
  EXPECT_EQ(with_oov, pred.predict(RowVector{{"a", 1}, {"c", 2}}));
}

TEST(PredictFinite, RejectsSmallVocabulary) {
  PredictOptions opt;
  opt.mode = VocabularyMode::finite;
  opt.vocabulary_size = 1;
  EXPECT_THROW(Predictor(nbp_model({"a", "b"}, {4, 1}, 3, 2.0, 1.5), opt), DomainError);
  opt.vocabulary_size = 2;
  const Predictor pred(nbp_model({"a", "b"}, {4, 1}, 3, 2.0, 1.5), opt);
  EXPECT_THROW(pred.predict(RowVector{{"q", 1}}), DomainError);
}

TEST(PredictFinite, AllProcessesFinite) {
  for (Process kind : {Process::nbp, Process::gnbp, Process::bnbp}) {
    PredictOptions opt;
    opt.mode = VocabularyMode::finite;
    opt.vocabulary_size = 50;
    const CategoryModel model = trained(kind, 90);
    const double v = predict_row_loglik(model, RowVector{{"f0", 3}, {"new", 2}}, opt);
    EXPECT_TRUE(std::isfinite(v)) << to_string(kind);
    EXPECT_LT(v, 0.0);
  }
}

// --- persistence ------------------------------------------------------------

TEST(CategoryModelJson, RoundTrip) {
  for (Process kind : {Process::nbp, Process::gnbp, Process::bnbp}) {
    const CategoryModel model = trained(kind, 100);
    EXPECT_EQ(model_from_json(model_to_json(model)), model);
    const auto path = std::filesystem::temp_directory_path() / ("nbpm_model_" + to_string(kind) + ".json");
    save_model(model, path.string());
    EXPECT_EQ(load_model(path.string()), model);
    std::filesystem::remove(path);
  }
  EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"format":"other"})")), std::exception);
}
