// Acceptance checks: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance            run every criterion
//   acceptance 4 8        run only criteria 4 and 8
//
// Criterion 12 needs NBPM_20NG_DIR pointing at a directory with train/ and
// test/ uci-bow subdirectories; it is skipped otherwise. The exit status is
// the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nbpm/nbpm.hpp"
#include "support/generative.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace nbpm;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::fail;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Status::pass : Status::fail, detail}; }

const std::vector<Process> kProcesses{Process::nbp, Process::gnbp, Process::bnbp};

// --- 1 ----------------------------------------------------------------------

Outcome stirling_identity() {
  // Gamma(n + r) / Gamma(r) = sum_l |s(n, l)| r^l
  double worst = 0.0;
  for (int n = 1; n <= 15; ++n) {
    for (double r : {0.1, 1.0, 3.7}) {
      std::vector<double> terms;
      for (int l = 1; l <= n; ++l) terms.push_back(stirling_log_ratio(n, l) + log_factorial(n) + l * std::log(r));
      const double lhs = oracle::lgamma(n + r) - oracle::lgamma(r);
      worst = std::max(worst, std::abs(std::expm1(log_sum_exp(terms) - lhs)));
    }
  }
  return verdict(worst < 1e-9, "max log-space relative error " + fmt("%.2e", worst) + " (limit 1e-9)");
}

// --- 2 ----------------------------------------------------------------------

Outcome small_matrix_oracles() {
  const CountMatrix one = CountMatrix::from_dense({{1}});
  const double p = 1.0 - std::exp(-1.0);
  struct Case {
    const char* name;
    ModelParams params;
    double documented;
    double documented_tol;
    double enumerated;
    bool tables;
  };
  // Generative enumeration of the single column: Pois(K = 1; rate) times the
  // column law.
  const std::vector<Case> cases{
      {"NBP", ModelParams::nbp(1.0, 1.0), 0.25, 1e-12, gen::lpois(1, std::log(2.0)) + gen::llog(1, 0.5), false},
      {"GNBP", ModelParams::gnbp(1.0, 1.0, {p}), 0.158030, 5e-7,
       gen::lpois(1, std::log(2.0)) + gen::llog(1, 0.5) + gen::lsumlog(1, 1, p), true},
      {"BNBP", ModelParams::bnbp(1.0, 1.0, {1.0}), std::exp(-1.0) / 2.0, 1e-12,
       gen::lpois(1, oracle::digamma(2.0) - oracle::digamma(1.0)) + std::log(0.5), false}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : cases) {
    const double got = log_pmf(c.params, one, c.tables ? &one : nullptr);
    const double err = std::abs(got - c.enumerated);
    const bool good = err < 1e-10 && std::abs(std::exp(got) - c.documented) < c.documented_tol;
    ok = ok && good;
    d << c.name << " " << fmt("%.6f", std::exp(got)) << " (|diff| " << fmt("%.1e", err) << ") ";
  }
  return verdict(ok, d.str() + "vs enumeration, limit 1e-10");
}

// --- 3 ----------------------------------------------------------------------

Outcome telescoping() {
  Rng rng = make_stream(301);
  double worst = 0.0;
  for (Process kind : kProcesses) {
    for (int t = 0; t < 100; ++t) {
      const std::size_t J = 1 + t % 4;
      const gen::Sample s = gen::random_small(rng, kind, J, 1 + t % 5);
      const ModelParams prm = gen::params_for(kind, J, rng);
      const CountMatrix prev = s.counts.prefix_rows(J - 1);
      std::vector<std::size_t> old_cols, new_cols;
      for (std::size_t k = 0; k < s.counts.cols(); ++k)
        (s.counts.column(k).front().row < J - 1 ? old_cols : new_cols).push_back(k);
      NewRow row;
      for (std::size_t k : old_cols) row.existing.push_back(s.counts.at(J - 1, k));
      for (std::size_t k : new_cols) row.fresh.push_back(s.counts.at(J - 1, k));
      std::optional<CountMatrix> prev_t;
      if (s.tables) {
        prev_t = s.tables->prefix_rows(J - 1);
        for (std::size_t k : old_cols) row.existing_tables.push_back(s.tables->at(J - 1, k));
        for (std::size_t k : new_cols) row.fresh_tables.push_back(s.tables->at(J - 1, k));
      }
      const CountMatrix* pt = prev_t ? &*prev_t : nullptr;
      const double inc = row_increment_log_pmf(prm, prev, pt, row);
      const double ratio = log_pmf(prm, s.counts, gen::tables_of(s)) -
                           log_pmf(prm.prefix(kind == Process::nbp ? 0 : J - 1), prev, pt);
      worst = std::max(worst, std::abs(std::expm1(inc - ratio)));
    }
  }
  return verdict(worst < 1e-10, "300 cases, max relative error " + fmt("%.2e", worst) + " (limit 1e-10)");
}

// --- 4 ----------------------------------------------------------------------

ModelParams construction_params(Process kind) {
  switch (kind) {
    case Process::nbp: return ModelParams::nbp(2.0, 1.0);
    case Process::gnbp: return ModelParams::gnbp(2.0, 1.0, {0.3, 0.5, 0.6});
    case Process::bnbp: return ModelParams::bnbp(2.0, 2.0, {0.5, 1.0, 1.5});
  }
  return {};
}

Outcome construction_equivalence() {
  constexpr int kDraws = 100000;
  bool ok = true;
  std::ostringstream d;
  for (Process kind : kProcesses) {
    const ModelParams prm = construction_params(kind);
    std::map<std::string, double> colwise, seq;
    Rng a = make_stream(401, static_cast<std::uint64_t>(kind));
    Rng b = make_stream(402, static_cast<std::uint64_t>(kind));
    for (int i = 0; i < kDraws; ++i) {
      colwise[canonical_key(simulate_columnwise(prm, 3, a).counts)] += 1.0;
      seq[canonical_key(simulate_sequential(prm, 3, b, Ordering::random_insert).counts)] += 1.0;
    }
    const oracle::ChiSquare chi = oracle::chi_square_two_sample(colwise, seq, 20.0);
    ok = ok && chi.p_value > 1e-3;
    d << to_string(kind) << " p=" << fmt("%.3g", chi.p_value) << " (dof " << chi.dof << ") ";
  }
  return verdict(ok, d.str() + "limit p > 1e-3");
}

// --- 5 ----------------------------------------------------------------------

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Draw>
MeanVar sample_moments(Draw draw, int n) {
  // Welford update.
  double mean = 0.0, m2 = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double x = static_cast<double>(draw());
    const double delta = x - mean;
    mean += delta / i;
    m2 += delta * (x - mean);
  }
  return {mean, m2 / (n - 1)};
}

Outcome variance_mean() {
  constexpr int kDraws = 1000000;
  std::ostringstream d;
  bool ok = true;

  // NBP existing column: NB(n_.k, 1/(J+c+1)).
  {
    const double nk = 5.0, J = 3.0, c = 1.0;
    Rng rng = make_stream(501);
    const DistSpec spec = NegativeBinomial{nk, 1.0 / (J + c + 1.0)};
    const MeanVar m = sample_moments([&] { return std::get<count_t>(count_sample(spec, rng)); }, kDraws);
    const double rhs = m.mean + m.mean * m.mean / nk;
    const double err = oracle::rel_err(m.var, rhs);
    ok = ok && err < 0.02;
    d << "NBP " << fmt("%.2f%%", 100 * err);
  }
  // GNBP existing column: NB(r, p_{J+1}) with r ~ Gamma(l_.k, 1/(c + q.)).
  {
    const double lk = 3.0, cq = 2.0, p = 0.5;
    Rng rng = make_stream(502);
    const DistSpec spec = GammaNegativeBinomial{lk, cq, p};
    const MeanVar m = sample_moments([&] { return std::get<count_t>(count_sample(spec, rng)); }, kDraws);
    const double rhs = m.mean / (1.0 - p) + m.mean * m.mean / lk;
    const double err = oracle::rel_err(m.var, rhs);
    ok = ok && err < 0.02;
    d << ", GNBP " << fmt("%.2f%%", 100 * err);
  }
  // BNBP existing column: BNB(r_{J+1}, n_.k, c + r.), with a = c + r..
  {
    const double r = 1.5, nk = 3.0, a = 6.0;
    Rng rng = make_stream(503);
    const DistSpec spec = BetaNegativeBinomial{r, nk, a};
    const MeanVar m = sample_moments([&] { return std::get<count_t>(count_sample(spec, rng)); }, kDraws);
    const double e = m.mean;
    const double stated = e / (a / (nk + a - 1.0)) + e * e / (nk * (a - 2.0) / (nk + a - 1.0));
    const double corrected = e * (nk + a - 1.0) / (a - 2.0) + e * e * (nk + a - 1.0) / (nk * (a - 2.0));
    const double err = oracle::rel_err(m.var, stated);
    const double err_corrected = oracle::rel_err(m.var, corrected);
    ok = ok && err < 0.02;
    d << ", BNBP " << fmt("%.2f%%", 100 * err) << " (Var " << fmt("%.4f", m.var) << " vs stated relation "
      << fmt("%.4f", stated) << "; with first term E(n+a-1)/(a-2) the error is " << fmt("%.2f%%", 100 * err_corrected)
      << ")";
  }
  return verdict(ok, d.str() + ", limit 2%");
}

// --- 6 ----------------------------------------------------------------------

Outcome predictive_rates() {
  constexpr int kSteps = 100000;
  bool ok = true;
  std::ostringstream d;
  for (Process kind : kProcesses) {
    Rng rng = make_stream(601, static_cast<std::uint64_t>(kind));
    const std::size_t J = 4;
    const double gamma0 = 3.0, c = 1.5;
    std::vector<double> row = kind == Process::gnbp ? std::vector<double>{0.3, 0.5, 0.7, 0.4, 0.6}
                                                    : std::vector<double>{0.5, 1.0, 2.0, 1.5, 0.8};
    ModelParams next;
    ModelParams first;
    double expected = 0.0;
    switch (kind) {
      case Process::nbp:
        next = first = ModelParams::nbp(gamma0, c);
        expected = gamma0 * (std::log(J + c + 1.0) - std::log(J + c));
        break;
      case Process::gnbp: {
        next = ModelParams::gnbp(gamma0, c, row);
        first = ModelParams::gnbp(gamma0, c, std::vector<double>(row.begin(), row.begin() + J));
        double qdot = 0.0;
        for (std::size_t j = 0; j < J; ++j) qdot += -std::log1p(-row[j]);
        const double qn = -std::log1p(-row[J]);
        expected = gamma0 * (std::log(c + qdot + qn) - std::log(c + qdot));
        break;
      }
      case Process::bnbp: {
        next = ModelParams::bnbp(gamma0, c, row);
        first = ModelParams::bnbp(gamma0, c, std::vector<double>(row.begin(), row.begin() + J));
        double rdot = 0.0;
        for (std::size_t j = 0; j < J; ++j) rdot += row[j];
        expected = gamma0 * (oracle::digamma(c + rdot + row[J]) - oracle::digamma(c + rdot));
        break;
      }
    }
    const SimulatedMatrix base = simulate_columnwise(first, J, rng);
    const CountMatrix* tables = base.tables ? &*base.tables : nullptr;
    double sum = 0.0;
    for (int i = 0; i < kSteps; ++i) sum += static_cast<double>(sample_next_row(next, base.counts, tables, rng).fresh.size());
    const double mean = sum / kSteps;
    const double sigma = std::sqrt(expected / kSteps);
    const double z = (mean - expected) / sigma;
    ok = ok && std::abs(z) < 3.0;
    d << to_string(kind) << " " << fmt("%.4f", mean) << " vs " << fmt("%.4f", expected) << " (z " << fmt("%.2f", z)
      << ") ";
  }
  return verdict(ok, d.str() + "limit 3 sigma");
}

// --- 7 ----------------------------------------------------------------------

Outcome logbeta_moments() {
  constexpr int kDraws = 100000;
  bool ok = true;
  std::ostringstream d;
  for (auto [gamma0, c] : {std::pair{1.0, 1.0}, std::pair{4.31, 2.0}}) {
    Rng rng = make_stream(701, static_cast<std::uint64_t>(c));
    std::vector<double> xs(kDraws);
    for (double& x : xs) x = logbeta_sample(gamma0, c, rng);
    const oracle::Moments m = oracle::moments(xs);
    const double mean = gamma0 * oracle::trigamma(c);
    const double var = -gamma0 * oracle::polygamma(2, c);
    const double zm = (m.mean - mean) / m.mean_se();
    const double zv = (m.var - var) / oracle::variance_se(xs);
    ok = ok && std::abs(zm) < 3.0 && std::abs(zv) < 3.0;
    d << "(" << gamma0 << "," << c << "): mean z " << fmt("%.2f", zm) << ", variance z " << fmt("%.2f", zv) << "; ";
  }
  return verdict(ok, d.str() + "limit 3 sigma");
}

// --- 8 ----------------------------------------------------------------------

Outcome geweke() {
  bool ok = true;
  std::ostringstream d;
  for (Process kind : kProcesses) {
    GewekeConfig cfg;
    cfg.kind = kind;
    cfg.rows = 3;
    cfg.rounds = 10000;
    cfg.seed = 801;
    const GewekeReport r = run_geweke(cfg);
    ok = ok && r.passed(4.0) && r.statistics.size() == 5;
    d << to_string(kind) << " max|z| " << (r.divergence ? std::string("diverged") : fmt("%.2f", r.max_abs_z())) << ", ";
  }
  GewekeConfig bad;
  bad.kind = Process::nbp;
  bad.rounds = 10000;
  bad.seed = 802;
  bad.sweep.corrupt_nbp_weight_rate = true;
  bad.sweep.update_c = false;
  const GewekeReport m = run_geweke(bad);
  ok = ok && m.max_abs_z() > 10.0;
  d << "mutated NBP max|z| " << fmt("%.1f", m.max_abs_z()) << " (needs > 10); limit |z| < 4";
  return verdict(ok, d.str());
}

// --- 9 ----------------------------------------------------------------------

Outcome bnbp_c_update() {
  const CountMatrix m = CountMatrix::from_dense({{2, 0, 1}, {1, 3, 0}});
  const double gamma0 = 1.5;
  const std::vector<double> r{1.0, 0.7};
  ModelParams prm = ModelParams::bnbp(gamma0, 1.0, r);
  const Hyperparameters& h = prm.hyper;

  // Grid oracle of the same target, from the column-i.i.d. law.
  auto log_target = [&](double c) {
    ModelParams q = prm;
    q.c = c;
    return (h.c0 - 1.0) * std::log(c) - h.d0 * c + gen::generative_log_prob(q, m);
  };
  const int kGrid = 200000;
  const double cmax = 60.0, step = cmax / kGrid;
  std::vector<double> grid(kGrid + 1), logd(kGrid + 1), cdf(kGrid + 1, 0.0);
  double peak = -1e300;
  for (int i = 1; i <= kGrid; ++i) {
    grid[i] = i * step;
    logd[i] = log_target(grid[i]);
    peak = std::max(peak, logd[i]);
  }
  double prev = 0.0;
  for (int i = 1; i <= kGrid; ++i) {
    const double f = std::exp(logd[i] - peak);
    cdf[i] = cdf[i - 1] + 0.5 * (prev + f) * step;
    prev = f;
  }
  for (double& x : cdf) x /= cdf.back();
  auto oracle_cdf = [&](double c) {
    if (c >= cmax) return 1.0;
    const double pos = c / step;
    const int i = static_cast<int>(pos);
    return cdf[i] + (pos - i) * (cdf[i + 1] - cdf[i]);
  };

  // Chain on (c, p): Gibbs draw of p given c, then the MH move for c.
  Rng rng = make_stream(901);
  LatentState s = initial_state(Process::bnbp, m, h, rng);
  s.params = prm;
  draw_latent_given_params(m, s, rng);
  const int kBurn = 2000, kKeep = 20000, kThin = 10;
  std::vector<double> cs;
  std::size_t accepted = 0, proposals = 0;
  for (int it = 0; it < kBurn + kKeep * kThin; ++it) {
    draw_latent_given_params(m, s, rng);
    accepted += mh_update_c(m, s, rng).accepted;
    ++proposals;
    if (it >= kBurn && (it - kBurn) % kThin == 0) cs.push_back(s.params.c);
  }
  const double p = oracle::ks_p_value(cs, oracle_cdf);
  return verdict(p > 1e-3, "KS p=" + fmt("%.3g", p) + " over " + std::to_string(cs.size()) + " thinned draws, acceptance " +
                               fmt("%.2f", static_cast<double>(accepted) / proposals) + "; limit p > 1e-3");
}

// --- 10, 11 -----------------------------------------------------------------

std::vector<synth::Category> synthetic_categories(double low, double p_shape) {
  std::vector<synth::Category> cats;
  for (std::size_t i = 0; i < 3; ++i)
    cats.push_back({"c" + std::to_string(i), synth::block_weights(60, 3, i, 1.0, low), p_shape, p_shape});
  return cats;
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

ClassifierBundle train_default(const Corpus& train, Process kind, std::uint64_t seed) {
  TrainOptions o;
  o.kind = kind;
  o.chain.seed = seed;
  o.jobs = jobs();
  return train_bundle(train, o);
}

Outcome classifier_self_consistency() {
  std::ostringstream d;
  bool ok = true;
  {
    Rng rng = make_stream(1001);
    const auto cats = synthetic_categories(0.05, 2.0);
    const Corpus train = synth::make_corpus(cats, 100, rng, "train");
    const Corpus test = synth::make_corpus(cats, 100, rng, "test");
    const double acc = evaluate(Classifier(train_default(train, Process::gnbp, 1002)), test.documents, jobs()).accuracy();
    ok = ok && acc > 0.9;
    d << "separated GNBP accuracy " << fmt("%.3f", acc) << " (> 0.9); over-dispersed:";
  }
  Rng rng = make_stream(1003);
  const auto cats = synthetic_categories(0.3, 2.0);
  const Corpus train = synth::make_corpus(cats, 100, rng, "train");
  const Corpus test = synth::make_corpus(cats, 100, rng, "test");
  std::map<Process, double> acc;
  for (Process kind : kProcesses) {
    acc[kind] = evaluate(Classifier(train_default(train, kind, 1004)), test.documents, jobs()).accuracy();
    d << " " << to_string(kind) << " " << fmt("%.3f", acc[kind]);
  }
  ok = ok && acc[Process::gnbp] > acc[Process::nbp] && acc[Process::bnbp] > acc[Process::nbp];
  return verdict(ok, d.str() + " (GNBP, BNBP > NBP)");
}

Outcome s_insensitivity() {
  Rng rng = make_stream(1101);
  const auto cats = synthetic_categories(0.3, 2.0);
  const Corpus train = synth::make_corpus(cats, 100, rng, "train");
  const Corpus test = synth::make_corpus(cats, 100, rng, "test");
  bool ok = true;
  std::ostringstream d;
  for (Process kind : kProcesses) {
    const ClassifierBundle b = train_default(train, kind, 1102);
    const EvaluationReport ten = evaluate(Classifier(b), test.documents, jobs());
    const EvaluationReport one = evaluate(Classifier(b.with_samples(0, 1)), test.documents, jobs());
    std::size_t agree = 0;
    for (std::size_t i = 0; i < ten.predictions.size(); ++i) agree += ten.predictions[i] == one.predictions[i];
    const double frac = static_cast<double>(agree) / static_cast<double>(ten.predictions.size());
    ok = ok && frac >= 0.95;
    d << to_string(kind) << " " << fmt("%.3f", frac) << " ";
  }
  return verdict(ok, "S=1 vs S=10 agreement: " + d.str() + "(>= 0.95)");
}

// --- 12 ---------------------------------------------------------------------

Outcome newsgroups() {
  const char* dir = std::getenv("NBPM_20NG_DIR");
  if (!dir || !*dir) return {Status::skip, "NBPM_20NG_DIR not set"};
  const std::filesystem::path root(dir);
  const Corpus train = load_corpus((root / "train").string(), CorpusFormat::uci_bow);
  const Corpus test = load_corpus((root / "test").string(), CorpusFormat::uci_bow);
  const std::map<Process, double> target{{Process::nbp, 0.619}, {Process::bnbp, 0.787}, {Process::gnbp, 0.809}};
  bool ok = true;
  std::ostringstream d;
  ClassifierBundle first;
  for (Process kind : kProcesses) {
    const ClassifierBundle b = train_default(train, kind, 1201);
    const double acc = evaluate(Classifier(b), test.documents, jobs()).accuracy();
    ok = ok && std::abs(acc - target.at(kind)) <= 0.015;
    d << to_string(kind) << " " << fmt("%.1f%%", 100 * acc) << " (target " << fmt("%.1f%%", 100 * target.at(kind))
      << ") ";
    if (kind == Process::nbp) first = b;
  }
  const double base = evaluate(MultinomialBaseline(train), first.labels, test.documents, jobs()).accuracy();
  ok = ok && std::abs(base - 0.781) <= 0.015;
  d << "multinomial-laplace " << fmt("%.1f%%", 100 * base) << " (target 78.1%); limit +-1.5 points";
  return verdict(ok, d.str());
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "Stirling/Gamma identity", 1, stirling_identity},
      {2, "small-matrix PMF oracles", 1, small_matrix_oracles},
      {3, "telescoping identity", 10, telescoping},
      {4, "construction equivalence", 120, construction_equivalence},
      {5, "variance-mean relations", 60, variance_mean},
      {6, "predictive new-column rates", 60, predictive_rates},
      {7, "logBeta sampler moments", 30, logbeta_moments},
      {8, "Geweke joint-distribution tests", 600, geweke},
      {9, "BNBP c-update vs grid oracle", 120, bnbp_c_update},
      {10, "classifier self-consistency", 300, classifier_self_consistency},
      {11, "S-insensitivity", 300, s_insensitivity},
      {12, "20-newsgroups accuracies", 1e9, newsgroups},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {Status::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out.status == Status::pass && secs > c.budget_seconds) {
      out.status = Status::fail;
      out.detail += "; over the time budget";
    }
    const char* tag = out.status == Status::pass ? "PASS" : out.status == Status::fail ? "FAIL" : "SKIP";
    if (out.status == Status::fail) ++failed;
    std::cout << "[" << tag << "] " << c.id << ". " << c.name << ": " << out.detail << " [" << fmt("%.2f", secs) << " s";
    if (c.budget_seconds < 1e8) std::cout << " / " << c.budget_seconds << " s";
    std::cout << "]" << std::endl;
  }
  return failed;
}
