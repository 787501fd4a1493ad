// nbpm: train, classify, evaluate, simulate, ppc, geweke, s-variability.
//
// Every run writes manifest.json into its output directory; `nbpm rerun
// <manifest>` replays the recorded arguments.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nbpm/nbpm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string process = "gnbp";
  std::string mode = "infinite";
  std::size_t samples = 10;
  std::size_t iters = 2500;
  std::size_t burn_in = 1000;
  std::string retention = "independent";
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string out;

  std::string corpus;
  std::string train_corpus;
  std::string format = "sparse-tsv";
  std::string bundle;

  std::string baseline;
  std::size_t splits = 0;
  double fraction = 0.2;

  double gamma0 = 5.0;
  double c = 1.0;
  std::size_t rows = 10;
  std::string p = "0.5";
  std::string r = "1";
  std::string construction = "columnwise";
  std::size_t replicates = 1;

  std::string category;
  bool per_draw = false;

  std::size_t rounds = 10000;
  std::size_t geweke_rows = 3;
  bool mutate = false;

  std::string sizes = "1,4,10,50";
};

std::string default_out_dir() {
  const char* env = std::getenv("NBPM_OUTPUT_DIR");
  return env && *env ? env : "nbpm-out";
}

fs::path out_dir(const Options& o) {
  fs::path p(o.out.empty() ? default_out_dir() : o.out);
  fs::create_directories(p);
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

// Comma list of n values; a single value is repeated. n = 0 accepts any length.
std::vector<double> parse_list(const std::string& s, std::size_t n, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (n == 0) return v;
  if (v.size() == 1) v.assign(n, v[0]);
  if (v.size() != n)
    throw nbpm::DomainError(std::string(what) + ": give one value or one per row (" + std::to_string(n) + ")");
  return v;
}

nbpm::ChainConfig chain_config(const Options& o) {
  nbpm::ChainConfig c;
  c.iterations = o.iters;
  c.samples = o.samples;
  c.seed = o.seed;
  if (o.retention == "independent") {
    c.retention = nbpm::Retention::independent_chains;
  } else if (o.retention == "thinned") {
    c.retention = nbpm::Retention::thinned_single_chain;
    c.burn_in = o.burn_in;
  } else {
    throw nbpm::DomainError("unknown retention '" + o.retention + "' (expected independent or thinned)");
  }
  c.validate();
  return c;
}

nbpm::TrainOptions train_options(const Options& o) {
  nbpm::TrainOptions t;
  t.kind = nbpm::parse_process(o.process);
  t.mode = nbpm::parse_mode(o.mode);
  t.chain = chain_config(o);
  t.jobs = o.jobs;
  return t;
}

nbpm::Corpus load(const std::string& path, const Options& o) {
  if (path.empty()) throw nbpm::DomainError("a corpus path is required");
  return nbpm::load_corpus(path, nbpm::parse_corpus_format(o.format));
}

void write_manifest(const fs::path& dir, const std::string& sub, const Options& o, const std::vector<std::string>& argv) {
  json m = {{"tool", "nbpm"},
            {"version", kVersion},
            {"subcommand", sub},
            {"process", o.process},
            {"mode", o.mode},
            {"chain",
             {{"iterations", o.iters},
              {"samples", o.samples},
              {"retention", o.retention},
              {"burn_in", o.retention == "thinned" ? o.burn_in : 0},
              {"seed", o.seed}}},
            {"jobs", o.jobs},
            {"corpus", o.corpus},
            {"train_corpus", o.train_corpus},
            {"format", o.format},
            {"bundle", o.bundle},
            {"fraction", o.fraction},
            {"splits", o.splits},
            {"seed", o.seed},
            {"output_dir", dir.string()},
            {"argv", argv}};
  auto f = open_out(dir / "manifest.json");
  f << m.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_train(const Options& o) {
  const fs::path dir = out_dir(o);
  const nbpm::Corpus corpus = load(o.corpus, o);
  const nbpm::ClassifierBundle b = nbpm::train_bundle(corpus, train_options(o));
  nbpm::save_bundle(b, (dir / "bundle.json").string());
  std::cout << "trained " << b.size() << " categories (" << o.process << ", S = " << b.samples_per_category()
            << ") -> " << (dir / "bundle.json").string() << '\n';
  return 0;
}

int cmd_classify(const Options& o) {
  const fs::path dir = out_dir(o);
  const nbpm::Classifier clf(nbpm::load_bundle(o.bundle));
  const nbpm::Corpus corpus = load(o.corpus, o);
  std::vector<nbpm::Classification> res(corpus.documents.size());
  nbpm::parallel_for(res.size(), o.jobs, [&](std::size_t d) {
    try {
      res[d] = clf.classify(corpus.documents[d].counts);
    } catch (const nbpm::DomainError& e) {
      throw nbpm::DomainError("document '" + corpus.documents[d].id + "': " + e.what());
    }
  });
  auto f = open_out(dir / "predictions.csv");
  f.precision(17);
  f << "doc_id,label,predicted";
  for (const auto& l : clf.bundle().labels) f << ",p_" << l;
  f << '\n';
  for (std::size_t d = 0; d < res.size(); ++d) {
    f << corpus.documents[d].id << ',' << corpus.documents[d].label << ',' << clf.label(res[d]);
    for (double p : res[d].posteriors) f << ',' << p;
    f << '\n';
  }
  std::cout << "classified " << res.size() << " documents -> " << (dir / "predictions.csv").string() << '\n';
  return 0;
}

struct SplitResult {
  nbpm::EvaluationReport model;
  std::optional<nbpm::EvaluationReport> baseline;
};

void write_split(const fs::path& dir, const std::string& tag, const SplitResult& r, std::ostream& text,
                 const std::string& process) {
  {
    auto f = open_out(dir / ("report" + tag + ".csv"));
    nbpm::write_report_csv(f, r.model);
  }
  {
    auto f = open_out(dir / ("confusion" + tag + ".csv"));
    nbpm::write_confusion_csv(f, r.model);
  }
  text << nbpm::format_report(r.model, process + (tag.empty() ? "" : " " + tag.substr(1)));
  if (r.baseline) {
    {
      auto f = open_out(dir / ("baseline_report" + tag + ".csv"));
      nbpm::write_report_csv(f, *r.baseline);
    }
    {
      auto f = open_out(dir / ("baseline_confusion" + tag + ".csv"));
      nbpm::write_confusion_csv(f, *r.baseline);
    }
    text << nbpm::format_report(*r.baseline, "multinomial-laplace" + (tag.empty() ? "" : " " + tag.substr(1)));
  }
}

SplitResult evaluate_one(const nbpm::ClassifierBundle& b, const nbpm::Corpus* train, const nbpm::Corpus& test,
                         const Options& o) {
  SplitResult r;
  r.model = nbpm::evaluate(nbpm::Classifier(b), test.documents, o.jobs);
  if (!o.baseline.empty()) {
    if (!train) throw nbpm::DomainError("the baseline needs training documents (--train-corpus)");
    r.baseline = nbpm::evaluate(nbpm::MultinomialBaseline(*train), b.labels, test.documents, o.jobs);
  }
  return r;
}

int cmd_evaluate(const Options& o) {
  if (!o.baseline.empty() && o.baseline != "multinomial-laplace")
    throw nbpm::DomainError("unknown baseline '" + o.baseline + "' (expected multinomial-laplace)");
  const fs::path dir = out_dir(o);
  std::ostringstream text;
  std::vector<SplitResult> results;

  if (o.splits > 0) {
    if (!o.bundle.empty()) throw nbpm::DomainError("--splits trains its own models; drop --bundle");
    const nbpm::Corpus corpus = load(o.corpus, o);
    nbpm::TrainOptions t = train_options(o);
    for (std::size_t i = 0; i < o.splits; ++i) {
      const std::uint64_t seed = o.seed + i;
      const nbpm::CorpusSplit split = nbpm::split_corpus(corpus, o.fraction, seed);
      t.chain.seed = seed;
      const nbpm::ClassifierBundle b = nbpm::train_bundle(split.train, t);
      results.push_back(evaluate_one(b, &split.train, split.test, o));
      write_split(dir, "_split" + std::to_string(i + 1), results.back(), text, o.process);
    }
  } else {
    const nbpm::Corpus test = load(o.corpus, o);
    std::optional<nbpm::Corpus> train;
    if (!o.train_corpus.empty()) train = load(o.train_corpus, o);
    nbpm::ClassifierBundle b;
    if (!o.bundle.empty()) {
      b = nbpm::load_bundle(o.bundle);
    } else {
      if (!train) throw nbpm::DomainError("evaluate needs --bundle, --train-corpus, or --splits");
      b = nbpm::train_bundle(*train, train_options(o));
    }
    results.push_back(evaluate_one(b, train ? &*train : nullptr, test, o));
    write_split(dir, "", results.back(), text, o.process);
  }

  std::vector<double> acc, base;
  for (const auto& r : results) {
    acc.push_back(r.model.accuracy());
    if (r.baseline) base.push_back(r.baseline->accuracy());
  }
  auto f = open_out(dir / "summary.csv");
  f.precision(10);
  f << "classifier,splits,mean_accuracy,sd_accuracy\n";
  const nbpm::MeanSd ms = nbpm::mean_sd(acc);
  f << o.process << ',' << acc.size() << ',' << ms.mean << ',' << ms.sd << '\n';
  text << std::fixed << std::setprecision(2) << o.process << ": " << 100.0 * ms.mean << "% +- " << 100.0 * ms.sd
       << "% over " << acc.size() << " split(s)\n";
  if (!base.empty()) {
    const nbpm::MeanSd mb = nbpm::mean_sd(base);
    f << "multinomial-laplace," << base.size() << ',' << mb.mean << ',' << mb.sd << '\n';
    text << "multinomial-laplace: " << 100.0 * mb.mean << "% +- " << 100.0 * mb.sd << "% over " << base.size()
         << " split(s)\n";
  }
  auto t = open_out(dir / "report.txt");
  t << text.str();
  std::cout << text.str();
  return 0;
}

int cmd_simulate(const Options& o) {
  const fs::path dir = out_dir(o);
  const nbpm::Process kind = nbpm::parse_process(o.process);
  nbpm::ModelParams params;
  switch (kind) {
    case nbpm::Process::nbp: params = nbpm::ModelParams::nbp(o.gamma0, o.c); break;
    case nbpm::Process::gnbp: params = nbpm::ModelParams::gnbp(o.gamma0, o.c, parse_list(o.p, o.rows, "--p")); break;
    case nbpm::Process::bnbp: params = nbpm::ModelParams::bnbp(o.gamma0, o.c, parse_list(o.r, o.rows, "--r")); break;
  }
  params.validate(o.rows);
  const bool columnwise = o.construction == "columnwise";
  if (!columnwise && o.construction != "sequential")
    throw nbpm::DomainError("unknown construction '" + o.construction + "' (expected columnwise or sequential)");
  if (o.replicates < 1) throw nbpm::DomainError("--replicates must be positive");

  nbpm::Rng rng = nbpm::make_stream(o.seed);
  auto totals = open_out(dir / "replicates.csv");
  totals << "replicate,columns,total,max_count\n";
  double sum_total = 0.0;
  for (std::size_t i = 0; i < o.replicates; ++i) {
    const nbpm::SimulatedMatrix sim = columnwise ? nbpm::simulate_columnwise(params, o.rows, rng)
                                                 : nbpm::simulate_sequential(params, o.rows, rng);
    totals << i + 1 << ',' << sim.counts.cols() << ',' << sim.counts.total() << ',' << sim.counts.max_count() << '\n';
    sum_total += static_cast<double>(sim.counts.total());
    if (i == 0) {
      auto m = open_out(dir / "matrix.txt");
      nbpm::write_triplets(m, sim.counts);
      auto h = open_out(dir / "heatmap.csv");
      nbpm::write_heatmap_csv(h, sim.counts);
      if (sim.tables) {
        auto t = open_out(dir / "tables.txt");
        nbpm::write_triplets(t, *sim.tables);
      }
    }
  }
  std::cout << "simulated " << o.replicates << " matrix(es); mean total " << sum_total / static_cast<double>(o.replicates)
            << " -> " << dir.string() << '\n';
  return 0;
}

std::string file_tag(std::size_t i, const std::string& label) {
  std::string s;
  for (char ch : label) s += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' ? ch : '_';
  return std::to_string(i + 1) + "_" + s;
}

int cmd_ppc(const Options& o) {
  const fs::path dir = out_dir(o);
  const nbpm::ClassifierBundle b = nbpm::load_bundle(o.bundle);
  nbpm::PpcOptions popt;
  popt.per_draw = o.per_draw;
  bool any = false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!o.category.empty() && b.labels[i] != o.category) continue;
    any = true;
    nbpm::Rng rng = nbpm::make_stream(o.seed, i);
    const nbpm::PpcReport r = nbpm::ppc_report(b.models[i], rng, popt);
    const std::string tag = file_tag(i, b.labels[i]);
    {
      auto f = open_out(dir / ("ppc_" + tag + "_summary.csv"));
      nbpm::write_ppc_summary_csv(f, r);
    }
    {
      auto f = open_out(dir / ("ppc_" + tag + "_histogram.csv"));
      nbpm::write_histogram_csv(f, r);
    }
    {
      auto f = open_out(dir / ("ppc_" + tag + "_heatmap.csv"));
      nbpm::write_heatmap_csv(f, r.simulated);
    }
    {
      auto f = open_out(dir / ("ppc_" + tag + "_matrix.txt"));
      nbpm::write_triplets(f, r.simulated);
    }
    std::cout << b.labels[i] << ": observed K = " << r.observed_columns << ", total = " << r.observed_total
              << "; simulated K = " << r.simulated_summary.columns << ", total = " << r.simulated_summary.total
              << ", max = " << r.simulated_summary.max_count << '\n';
  }
  if (!any) throw nbpm::DomainError("no category named '" + o.category + "' in the bundle");
  return 0;
}

int cmd_geweke(const Options& o) {
  const fs::path dir = out_dir(o);
  std::vector<nbpm::Process> kinds;
  if (o.process == "all")
    kinds = {nbpm::Process::nbp, nbpm::Process::gnbp, nbpm::Process::bnbp};
  else
    kinds = {nbpm::parse_process(o.process)};
  auto f = open_out(dir / "geweke.csv");
  bool header = true;
  for (nbpm::Process k : kinds) {
    nbpm::GewekeConfig cfg;
    cfg.kind = k;
    cfg.rounds = o.rounds;
    cfg.rows = o.geweke_rows;
    cfg.seed = o.seed;
    if (o.mutate) {
      if (k != nbpm::Process::nbp) throw nbpm::DomainError("--mutate applies to the nbp sampler");
      cfg.sweep.corrupt_nbp_weight_rate = true;
      cfg.sweep.update_c = false;
    }
    const nbpm::GewekeReport r = nbpm::run_geweke(cfg);
    std::ostringstream csv;
    nbpm::write_geweke_csv(csv, r);
    std::string body = csv.str();
    if (!header) body = body.substr(body.find('\n') + 1);
    header = false;
    f << body;
    std::cout << nbpm::to_string(k) << ": max |z| = " << r.max_abs_z() << (r.passed() ? " (pass)" : " (FAIL)") << '\n';
  }
  return 0;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int cmd_s_variability(const Options& o) {
  const fs::path dir = out_dir(o);
  const nbpm::ClassifierBundle b = nbpm::load_bundle(o.bundle);
  const nbpm::Corpus test = load(o.corpus, o);
  std::vector<std::size_t> sizes;
  for (double s : parse_list(o.sizes, 0, "--sizes")) sizes.push_back(static_cast<std::size_t>(s));
  const auto runs = nbpm::s_variability(b, test.documents, sizes, o.jobs);
  auto f = open_out(dir / "s_variability.csv");
  f.precision(10);
  f << "samples,group,accuracy\n";
  for (const auto& r : runs) f << r.samples << ',' << r.group + 1 << ',' << r.accuracy << '\n';
  auto s = open_out(dir / "s_variability_summary.csv");
  s.precision(10);
  s << "samples,groups,min,q1,median,q3,max\n";
  for (std::size_t S : sizes) {
    std::vector<double> acc;
    for (const auto& r : runs)
      if (r.samples == S) acc.push_back(r.accuracy);
    if (acc.empty()) {
      std::cout << "S = " << S << ": the bundle keeps only " << b.samples_per_category() << " samples, skipped\n";
      continue;
    }
    s << S << ',' << acc.size() << ',' << quantile(acc, 0.0) << ',' << quantile(acc, 0.25) << ','
      << quantile(acc, 0.5) << ',' << quantile(acc, 0.75) << ',' << quantile(acc, 1.0) << '\n';
    std::cout << "S = " << S << ": " << acc.size() << " groups, median accuracy " << quantile(acc, 0.5) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args);

int cmd_rerun(const std::string& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot read " + manifest);
  const json m = json::parse(in);
  return dispatch(m.at("argv").get<std::vector<std::string>>());
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Negative binomial process count-matrix models and naive-Bayes categorization", "nbpm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto add_chain = [&](CLI::App* s) {
    s->add_option("--process", o.process, "nbp, gnbp or bnbp")->check(CLI::IsMember({"nbp", "gnbp", "bnbp"}));
    s->add_option("--mode", o.mode, "infinite or finite vocabulary")->check(CLI::IsMember({"infinite", "finite"}));
    s->add_option("--samples", o.samples, "retained posterior samples S per category");
    s->add_option("--iters", o.iters, "Gibbs iterations per chain");
    s->add_option("--retention", o.retention, "independent (S chains) or thinned (one chain)")
        ->check(CLI::IsMember({"independent", "thinned"}));
    s->add_option("--burn-in", o.burn_in, "burn-in for thinned retention");
  };
  auto add_common = [&](CLI::App* s) {
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--jobs", o.jobs, "worker threads (categories and documents)");
    s->add_option("--out", o.out, "output directory (default $NBPM_OUTPUT_DIR or ./nbpm-out)");
  };
  auto add_corpus = [&](CLI::App* s, const char* help) {
    s->add_option("--corpus", o.corpus, help);
    s->add_option("--format", o.format, "sparse-tsv, or uci-bow (a directory with docword.txt, vocab.txt, labels.txt)")
        ->check(CLI::IsMember({"sparse-tsv", "uci-bow"}));
  };

  auto* train = app.add_subcommand("train", "run per-category samplers and save a bundle");
  add_chain(train);
  add_common(train);
  add_corpus(train, "labeled training corpus");
  train->get_option("--corpus")->required();

  auto* classify = app.add_subcommand("classify", "classify a corpus with a saved bundle");
  add_common(classify);
  add_corpus(classify, "corpus to classify");
  classify->get_option("--corpus")->required();
  classify->add_option("--bundle", o.bundle, "bundle.json from train")->required();

  auto* evaluate = app.add_subcommand("evaluate", "accuracy report on labeled documents");
  add_chain(evaluate);
  add_common(evaluate);
  add_corpus(evaluate, "labeled test corpus (or the full corpus with --splits)");
  evaluate->get_option("--corpus")->required();
  evaluate->add_option("--bundle", o.bundle, "evaluate a saved bundle");
  evaluate->add_option("--train-corpus", o.train_corpus, "training corpus (trains a bundle when --bundle is absent)");
  evaluate->add_option("--baseline", o.baseline, "add a baseline column: multinomial-laplace")
      ->check(CLI::IsMember({"multinomial-laplace"}));
  evaluate->add_option("--splits", o.splits, "repeat over N random stratified splits with seeds seed..seed+N-1");
  evaluate->add_option("--fraction", o.fraction, "training fraction per category for --splits");

  auto* simulate = app.add_subcommand("simulate", "draw random count matrices");
  simulate->add_option("--process", o.process, "nbp, gnbp or bnbp")->check(CLI::IsMember({"nbp", "gnbp", "bnbp"}));
  simulate->add_option("--gamma0", o.gamma0, "mass parameter");
  simulate->add_option("--c", o.c, "concentration parameter");
  simulate->add_option("--rows", o.rows, "number of rows J");
  simulate->add_option("--p", o.p, "GNBP row probabilities: one value or a comma list");
  simulate->add_option("--r", o.r, "BNBP row dispersions: one value or a comma list");
  simulate->add_option("--construction", o.construction, "columnwise or sequential")
      ->check(CLI::IsMember({"columnwise", "sequential"}));
  simulate->add_option("--replicates", o.replicates, "matrices to draw (the first is written out)");
  add_common(simulate);

  auto* ppc = app.add_subcommand("ppc", "posterior predictive check per category");
  ppc->add_option("--bundle", o.bundle, "bundle.json from train")->required();
  ppc->add_option("--category", o.category, "only this category");
  ppc->add_flag("--per-draw", o.per_draw, "simulate from one retained sample instead of posterior means");
  add_common(ppc);

  auto* geweke = app.add_subcommand("geweke", "joint-distribution test of the Gibbs samplers");
  geweke->add_option("--process", o.process, "nbp, gnbp, bnbp or all")
      ->check(CLI::IsMember({"nbp", "gnbp", "bnbp", "all"}));
  geweke->add_option("--rounds", o.rounds, "draws per run");
  geweke->add_option("--rows", o.geweke_rows, "rows J of the simulated matrices");
  geweke->add_flag("--mutate", o.mutate, "run the NBP sampler with a deliberately wrong r_k rate");
  add_common(geweke);

  auto* svar = app.add_subcommand("s-variability", "accuracy spread over groups of S retained samples");
  svar->add_option("--bundle", o.bundle, "bundle.json from train")->required();
  add_corpus(svar, "labeled test corpus");
  svar->get_option("--corpus")->required();
  svar->add_option("--sizes", o.sizes, "comma list of S values");
  add_common(svar);

  std::string manifest;
  auto* rerun = app.add_subcommand("rerun", "replay the arguments recorded in a manifest");
  rerun->add_option("manifest", manifest, "manifest.json")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (rerun->parsed()) return cmd_rerun(manifest);

  CLI::App* sub = app.get_subcommands().front();
  if (o.jobs < 1) o.jobs = 1;
  write_manifest(out_dir(o), sub->get_name(), o, args);
  if (sub == train) return cmd_train(o);
  if (sub == classify) return cmd_classify(o);
  if (sub == evaluate) return cmd_evaluate(o);
  if (sub == simulate) return cmd_simulate(o);
  if (sub == ppc) return cmd_ppc(o);
  if (sub == geweke) return cmd_geweke(o);
  return cmd_s_variability(o);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const std::exception& e) {
    std::cerr << "nbpm: error: " << e.what() << '\n';
    return 1;
  }
}
