// urex: entity-type relation induction, training and evaluation.

#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "urex/checkpoint.hpp"
#include "urex/corpus.hpp"
#include "urex/error.hpp"
#include "urex/etype.hpp"
#include "urex/io.hpp"
#include "urex/metrics.hpp"
#include "urex/synth.hpp"
#include "urex/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

void print_report(const std::string& title, const urex::ClusteringReport& r) {
  std::cout << title << ": " << urex::format_report(r) << '\n';
}

urex::ClusteringReport mean_report(const std::vector<urex::ClusteringReport>& runs) {
  urex::ClusteringReport m;
  for (const auto& r : runs) {
    m.b3.precision += r.b3.precision;
    m.b3.recall += r.b3.recall;
    m.b3.f1 += r.b3.f1;
    m.v.homogeneity += r.v.homogeneity;
    m.v.completeness += r.v.completeness;
    m.v.v += r.v.v;
    m.ari += r.ari;
  }
  const auto n = static_cast<double>(runs.size());
  m.b3.precision /= n;
  m.b3.recall /= n;
  m.b3.f1 /= n;
  m.v.homogeneity /= n;
  m.v.completeness /= n;
  m.v.v /= n;
  m.ari /= n;
  m.n_evaluated = runs.front().n_evaluated;
  return m;
}

struct SynthArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int run_synth(const SynthArgs& a) {
  urex::SynthConfig config;
  if (!a.config.empty()) config = urex::synth_config_from_json(urex::read_json_file(a.config));
  if (a.seed) config.seed = *a.seed;
  const auto synth = urex::synth_corpus(config);
  urex::save_corpus(synth.corpus, a.out);
  std::cout << "wrote " << synth.corpus.size() << " instances (" << config.n_relation_types
            << " relations, seed " << config.seed << ") to " << a.out << '\n';
  return 0;
}

struct EtypeArgs {
  std::string corpus;
  std::string out;
  std::string report;
};

int run_etype(const EtypeArgs& a) {
  const auto corpus = urex::load_corpus(a.corpus);
  const auto clustering = urex::etype_cluster(corpus);
  if (!a.out.empty()) urex::write_json_file(a.out, urex::to_json(clustering));
  std::cout << "EType: " << corpus.size() << " instances\n";
  if (corpus.n_labelled() > 0) {
    const auto report = urex::evaluate(clustering, corpus);
    print_report("EType", report);
    if (!a.report.empty()) urex::write_json_file(a.report, urex::to_json(report));
  } else if (!a.report.empty()) {
    throw urex::DataError("cannot write a report: corpus " + a.corpus + " has no gold labels");
  }
  return 0;
}

struct TrainArgs {
  std::string corpus;
  std::string dev;
  std::string test;
  std::string config;
  std::string preset = "etype+";
  std::string out;
  std::string pred;
  std::string report;
  std::string history;
  std::optional<std::uint64_t> seed;
  std::size_t runs = 3;
  std::optional<std::size_t> clusters;
  std::optional<std::string> features;
  std::optional<std::size_t> epochs;
};

int run_train(const TrainArgs& a) {
  urex::TrainConfig config;
  if (a.preset == "march") {
    config = urex::TrainConfig::march();
  } else if (a.preset == "simon") {
    config = urex::TrainConfig::simon();
  } else if (a.preset != "etype+") {
    throw urex::ConfigError("unknown preset '" + a.preset + "' (expected etype+, march, simon)");
  }
  if (!a.config.empty()) config = urex::train_config_from_json(urex::read_json_file(a.config), config);
  if (a.seed) config.seed = *a.seed;
  if (a.clusters) config.c = *a.clusters;
  if (a.features) config.features = urex::FeatureSet::parse(*a.features);
  if (a.epochs) config.max_epochs = *a.epochs;
  config.validate();
  if (a.runs == 0) throw urex::ConfigError("--runs must be positive");

  const auto train_corpus = urex::load_corpus(a.corpus);
  const auto dev = a.dev.empty() ? train_corpus : urex::load_corpus(a.dev);
  const auto eval_corpus = !a.test.empty() ? urex::load_corpus(a.test) : dev;
  const std::string eval_name = !a.test.empty() ? "test" : (!a.dev.empty() ? "dev" : "train");

  std::vector<urex::ClusteringReport> reports;
  json histories = json::array();
  for (std::size_t run = 0; run < a.runs; ++run) {
    auto run_config = config;
    run_config.seed = config.seed + run;
    const auto result = urex::train(run_config, train_corpus, dev);
    const auto clustering = urex::induce_clustering(result.model, eval_corpus);
    histories.push_back(urex::history_to_json(
        result.history, "etype+ seed=" + std::to_string(run_config.seed)));
    if (eval_corpus.n_labelled() > 0) {
      reports.push_back(urex::evaluate(clustering, eval_corpus));
      print_report("run " + std::to_string(run) + " (seed " + std::to_string(run_config.seed) +
                       ", best epoch " + std::to_string(result.history.best_epoch) + ") " + eval_name,
                   reports.back());
    }
    if (run == 0) {
      if (!a.out.empty()) {
        urex::save_checkpoint(a.out, result.model.params,
                              urex::VocabFingerprint::of(result.model.vocab, result.model.index));
      }
      if (!a.pred.empty()) urex::write_json_file(a.pred, urex::to_json(clustering));
    }
  }
  if (!a.history.empty()) urex::write_json_file(a.history, histories);
  if (!reports.empty()) {
    const auto mean = mean_report(reports);
    print_report("mean over " + std::to_string(reports.size()) + " runs (" + eval_name + ")", mean);
    if (!a.report.empty()) {
      auto j = urex::to_json(mean);
      j["runs"] = json::array();
      for (const auto& r : reports) j["runs"].push_back(urex::to_json(r));
      j["config"] = urex::to_json(config);
      urex::write_json_file(a.report, j);
    }
  } else if (!a.report.empty()) {
    throw urex::DataError("cannot write a report: evaluation corpus has no gold labels");
  }
  return 0;
}

struct EvalArgs {
  std::string pred;
  std::string corpus;
  std::string report;
};

int run_eval(const EvalArgs& a) {
  const auto pred = urex::clustering_from_json(urex::read_json_file(a.pred));
  const auto corpus = urex::load_corpus(a.corpus);
  if (pred.size() != corpus.size()) {
    throw urex::DataError("prediction file " + a.pred + " has " + std::to_string(pred.size()) +
                          " labels but corpus " + a.corpus + " has " +
                          std::to_string(corpus.size()) + " instances");
  }
  const auto report = urex::evaluate(pred, corpus);
  print_report("eval", report);
  if (!a.report.empty()) urex::write_json_file(a.report, urex::to_json(report));
  return 0;
}

struct OracleArgs {
  std::string corpus;
  std::string out;
  std::string config;
  std::vector<std::string> settings;
  std::size_t epochs = urex::OracleConfig{}.epochs;
  std::size_t runs = 3;
  std::optional<std::uint64_t> seed;
  std::size_t parallel = 1;
  bool labelled_only = false;
};

int run_oracle(const OracleArgs& a) {
  urex::OracleConfig config;
  if (!a.config.empty()) config.train = urex::train_config_from_json(urex::read_json_file(a.config));
  if (a.seed) config.train.seed = *a.seed;
  config.epochs = a.epochs;
  config.runs = a.runs;
  config.labelled_only = a.labelled_only;
  if (a.parallel == 0) throw urex::ConfigError("--parallel must be at least 1");

  std::vector<urex::OracleSetting> settings;
  if (a.settings.empty()) {
    settings.assign(urex::kAllOracleSettings.begin(), urex::kAllOracleSettings.end());
  } else {
    for (const auto& s : a.settings) settings.push_back(urex::parse_oracle_setting(s));
  }
  const auto corpus = urex::load_corpus(a.corpus);

  std::vector<urex::OracleCurve> curves(settings.size());
  for (std::size_t start = 0; start < settings.size(); start += a.parallel) {
    const auto stop = std::min(settings.size(), start + a.parallel);
    std::vector<std::future<urex::OracleCurve>> jobs;
    for (auto i = start; i < stop; ++i) {
      jobs.push_back(std::async(a.parallel > 1 ? std::launch::async : std::launch::deferred,
                                [&, i] { return urex::oracle_loss_curve(corpus, settings[i], config); }));
    }
    for (auto i = start; i < stop; ++i) curves[i] = jobs[i - start].get();
  }

  fs::create_directories(a.out);
  for (const auto& curve : curves) {
    const auto path = fs::path(a.out) / (std::string(urex::oracle_name(curve.setting)) + ".json");
    urex::write_json_file(path, urex::to_json(curve));
    std::printf("%-20s epoch0=%.4f final=%.4f -> %s\n", std::string(urex::oracle_name(curve.setting)).c_str(),
                curve.nll_pos.front(), curve.nll_pos.back(), path.string().c_str());
  }
  return 0;
}

struct StatsArgs {
  std::string corpus;
  std::string out;
  std::size_t top = 15;
};

int run_stats(const StatsArgs& a) {
  const auto corpus = urex::load_corpus(a.corpus);
  const auto stats = urex::relation_distribution(corpus);
  auto j = urex::to_json(stats);
  std::printf("%zu instances, %zu labelled, top-%zu share %.2f%%\n", stats.n_instances,
              stats.n_labelled, a.top, stats.top_k_share(a.top));
  if (stats.n_labelled > 0) {
    const double trivial = urex::trivial_homogeneity_v(urex::gold_labels(corpus));
    std::printf("trivial-homogeneity V-measure %.2f%%\n", 100.0 * trivial);
    j["trivial_homogeneity_v"] = 100.0 * trivial;
  }
  if (!a.out.empty()) urex::write_json_file(a.out, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urex: unsupervised relation extraction from entity types"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "Generate a planted synthetic corpus (JSON lines)");
  cmd_synth->add_option("--config", synth.config, "Synthetic corpus config (JSON); built-in defaults if omitted");
  cmd_synth->add_option("--out", synth.out, "Output corpus path")->required();
  cmd_synth->add_option("--seed", synth.seed, "Override the config seed");

  EtypeArgs etype;
  auto* cmd_etype = app.add_subcommand("etype", "Cluster by entity-type pair and evaluate");
  cmd_etype->add_option("--corpus", etype.corpus, "Corpus (JSON lines)")->required();
  cmd_etype->add_option("--out", etype.out, "Write the clustering as {\"labels\": [...]}");
  cmd_etype->add_option("--report", etype.report, "Write the evaluation report (JSON, percent)");

  TrainArgs tr;
  auto* cmd_train = app.add_subcommand("train", "Train EType+ through the link predictor");
  cmd_train->add_option("--corpus", tr.corpus, "Training corpus (JSON lines)")->required();
  cmd_train->add_option("--dev", tr.dev, "Dev corpus for early stopping (default: labelled training instances)");
  cmd_train->add_option("--test", tr.test, "Corpus to cluster and evaluate (default: dev)");
  cmd_train->add_option("--config", tr.config, "Train config (JSON) overriding the preset");
  cmd_train->add_option("--preset", tr.preset, "Hyper-parameter preset: etype+, march, simon")->capture_default_str();
  cmd_train->add_option("--out", tr.out, "Write the first run's checkpoint (JSON)");
  cmd_train->add_option("--pred", tr.pred, "Write the first run's clustering of the evaluation corpus");
  cmd_train->add_option("--report", tr.report, "Write the mean evaluation report over runs (JSON, percent)");
  cmd_train->add_option("--history", tr.history, "Write per-run training histories (JSON)");
  cmd_train->add_option("--seed", tr.seed, "Seed of the first run (default 13); run i uses seed+i");
  cmd_train->add_option("--runs", tr.runs, "Number of runs to average")->capture_default_str();
  cmd_train->add_option("--clusters", tr.clusters, "Number of relation slots c (default 10)");
  cmd_train->add_option("--features", tr.features,
                        "Comma list of feature templates: typepair, entity, bow, deppath, pos, trigger "
                        "(default typepair)");
  cmd_train->add_option("--epochs", tr.epochs, "Maximum number of epochs (default 30)");

  EvalArgs ev;
  auto* cmd_eval = app.add_subcommand("eval", "Evaluate a clustering against a corpus' gold labels");
  cmd_eval->add_option("--pred", ev.pred, "Clustering JSON {\"labels\": [...]}")->required();
  cmd_eval->add_option("--corpus", ev.corpus, "Corpus (JSON lines)")->required();
  cmd_eval->add_option("--report", ev.report, "Write the evaluation report (JSON, percent)");

  OracleArgs oracle;
  auto* cmd_oracle = app.add_subcommand("oracle-loss", "Link-predictor loss curves under fixed relation assignments");
  cmd_oracle->add_option("--corpus", oracle.corpus, "Corpus (JSON lines)")->required();
  cmd_oracle->add_option("--out", oracle.out, "Output directory; one <setting>.json per curve")->required();
  cmd_oracle->add_option("--config", oracle.config, "Train config (JSON) for the link predictor");
  cmd_oracle->add_option("--setting", oracle.settings,
                         "Oracle setting(s): rand10, rand10-silver-freq, one-relation, etype16, "
                         "silver-top10, silver-full (default: all)");
  cmd_oracle->add_option("--epochs", oracle.epochs, "Training epochs")->capture_default_str();
  cmd_oracle->add_option("--runs", oracle.runs, "Runs averaged per curve")->capture_default_str();
  cmd_oracle->add_option("--seed", oracle.seed, "Seed of the first run (default 13)");
  cmd_oracle->add_option("--parallel", oracle.parallel, "Settings computed concurrently")->capture_default_str();
  cmd_oracle->add_flag("--labelled-only", oracle.labelled_only, "Drop unlabelled instances first");

  StatsArgs stats;
  auto* cmd_stats = app.add_subcommand("stats", "Corpus relation distribution");
  cmd_stats->add_option("--corpus", stats.corpus, "Corpus (JSON lines)")->required();
  cmd_stats->add_option("--out", stats.out, "Write statistics (JSON)");
  cmd_stats->add_option("--top", stats.top, "Report the share of the top-k labels")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*cmd_synth) return run_synth(synth);
    if (*cmd_etype) return run_etype(etype);
    if (*cmd_train) return run_train(tr);
    if (*cmd_eval) return run_eval(ev);
    if (*cmd_oracle) return run_oracle(oracle);
    if (*cmd_stats) return run_stats(stats);
  } catch (const urex::ConfigError& e) {
    std::cerr << "urex: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "urex: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
