#include "hyperconn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "hyperconn/error.hpp"
#include "hyperconn/estimators.hpp"
#include "hyperconn/hyperconnectome.hpp"
#include "hyperconn/io.hpp"
#include "hyperconn/learn.hpp"
#include "hyperconn/simulation.hpp"

namespace hyperconn::cli {

namespace fs = std::filesystem;

namespace {

// Keys echoed for each command, in the order they are documented.
const std::map<std::string, std::vector<std::string>>& echo_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"simulate", {"cohort", "subjects-x", "subjects-y", "cases", "controls", "variables", "samples", "seed"}},
      {"connectome", {"input", "roi", "samples", "transpose"}},
      {"hyperconnectome",
       {"input", "roi", "samples", "transpose", "epsilon", "d", "variant", "log-base", "reduce", "edges",
        "threshold", "exclude-degenerate"}},
      {"classify",
       {"input", "roi", "samples", "transpose", "epsilon", "d", "variant", "log-base", "exclude-degenerate",
        "features", "trials", "fraction", "seed", "lambda", "epochs", "ttest"}},
      {"report", {"input"}},
  };
  return keys;
}

// Field accessors by key, shared by echo() and apply_config().
struct Field {
  std::function<nlohmann::json(const RunConfig&)> get;
  std::function<void(RunConfig&, const nlohmann::json&)> set;
};

template <class T>
Field member(T RunConfig::*ptr) {
  return {[ptr](const RunConfig& c) { return nlohmann::json(c.*ptr); },
          [ptr](RunConfig& c, const nlohmann::json& v) { c.*ptr = v.get<T>(); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f{
      {"input", member(&RunConfig::input)},
      {"epsilon", member(&RunConfig::epsilon)},
      {"d", member(&RunConfig::d)},
      {"variant", member(&RunConfig::variant)},
      {"seed", member(&RunConfig::seed)},
      {"trials", member(&RunConfig::trials)},
      {"fraction", member(&RunConfig::fraction)},
      {"roi", member(&RunConfig::roi)},
      {"samples", member(&RunConfig::samples)},
      {"log-base", member(&RunConfig::log_base)},
      {"threshold", member(&RunConfig::threshold)},
      {"transpose", member(&RunConfig::transpose)},
      {"cohort", member(&RunConfig::cohort)},
      {"subjects-x", member(&RunConfig::subjects_x)},
      {"subjects-y", member(&RunConfig::subjects_y)},
      {"cases", member(&RunConfig::cases)},
      {"controls", member(&RunConfig::controls)},
      {"variables", member(&RunConfig::variables)},
      {"reduce", member(&RunConfig::reduce)},
      {"edges", member(&RunConfig::edges)},
      {"exclude-degenerate", member(&RunConfig::exclude_degenerate)},
      {"features", member(&RunConfig::features)},
      {"ttest", member(&RunConfig::ttest)},
      {"lambda", member(&RunConfig::lambda)},
      {"epochs", member(&RunConfig::epochs)},
  };
  return f;
}

void validate(const RunConfig& c) {
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) throw ContractViolation("--epsilon must be positive");
  if (c.d < 2) throw ContractViolation("--d must be >= 2");
  parse_variant(c.variant);
  if (c.trials < 1) throw ContractViolation("--trials must be >= 1");
  if (!(c.fraction > 0.0 && c.fraction < 1.0)) throw ContractViolation("--fraction must be in (0, 1)");
  RoiRange::parse(c.roi);
  if (c.log_base != "nat" && c.log_base != "bit") throw ContractViolation("--log-base must be nat or bit");
  if (std::isnan(c.threshold)) throw ContractViolation("--threshold must be a number");
  if (c.cohort != "parity" && c.cohort != "standin") throw ContractViolation("--cohort must be parity or standin");
  if (c.features != "both" && c.features != "graph" && c.features != "hypergraph") {
    throw ContractViolation("--features must be both, graph or hypergraph");
  }
  if (c.ttest != "pooled" && c.ttest != "welch") throw ContractViolation("--ttest must be pooled or welch");
  if (!(c.lambda > 0.0)) throw ContractViolation("--lambda must be positive");
  if (c.epochs < 1) throw ContractViolation("--epochs must be >= 1");
}

IngestOptions ingest_options(const RunConfig& c) {
  return IngestOptions{RoiRange::parse(c.roi), c.samples, c.transpose};
}

fs::path prepare_output_dir(const RunConfig& c) {
  if (c.output.empty()) throw ContractViolation("--output is required");
  const fs::path dir(c.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  return dir;
}

template <class Fn>
void for_each_parallel(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < count; i += threads) guarded(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

nlohmann::json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

double as_number(const nlohmann::json& v) {
  if (v.is_string()) {
    return v.get<std::string>() == "-inf" ? -std::numeric_limits<double>::infinity()
                                          : std::numeric_limits<double>::infinity();
  }
  return v.get<double>();
}

}  // namespace

nlohmann::json RunConfig::echo() const {
  nlohmann::json out = nlohmann::json::object();
  out["command"] = command;
  const auto it = echo_keys().find(command);
  if (it == echo_keys().end()) return out;
  for (const auto& key : it->second) out[key] = fields().at(key).get(*this);
  return out;
}

void apply_config(RunConfig& config, const nlohmann::json& doc, const std::vector<std::string>& explicit_keys) {
  const nlohmann::json& source = doc.contains("config") && doc.at("config").is_object() ? doc.at("config") : doc;
  if (!source.is_object()) throw ContractViolation("config file must hold a JSON object");
  for (const auto& [key, value] : source.items()) {
    if (key == "command") continue;
    if (std::find(explicit_keys.begin(), explicit_keys.end(), key) != explicit_keys.end()) continue;
    const auto f = fields().find(key);
    if (f == fields().end()) throw ContractViolation("unknown config key '" + key + "'");
    try {
      f->second.set(config, value);
    } catch (const nlohmann::json::exception& e) {
      throw ContractViolation("bad value for config key '" + key + "': " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Commands

void cmd_simulate(const RunConfig& c) {
  validate(c);
  if (c.samples < 1) throw ContractViolation("--samples must be >= 1");
  const fs::path dir = prepare_output_dir(c);
  const Dataset ds = c.cohort == "parity"
                         ? gen_dataset(c.subjects_x, c.subjects_y, c.samples, c.seed)
                         : gen_standin_cohort(c.cases, c.controls, c.variables, c.samples, c.seed);
  save_dataset(dir, ds, c.echo());
}

void require_input(const RunConfig& c) {
  if (c.input.empty()) throw ContractViolation("--input is required");
}

void cmd_connectome(const RunConfig& c) {
  validate(c);
  require_input(c);
  const fs::path dir = prepare_output_dir(c);
  const Dataset ds = load_dataset(c.input, ingest_options(c));
  std::vector<std::string> files(ds.subjects.size());
  for_each_parallel(ds.subjects.size(), c.workers, [&](std::size_t i) {
    const auto& s = ds.subjects[i];
    if (s.data.rows() < 2) throw InsufficientVariables(s.id + ": connectome needs at least 2 variables");
    if (s.data.cols() < 2) throw InsufficientSamples(s.id + ": connectome needs at least 2 samples");
    files[i] = s.id + ".connectome.csv";
    write_file_atomic(dir / files[i], connectome_csv(connectome(s.data)));
  });
  nlohmann::json run{{"format", "hyperconn-run"}, {"config", c.echo()}, {"files", files}};
  write_file_atomic(dir / "run.json", run.dump(1) + "\n");
}

void cmd_hyperconnectome(const RunConfig& c) {
  validate(c);
  require_input(c);
  const fs::path dir = prepare_output_dir(c);
  const Dataset ds = load_dataset(c.input, ingest_options(c));
  const EpsilonThreshold eps(c.epsilon);
  const EstimatorVariant variant = parse_variant(c.variant);
  const bool include_degenerate = !c.exclude_degenerate;
  // Fan out across subjects when there are enough of them, otherwise across tuples.
  const bool per_subject = ds.subjects.size() >= c.workers;
  const unsigned sweep_workers = per_subject ? 1 : c.workers;

  std::vector<std::string> files(ds.subjects.size());
  for_each_parallel(ds.subjects.size(), per_subject ? c.workers : 1, [&](std::size_t i) {
    const auto& s = ds.subjects[i];
    HyperConnectome hc = build_hyperconnectome(s.data, c.d, eps, variant, sweep_workers);
    if (c.log_base == "bit") hc = to_bits(hc);
    hc.source_id = s.id;
    hc.config = c.echo();
    files[i] = s.id + ".hc.json";
    write_file_atomic(dir / files[i], serialize_hc_text(hc));
    if (c.reduce) {
      write_file_atomic(dir / (s.id + ".pairwise.csv"),
                        pairwise_csv(pairwise_reduce(hc, include_degenerate), hc.roi_labels));
    }
    if (c.edges) {
      write_file_atomic(dir / (s.id + ".edges.csv"),
                        edges_csv(significant_edges(hc, c.threshold, include_degenerate), hc.order()));
    }
  });
}

nlohmann::json classify_document(const RunConfig& c) {
  validate(c);
  require_input(c);
  const Dataset ds = load_dataset(c.input, ingest_options(c));
  if (ds.positive_label.empty()) throw ContractViolation("classify needs a labeled dataset directory");
  const auto labels = dataset_labels(ds);
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  const auto negatives = static_cast<std::ptrdiff_t>(labels.size()) - positives;
  if (positives < 2 || negatives < 2) throw ContractViolation("classify needs at least 2 subjects per class");

  ExperimentConfig ec;
  ec.trials = c.trials;
  ec.fraction = c.fraction;
  ec.seed = c.seed;
  ec.svm = SvmConfig{c.lambda, c.epochs, c.seed};
  ec.epsilon = c.epsilon;
  ec.d = c.d;
  ec.variant = parse_variant(c.variant);
  ec.include_degenerate = !c.exclude_degenerate;
  ec.workers = c.workers;

  std::vector<FeatureKind> kinds;
  if (c.features != "hypergraph") kinds.push_back(FeatureKind::Graph);
  if (c.features != "graph") kinds.push_back(FeatureKind::Hypergraph);

  nlohmann::json doc;
  doc["format"] = "hyperconn-experiment";
  doc["config"] = c.echo();
  doc["subjects"] = ds.subjects.size();
  doc["positive_label"] = ds.positive_label;
  doc["positives"] = positives;
  doc["negatives"] = negatives;
  std::map<FeatureKind, std::vector<double>> test_accuracy;
  nlohmann::json results = nlohmann::json::object();
  for (FeatureKind kind : kinds) {
    auto features = dataset_features(ds, kind, ec);
    if (kind == FeatureKind::Hypergraph && c.log_base == "bit") {
      for (auto& f : features) {
        for (double& v : f.values) v /= std::numbers::ln2;
      }
    }
    const auto reports = run_experiment(features, labels, ec);
    nlohmann::json trials = nlohmann::json::array();
    double train = 0.0;
    double test = 0.0;
    double f1 = 0.0;
    for (const auto& r : reports) {
      trials.push_back({{"train_accuracy", r.train_accuracy},
                        {"test_accuracy", r.test_accuracy},
                        {"f1", r.f1},
                        {"split_seed", r.split_seed}});
      train += r.train_accuracy;
      test += r.test_accuracy;
      f1 += r.f1;
      test_accuracy[kind].push_back(r.test_accuracy);
    }
    const double count = static_cast<double>(reports.size());
    results[std::string(to_string(kind))] = {
        {"features", features.front().values.size()},
        {"trials", std::move(trials)},
        {"mean", {{"train_accuracy", train / count}, {"test_accuracy", test / count}, {"f1", f1 / count}}},
    };
  }
  doc["results"] = std::move(results);
  if (kinds.size() == 2) {
    const auto& hyper = test_accuracy[FeatureKind::Hypergraph];
    const auto& graph = test_accuracy[FeatureKind::Graph];
    if (hyper.size() >= 2) {
      const TTestResult tt =
          two_sample_ttest(hyper, graph, c.ttest == "welch" ? TTestKind::Welch : TTestKind::Pooled);
      doc["ttest"] = {{"kind", c.ttest},      {"metric", "test_accuracy"}, {"a", "hypergraph"},
                      {"b", "graph"},         {"t", number_or_string(tt.t)}, {"p", tt.p},
                      {"df", tt.df}};
    }
  }
  return doc;
}

void cmd_classify(const RunConfig& c) {
  if (c.output.empty()) throw ContractViolation("--output is required");
  const auto doc = classify_document(c);
  const fs::path out(c.output);
  if (out.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + out.parent_path().string());
  }
  write_file_atomic(out, doc.dump(1) + "\n");
}

std::string format_report(const nlohmann::json& report) {
  try {
    std::string out;
    const auto& cfg = report.at("config");
    out += fmt::format("Linear SVM classification: {} subjects ({} positive '{}'), {} trials, split {}\n",
                       report.at("subjects").get<std::size_t>(), report.at("positives").get<std::int64_t>(),
                       report.at("positive_label").get<std::string>(), cfg.at("trials").get<std::size_t>(),
                       cfg.at("fraction").get<double>());
    out += fmt::format("epsilon = {}, d = {}, variant = {}\n\n", cfg.at("epsilon").get<double>(),
                       cfg.at("d").get<std::size_t>(), cfg.at("variant").get<std::string>());
    out += fmt::format("{:<12}|{:>19} |{:>18} |{:>10} |\n", "", "Training Accuracy", "Testing Accuracy", "F1 Score");
    const auto& results = report.at("results");
    for (const char* kind : {"graph", "hypergraph"}) {
      if (!results.contains(kind)) continue;
      const auto& mean = results.at(kind).at("mean");
      std::string name = kind;
      name[0] = static_cast<char>(std::toupper(name[0]));
      out += fmt::format("{:<12}|{:>18.1f}% |{:>17.1f}% |{:>10.2f} |\n", name,
                         100.0 * mean.at("train_accuracy").get<double>(),
                         100.0 * mean.at("test_accuracy").get<double>(), mean.at("f1").get<double>());
    }
    if (report.contains("ttest")) {
      const auto& tt = report.at("ttest");
      out += fmt::format("\ntwo-sample t-test ({}, test accuracy, hypergraph vs graph): t = {:.4f}, df = {}, p = {:.5g}\n",
                         tt.at("kind").get<std::string>(), as_number(tt.at("t")), tt.at("df").get<double>(),
                         tt.at("p").get<double>());
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("<report>", 0, std::string("malformed experiment report: ") + e.what());
  }
}

void cmd_report(const RunConfig& c, std::ostream& out) {
  const std::string text = read_file(c.input);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(c.input, 0, e.what());
  }
  if (doc.value("format", std::string()) != "hyperconn-experiment") {
    throw ParseError(c.input, 0, "not an experiment report");
  }
  out << format_report(doc);
}

// ---------------------------------------------------------------------------
// Entry point

namespace {

void add_ingest_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("-i,--input", c.input, "Dataset directory (with manifest.json) or a single CSV file");
  sub->add_option("--roi", c.roi, "1-based inclusive ROI range: all, N or A:B");
  sub->add_option("--samples", c.samples, "Keep the first N samples of each series (0 keeps all)");
  sub->add_flag("--transpose", c.transpose, "Input CSV has one column per variable");
}

void add_estimator_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--epsilon", c.epsilon, "Epsilon-ball radius");
  sub->add_option("-d,--d", c.d, "Hyperedge order");
  sub->add_option("--variant", c.variant, "Estimator variant: paper, plugin or aligned");
  sub->add_option("--log-base", c.log_base, "Report entropies in nat or bit");
  sub->add_flag("--exclude-degenerate", c.exclude_degenerate, "Drop tuples with repeated indices");
}

void add_common_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("-o,--output", c.output, "Output path");
  sub->add_option("--workers", c.workers, "Worker threads (does not change results)");
  sub->add_option("--config", c.config_path, "JSON config file; command-line flags take precedence");
}

std::vector<std::string> explicit_keys(const CLI::App* sub) {
  std::vector<std::string> keys;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0) continue;
    for (const auto& name : opt->get_lnames()) keys.push_back(name);
  }
  return keys;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (!spdlog::get("hyperconn")) {
    auto logger = spdlog::stderr_color_mt("hyperconn");
    spdlog::set_default_logger(logger);
  }

  RunConfig c;
  c.workers = std::max(1u, std::thread::hardware_concurrency());
  CLI::App app{"Connectomes and entropic hyper-connectomes from multivariate time series"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic labeled dataset");
  simulate->add_option("--cohort", c.cohort, "parity (X versus Y subjects) or standin (case/control cohort)");
  simulate->add_option("--subjects-x", c.subjects_x, "Number of X subjects");
  simulate->add_option("--subjects-y", c.subjects_y, "Number of Y subjects");
  simulate->add_option("--cases", c.cases, "Stand-in cohort: number of case subjects");
  simulate->add_option("--controls", c.controls, "Stand-in cohort: number of control subjects");
  simulate->add_option("--variables", c.variables, "Stand-in cohort: variables per subject");
  simulate->add_option("--samples", c.samples, "Samples per subject");
  simulate->add_option("--seed", c.seed, "Random seed");
  add_common_options(simulate, c);

  auto* conn = app.add_subcommand("connectome", "Pearson correlation matrix per subject");
  add_ingest_options(conn, c);
  add_common_options(conn, c);

  auto* hyper = app.add_subcommand("hyperconnectome", "Total-correlation hyper-connectome per subject");
  add_ingest_options(hyper, c);
  add_estimator_options(hyper, c);
  hyper->add_flag("--reduce", c.reduce, "Also write the pairwise-sum matrix");
  hyper->add_flag("--edges", c.edges, "Also write the significant-edge list");
  hyper->add_option("--threshold", c.threshold, "Edge significance threshold");
  add_common_options(hyper, c);

  auto* classify = app.add_subcommand("classify", "Graph versus hypergraph linear SVM experiment");
  add_ingest_options(classify, c);
  add_estimator_options(classify, c);
  classify->add_option("--features", c.features, "both, graph or hypergraph");
  classify->add_option("--trials", c.trials, "Independent random-split trials");
  classify->add_option("--fraction", c.fraction, "Training fraction of each split");
  classify->add_option("--seed", c.seed, "Random seed");
  classify->add_option("--lambda", c.lambda, "SVM regularization");
  classify->add_option("--epochs", c.epochs, "SVM epochs");
  classify->add_option("--ttest", c.ttest, "pooled or welch");
  add_common_options(classify, c);

  auto* report = app.add_subcommand("report", "Print an experiment report as a table");
  report->add_option("-i,--input", c.input, "Experiment report document")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    if (!c.config_path.empty()) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(read_file(c.config_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(c.config_path, 0, e.what());
      }
      apply_config(c, doc, explicit_keys(sub));
    }
    if (c.workers == 0) throw ContractViolation("--workers must be >= 1");
    if (c.command == "simulate") {
      cmd_simulate(c);
    } else if (c.command == "connectome") {
      cmd_connectome(c);
    } else if (c.command == "hyperconnectome") {
      cmd_hyperconnectome(c);
    } else if (c.command == "classify") {
      cmd_classify(c);
    } else {
      cmd_report(c, out);
    }
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace hyperconn::cli
