#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperconn/core.hpp"

namespace hyperconn::cli {

/// Resolved parameters of one command. Everything except `workers` and
/// `config_path` is echoed into the documents the command writes.
struct RunConfig {
  std::string command;
  std::string input;
  std::string output;

  double epsilon = 1e-5;
  Index d = 3;
  std::string variant = "paper";
  std::uint64_t seed = 0;
  Index trials = 10;
  double fraction = 0.5;
  std::string roi = "all";
  Index samples = 20;
  std::string log_base = "nat";
  double threshold = 256.0;
  bool transpose = false;

  // simulate
  std::string cohort = "parity";
  Index subjects_x = 1000;
  Index subjects_y = 1000;
  Index cases = 104;
  Index controls = 124;
  Index variables = 61;

  // hyperconnectome
  bool reduce = false;
  bool edges = false;
  bool exclude_degenerate = false;

  // classify
  std::string features = "both";
  std::string ttest = "pooled";
  double lambda = 1e-4;
  Index epochs = 200;

  unsigned workers = 1;
  std::string config_path;

  nlohmann::json echo() const;
};

/// Applies values from a JSON config (or any output document's "config"
/// field) to keys the command line did not set.
void apply_config(RunConfig& config, const nlohmann::json& doc, const std::vector<std::string>& explicit_keys);

void cmd_simulate(const RunConfig& config);
void cmd_connectome(const RunConfig& config);
void cmd_hyperconnectome(const RunConfig& config);
void cmd_classify(const RunConfig& config);
/// Pretty-prints an experiment report as a Table-style summary.
void cmd_report(const RunConfig& config, std::ostream& out);

/// Builds the experiment report document; `cmd_classify` writes it.
nlohmann::json classify_document(const RunConfig& config);

/// Formats a report document as an aligned text table.
std::string format_report(const nlohmann::json& report);

/// Full command-line entry point. Exit codes: 0 success, 1 contract
/// violation in inputs or parameters, 2 I/O or parse failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperconn::cli
