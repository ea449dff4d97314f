#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "gda/ca_engine.hpp"
#include "gda/cli/config.hpp"
#include "gda/inference.hpp"

namespace gda::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

int exit_code_for(const std::exception& e);

struct FitOutcome {
  FactorModel model;
  std::vector<std::string> demoted;
  std::size_t individuals = 0;
};

/// Builds the coding and fits the configured model; writes nothing.
FitOutcome run_fit(const RunConfig& config);

/// Writes model.json, rates.csv, rates.txt and manifest.json to config.out.
void cmd_fit(const RunConfig& config, std::ostream& log);

/// Writes report_axis<a>.txt/.csv for the first configured axis and echoes
/// the text table. Reads only the stored model.
void cmd_report(const RunConfig& config, std::ostream& log);

/// Writes plot_axes_<a>_<b>.svg.
void cmd_plot(const RunConfig& config, std::ostream& log);

/// Writes typicality.json and prints a summary.
TypicalityResult cmd_typicality(const RunConfig& config, std::ostream& log);

/// Writes dendrogram.txt and clusters.csv.
void cmd_cluster(const RunConfig& config, std::ostream& log);

/// Human contribution/coordinate table for one axis (0-based).
std::string format_report(const FactorModel& model, std::size_t axis);

}  // namespace gda::cli
