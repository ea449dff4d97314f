// gda: command-line driver for fitting, reporting, plotting, typicality
// testing and clustering. See README.md for the configuration format.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gda/cli/commands.hpp"
#include "gda/cli/config.hpp"

int main(int argc, char** argv) {
  using namespace gda::cli;

  CLI::App app{"Geometric data analysis: CA, MCA, standardized PCA, typicality tests, Ward clustering"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> axes;
  std::optional<std::string> rates;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (INI)")->required();
    sub->add_option("--axes", axes, "Axis pair, e.g. 1,2");
    sub->add_option("--rates", rates, "Inertia rates for labels: raw|modified");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--out", out, "Output directory");
  };
  auto* fit = app.add_subcommand("fit", "Code the data, fit the model and write model artifacts");
  auto* report = app.add_subcommand("report", "Contribution/coordinate table for an axis");
  auto* plot = app.add_subcommand("plot", "SVG factor plane");
  auto* typicality = app.add_subcommand("typicality", "Permutation typicality test of a subcloud");
  auto* cluster = app.add_subcommand("cluster", "Ward clustering of factor coordinates");
  for (auto* sub : {fit, report, plot, typicality, cluster}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (axes) cfg.axes = parse_axes(*axes);
    if (rates) cfg.rates = rate_mode_from_string(*rates);
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;

    if (fit->parsed()) {
      cmd_fit(cfg, std::cout);
    } else if (report->parsed()) {
      cmd_report(cfg, std::cout);
    } else if (plot->parsed()) {
      cmd_plot(cfg, std::cout);
    } else if (typicality->parsed()) {
      cmd_typicality(cfg, std::cout);
    } else if (cluster->parsed()) {
      cmd_cluster(cfg, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "gda: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}
