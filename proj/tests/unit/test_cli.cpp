#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <fmt/core.h>
#include <json.hpp>

#include "gda/cli/commands.hpp"
#include "gda/cli/config.hpp"
#include "gda/cli/svg_plot.hpp"
#include "gda/model_io.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gda;
using namespace gda::cli;
namespace fs = std::filesystem;

namespace {

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_work" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

RunConfig fixture_config(const std::string& name, const fs::path& out) {
  RunConfig cfg = load_config(testing::fixture(name + "/config.ini"));
  cfg.out = out;
  return cfg;
}

int run_gda(const std::string& args) {
  const std::string cmd = std::string("\"") + GDA_BINARY + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string layer(const std::string& svg, const std::string& id) {
  const auto start = svg.find("<g id=\"" + id + "\"");
  REQUIRE(start != std::string::npos);
  const auto end = svg.find("</g>", start);
  return svg.substr(start, end - start);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

double attr(const std::string& text, const std::string& name) {
  std::smatch m;
  const std::regex re(name + "=\"([^\"]+)\"");
  REQUIRE(std::regex_search(text, m, re));
  return std::stod(m[1]);
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(R"(
[run]
kind = mca
input = data/survey.csv
schema = schema.ini
axes = 2,3
rates = modified
threshold = 10
max_axes = 5
supplementary = age|sex
seed = 99

[centroids]
columns = age

[typicality]
labels = a|b|c
n_perm = 50
axes = 2
threads = 4

[cluster]
cloud = cols
k = 3
axes = 1,2
)");
  const auto cfg = parse_config(in, "/base");
  CHECK(cfg.kind == AnalysisKind::MCA);
  CHECK(cfg.resolve(cfg.input) == fs::path("/base/data/survey.csv"));
  CHECK(cfg.axes == std::pair<std::size_t, std::size_t>{2, 3});
  CHECK(cfg.rates == RateMode::Modified);
  CHECK(cfg.threshold == 10u);
  CHECK(cfg.max_axes == 5u);
  CHECK(cfg.supplementary == std::vector<std::string>{"age", "sex"});
  CHECK(cfg.seed == 99u);
  CHECK(cfg.centroid_columns == std::vector<std::string>{"age"});
  CHECK(cfg.typicality.enabled);
  CHECK(cfg.typicality.labels.size() == 3);
  CHECK(cfg.typicality.n_perm == 50u);
  CHECK(cfg.typicality.threads == 4u);
  CHECK_FALSE(cfg.cluster.rows);
  CHECK(cfg.cluster.axes == std::vector<std::size_t>{1, 2});
  CHECK(cfg.model_path() == fs::path("gda-out/model.json"));
}

TEST_CASE("config errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  CHECK_ERROR_CODE(parse("[run]\ninput = x\nschema = y\n"), ErrorCode::BadConfig);
  CHECK_ERROR_CODE(parse("[run]\nkind = lda\ninput = x\n"), ErrorCode::BadConfig);
  CHECK_ERROR_CODE(parse("[run]\nkind = mca\ninput = x\nschema = y\ncolour = red\n"), ErrorCode::BadConfig);
  CHECK_ERROR_CODE(parse("[run]\nkind = mca\ninput = x\nschema = y\naxes = 1,1\n"), ErrorCode::BadAxis);
  CHECK_ERROR_CODE(parse("[run]\nkind = mca\ninput = x\nschema = y\naxes = 0,1\n"), ErrorCode::BadAxis);
  CHECK_ERROR_CODE(parse("[run]\nkind = ca\ninput = x\nschema = y\n"), ErrorCode::BadConfig);
  CHECK_ERROR_CODE(parse("[run]\nkind = pca\ninput = x\n"), ErrorCode::BadConfig);
  CHECK_ERROR_CODE(parse("[run]\nkind = mca\ninput = x\nschema = y\n[typicality]\nn_perm = 0\nlabels = a\n"),
                   ErrorCode::BadConfig);
  CHECK_ERROR_CODE(parse("[run]\nkind = mca\ninput = x\nschema = y\n[typicality]\nn_perm = 5\n"), ErrorCode::BadConfig);
  CHECK_ERROR_CODE(parse("[run]\nkind = mca\ninput = x\nschema = y\n[plot]\nsize = 3\n"), ErrorCode::BadConfig);
  CHECK(parse_axes("3,1") == std::pair<std::size_t, std::size_t>{3, 1});
  CHECK_ERROR_CODE(parse_axes("1"), ErrorCode::BadAxis);
  CHECK_ERROR_CODE(parse_axes("a,b"), ErrorCode::BadAxis);
}

TEST_CASE("fit writes model, rates and manifest") {
  const auto out = work_dir("fit_tiny");
  std::ostringstream log;
  cmd_fit(fixture_config("tiny", out), log);
  const auto model = load_model(out / "model.json");
  CHECK(model.rates().sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fs::exists(out / "rates.csv"));
  CHECK(fs::exists(out / "rates.txt"));
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["seed"] == 1);
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["demoted_count"] == 0);
}

TEST_CASE("fit on the activities fixture demotes exactly four modalities") {
  const auto out = work_dir("fit_activities");
  std::ostringstream log;
  cmd_fit(fixture_config("activities", out), log);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["demoted_count"] == 4);
  CHECK(manifest["demoted"] == nlohmann::json({"cinema_dont know", "concerts_dont know", "museums_dont know",
                                               "travel_dont know"}));
  CHECK(manifest["q_active"] == 7);

  // The modified table only lists eigenvalues above 1/Q.
  const auto model = load_model(out / "model.json");
  std::istringstream rates(slurp(out / "rates.csv"));
  const auto doc = parse_csv(rates);
  REQUIRE(doc.rows.size() == model.rank());
  double sum = 0.0;
  for (std::size_t l = 0; l < doc.rows.size(); ++l) {
    const bool above = model.eigenvalues(static_cast<Eigen::Index>(l)) > 1.0 / 7.0;
    CHECK(doc.rows[l][4].empty() != above);
    if (above) sum += std::stod(doc.rows[l][4]);
    CHECK(std::stod(doc.rows[l][1]) == model.eigenvalues(static_cast<Eigen::Index>(l)));
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("report on the 2x2 diagonal fixture") {
  const auto out = work_dir("report_diagonal");
  std::ostringstream log;
  const auto cfg = fixture_config("diagonal", out);
  cmd_fit(cfg, log);
  cmd_report(cfg, log);
  const std::string text = slurp(out / "report_axis1.txt");
  CHECK(count(text, "50.00") == 4);

  std::istringstream csv(slurp(out / "report_axis1.csv"));
  const auto doc = parse_csv(csv);
  REQUIRE(doc.rows.size() == 4);
  CHECK(doc.rows[0][0] == "main_col");
  CHECK(doc.rows[0][1] == "y_no");  // tie broken by label
  CHECK(doc.rows[1][1] == "y_yes");
  for (const auto& r : doc.rows) CHECK(std::stod(r[2]) == doctest::Approx(50.0).epsilon(1e-12));

  const std::string first = slurp(out / "report_axis1.csv");
  cmd_report(cfg, log);
  CHECK(slurp(out / "report_axis1.csv") == first);
  CHECK(slurp(out / "report_axis1.txt") == text);
}

TEST_CASE("report rows are sorted by descending contribution, ties by label") {
  std::mt19937_64 rng(19);
  const auto out = work_dir("report_sorted");
  for (int rep = 0; rep < 20; ++rep) {
    auto n = oracle::random_table(rng, 6, 5, 0, 4);
    // Duplicate columns force exact ties.
    n.col(4) = n.col(1);
    auto t = ContingencyTable::from_counts(n);
    const auto model = fit_ca(t);
    save_model(model, out / "model.json");
    RunConfig cfg;
    cfg.kind = AnalysisKind::CA;
    cfg.out = out;
    for (std::size_t a = 1; a <= std::min<std::size_t>(model.axes(), 2); ++a) {
      cfg.axes = {a, a == 1 ? 2 : 1};
      std::ostringstream log;
      cmd_report(cfg, log);
      std::istringstream csv(slurp(out / ("report_axis" + std::to_string(a) + ".csv")));
      const auto doc = parse_csv(csv);
      for (const char* section : {"main_col", "main_row"}) {
        std::vector<std::pair<double, std::string>> rows;
        for (const auto& r : doc.rows)
          if (r[0] == section) rows.emplace_back(std::stod(r[2]), r[1]);
        for (std::size_t k = 1; k < rows.size(); ++k) {
          const double d = rows[k - 1].first - rows[k].first;
          CHECK(d > -1e-9);
          if (std::abs(d) < 1e-9) CHECK(rows[k - 1].second < rows[k].second);
        }
      }
    }
  }
}

TEST_CASE("report on a missing axis is a config error") {
  const auto out = work_dir("report_axis");
  std::ostringstream log;
  auto cfg = fixture_config("diagonal", out);
  cmd_fit(cfg, log);
  cfg.axes = {2, 1};
  CHECK_ERROR_CODE(cmd_report(cfg, log), ErrorCode::BadAxis);
}

TEST_CASE("plot: 4-point fixture") {
  const auto out = work_dir("plot_tiny");
  std::ostringstream log;
  const auto cfg = fixture_config("tiny", out);
  cmd_fit(cfg, log);
  cmd_plot(cfg, log);
  const std::string svg = slurp(out / "plot_axes_1_2.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(layer(svg, "respondents"), "<circle") == 4);
  CHECK(count(svg, "<circle") == 4);
  CHECK(count(layer(svg, "modalities"), "<rect") == 4);

  // Crosshair lines pass through the image of (0, 0).
  const double s = attr(svg, "data-scale");
  const double xm = attr(svg, "data-x-mid");
  const double ym = attr(svg, "data-y-mid");
  const std::string ox = fmt::format("{:.3f}", 400.0 - s * xm);
  const std::string oy = fmt::format("{:.3f}", 300.0 + s * ym);
  const std::string cross = layer(svg, "crosshair");
  CHECK(cross.find("y1=\"" + oy + "\" x2=\"740.000\" y2=\"" + oy + "\"") != std::string::npos);
  CHECK(cross.find("x1=\"" + ox + "\" y1=\"60.000\" x2=\"" + ox + "\"") != std::string::npos);
}

TEST_CASE("plot: centroid markers sit at category_centroid through the declared transform") {
  const auto out = work_dir("plot_centroids");
  std::ostringstream log;
  auto cfg = fixture_config("activities", out);
  cfg.centroid_columns = {"sex"};
  cmd_fit(cfg, log);
  cmd_plot(cfg, log);
  const std::string svg = slurp(out / "plot_axes_1_2.svg");
  const auto model = load_model(out / "model.json");

  // Independent centroid: mass-weighted mean of the rows in each group.
  const auto doc = read_csv(testing::fixture("activities/survey.csv"));
  std::vector<std::pair<double, double>> expected;
  for (const std::string value : {"female", "male"}) {
    double x = 0, y = 0, w = 0;
    for (std::size_t i = 0; i < doc.rows.size(); ++i) {
      if (doc.rows[i][9] != value) continue;
      const double m = model.rows.masses(static_cast<Eigen::Index>(i));
      x += m * model.rows.coords(static_cast<Eigen::Index>(i), 0);
      y += m * model.rows.coords(static_cast<Eigen::Index>(i), 1);
      w += m;
    }
    expected.emplace_back(x / w, y / w);
  }

  // Viewport recomputed from every plotted point plus the origin.
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  auto take = [&](double x, double y) {
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  };
  for (Eigen::Index i = 0; i < model.rows.coords.rows(); ++i) take(model.rows.coords(i, 0), model.rows.coords(i, 1));
  for (Eigen::Index j = 0; j < model.cols.coords.rows(); ++j) take(model.cols.coords(j, 0), model.cols.coords(j, 1));
  for (const auto* list : {&model.sup_rows, &model.sup_cols, &model.centroids})
    for (const auto& p : *list) take(p.coords(0), p.coords(1));
  const double xr = 1.1 * (xhi - xlo), yr = 1.1 * (yhi - ylo);
  const double scale = std::min(680.0 / xr, 480.0 / yr);
  const double xmid = (xlo + xhi) / 2, ymid = (ylo + yhi) / 2;
  CHECK(attr(svg, "data-scale") == doctest::Approx(scale).epsilon(1e-12));
  CHECK(attr(svg, "data-x-mid") == doctest::Approx(xmid).epsilon(1e-12));

  const std::string cl = layer(svg, "centroids");
  const std::regex marker("data-x=\"([^\"]+)\" data-y=\"([^\"]+)\"");
  std::vector<std::pair<double, double>> found;
  for (std::sregex_iterator it(cl.begin(), cl.end(), marker), end; it != end; ++it)
    found.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  REQUIRE(found.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(found[k].first - (400.0 + scale * (expected[k].first - xmid))) < 6e-4);
    CHECK(std::abs(found[k].second - (300.0 - scale * (expected[k].second - ymid))) < 6e-4);
    CHECK(model.centroids[k].coords(0) == doctest::Approx(expected[k].first).epsilon(1e-10));
  }
  CHECK(count(layer(svg, "supplementary"), "<polygon") == model.sup_cols.size());
  CHECK(layer(svg, "axis-labels").find("(modified)") != std::string::npos);
}

TEST_CASE("plot: modified rates are MCA only") {
  const auto m = fit_ca(ContingencyTable::from_counts((Eigen::MatrixXd(3, 3) << 5, 1, 1, 1, 5, 1, 1, 1, 5).finished()));
  CHECK_ERROR_CODE(render_factor_plane(m, {0, 1, RateMode::Modified}), ErrorCode::BadConfig);
  CHECK_ERROR_CODE(render_factor_plane(m, {0, 2, RateMode::Raw}), ErrorCode::BadAxis);
  CHECK(axis_label(m, 0, RateMode::Raw).rfind("Axis 1: 50.00%", 0) == 0);
}

TEST_CASE("typicality through the CLI layer") {
  SUBCASE("planted shift") {
    const auto out = work_dir("typ_gait");
    std::ostringstream log;
    const auto cfg = fixture_config("gait", out);
    cmd_fit(cfg, log);
    const auto r = cmd_typicality(cfg, log);
    CHECK(r.p_value <= 0.01);
    CHECK(r.permutation_count == 999);
    const std::string first = slurp(out / "typicality.json");
    cmd_typicality(cfg, log);
    CHECK(slurp(out / "typicality.json") == first);
    const auto doc = nlohmann::json::parse(first);
    CHECK(doc["internal"] == false);
    CHECK(doc["seed"] == 451);
  }
  SUBCASE("subcloud = all individuals") {
    const auto out = work_dir("typ_all");
    std::ostringstream log;
    auto cfg = fixture_config("gait", out);
    cmd_fit(cfg, log);
    cfg.typicality.column = "group";
    cfg.typicality.value = "healthy";
    const auto r = cmd_typicality(cfg, log);
    CHECK(r.p_value == 1.0);
    CHECK(r.mode == TestMode::Exhaustive);
  }
  SUBCASE("empty subcloud") {
    const auto out = work_dir("typ_empty");
    std::ostringstream log;
    auto cfg = fixture_config("gait", out);
    cmd_fit(cfg, log);
    cfg.typicality.value = "nobody";
    CHECK_ERROR_CODE(cmd_typicality(cfg, log), ErrorCode::EmptySet);
  }
}

TEST_CASE("cluster writes a dendrogram and a partition") {
  const auto out = work_dir("cluster_tiny");
  std::ostringstream log;
  const auto cfg = fixture_config("tiny", out);
  cmd_fit(cfg, log);
  cmd_cluster(cfg, log);
  const std::string text = slurp(out / "dendrogram.txt");
  CHECK(text.rfind("# gda-dendrogram v1", 0) == 0);
  std::istringstream csv(slurp(out / "clusters.csv"));
  const auto doc = parse_csv(csv);
  REQUIRE(doc.rows.size() == 4);
  CHECK(doc.header == std::vector<std::string>{"label", "cluster"});
  CHECK(doc.rows[0][1] == "1");
}

TEST_CASE("exit codes") {
  const auto dir = work_dir("exit_codes");
  const std::string tiny = testing::fixture("tiny/config.ini").string();
  const std::string out = "--out \"" + (dir / "out").string() + "\"";

  CHECK(run_gda("fit --config \"" + tiny + "\" " + out) == kExitOk);
  CHECK(run_gda("report --config \"" + tiny + "\" " + out) == kExitOk);
  CHECK(run_gda("") == kExitConfig);
  CHECK(run_gda("fit") == kExitConfig);
  CHECK(run_gda("fit --config \"" + (dir / "missing.ini").string() + "\"") == kExitConfig);
  CHECK(run_gda("plot --config \"" + tiny + "\" " + out + " --axes 1,1") == kExitConfig);
  CHECK(run_gda("report --config \"" + tiny + "\" " + out + " --axes 7,1") == kExitConfig);
  CHECK(run_gda("fit --config \"" + tiny + "\" " + out + " --rates sideways") == kExitConfig);

  spill(dir / "schema.ini", "[question.q]\nmodalities = a|b\n");
  spill(dir / "bad.csv", "id,q\n1,a\n2,maybe\n");
  spill(dir / "data.ini", "[run]\nkind = mca\ninput = bad.csv\nschema = schema.ini\nthreshold = 0\n");
  CHECK(run_gda("fit --config \"" + (dir / "data.ini").string() + "\" " + out) == kExitData);

  spill(dir / "flat.csv", "id,x,y\n1,1,5\n2,2,5\n3,3,5\n");
  spill(dir / "numeric.ini", "[run]\nkind = pca\ninput = flat.csv\n[pca]\nvariables = x|y\n");
  CHECK(run_gda("fit --config \"" + (dir / "numeric.ini").string() + "\" " + out) == kExitNumeric);
}

TEST_CASE("every artifact is byte-identical across runs") {
  for (const std::string name : {"activities", "gait"}) {
    const auto a = work_dir("det_a_" + name);
    const auto b = work_dir("det_b_" + name);
    const std::string cfg = testing::fixture(name + "/config.ini").string();
    for (const auto& dir : {a, b})
      for (const char* sub : {"fit", "report", "plot", "typicality", "cluster"})
        REQUIRE(run_gda(std::string(sub) + " --config \"" + cfg + "\" --out \"" + dir.string() + "\"") == 0);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / entry.path().filename()), entry.path().string());
    }
    CHECK(files == 10);
  }
}
