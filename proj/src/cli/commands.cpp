#include "gda/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "gda/cli/svg_plot.hpp"
#include "gda/cluster.hpp"
#include "gda/error.hpp"
#include "gda/model_io.hpp"
#include "gda/tabular.hpp"

namespace gda::cli {

namespace {

using Eigen::Index;
using nlohmann::json;

std::string full(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string(); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

SurveySchema configured_schema(const RunConfig& cfg) {
  SurveySchema schema = load_schema(cfg.resolve(cfg.schema));
  if (cfg.kind == AnalysisKind::MCA)
    for (const auto& q : cfg.supplementary) schema.questions[schema.question_index(q)].role = QuestionRole::Supplementary;
  return schema;
}

std::string id_column(const RunConfig& cfg) {
  if (cfg.kind == AnalysisKind::PCA) return cfg.pca_id_column;
  return load_schema(cfg.resolve(cfg.schema)).id_column;
}

// Group values in a stable order: schema modality order for schema
// questions, lexicographic otherwise.
std::vector<std::string> group_values(const CsvDocument& doc, std::size_t col, const SurveySchema* schema,
                                      const std::string& name) {
  if (schema) {
    for (const auto& q : schema->questions)
      if (q.id == name) return q.modalities;
  }
  std::set<std::string> seen;
  for (const auto& row : doc.rows)
    if (!row[col].empty()) seen.insert(row[col]);
  return {seen.begin(), seen.end()};
}

void attach_centroids(const RunConfig& cfg, const SurveySchema* schema, FactorModel& model) {
  if (cfg.centroid_columns.empty()) return;
  if (model.kind == AnalysisKind::CA)
    throw Error(ErrorCode::BadConfig, "centroids need individuals as rows (mca or pca)");
  const auto doc = read_csv(cfg.resolve(cfg.input));
  const auto id_col = doc.column(schema ? schema->id_column : cfg.pca_id_column);
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < model.rows.size(); ++i) row_of.emplace(model.rows.labels[i], i);

  for (const auto& name : cfg.centroid_columns) {
    const auto col = doc.column(name);
    for (const auto& value : group_values(doc, col, schema, name)) {
      std::vector<std::size_t> members;
      for (const auto& row : doc.rows) {
        if (row[col] != value) continue;
        auto it = row_of.find(row[id_col]);
        if (it != row_of.end()) members.push_back(it->second);
      }
      if (members.empty()) continue;
      model.centroids.push_back(category_centroid(model, members, name + "=" + value));
    }
  }
}

FitOutcome fit_pca(const RunConfig& cfg) {
  const auto doc = read_csv(cfg.resolve(cfg.input));
  const auto id_col = doc.column(cfg.pca_id_column);
  std::vector<std::size_t> var_cols;
  for (const auto& v : cfg.pca_variables) var_cols.push_back(doc.column(v));
  const std::size_t role_col = cfg.pca_role_column.empty() ? doc.header.size() : doc.column(cfg.pca_role_column);

  NumericTable data;
  data.values.resize(static_cast<Index>(doc.rows.size()), static_cast<Index>(var_cols.size()));
  data.col_labels = cfg.pca_variables;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& row = doc.rows[i];
    if (!ids.insert(row[id_col]).second) throw Error(ErrorCode::DuplicateIndividualId, row[id_col]);
    data.row_labels.push_back(row[id_col]);
    const bool main = role_col == doc.header.size() || row[role_col] == cfg.pca_main_value;
    data.row_roles.push_back(main ? Role::Main : Role::Supplementary);
    for (std::size_t k = 0; k < var_cols.size(); ++k) {
      const auto& cell = row[var_cols[k]];
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw Error(ErrorCode::Io, fmt::format("{}: '{}' is not a number (row {})", cfg.pca_variables[k], cell, i + 1));
      data.values(static_cast<Index>(i), static_cast<Index>(k)) = v;
    }
  }
  FitOutcome out;
  out.model = fit_pca_standardized(data, cfg.max_axes);
  out.individuals = doc.rows.size();
  attach_centroids(cfg, nullptr, out.model);
  return out;
}

std::string rates_csv(const FactorModel& model) {
  std::map<std::size_t, ModifiedAxis> mod;
  if (model.kind == AnalysisKind::MCA && model.q_active >= 2) {
    const std::vector<double> ev(model.eigenvalues.begin(), model.eigenvalues.end());
    for (const auto& m : modified_rates(ev, model.q_active)) mod.emplace(m.axis, m);
  }
  std::ostringstream out;
  const std::vector<std::string> header{"axis", "eigenvalue", "rate", "modified_eigenvalue", "modified_rate"};
  write_csv_row(out, header);
  const auto rates = model.rates();
  for (std::size_t l = 0; l < model.rank(); ++l) {
    auto it = mod.find(l);
    const std::vector<std::string> fields{std::to_string(l + 1), full(model.eigenvalues(static_cast<Index>(l))),
                                          full(rates(static_cast<Index>(l))),
                                          it == mod.end() ? "" : full(it->second.modified),
                                          it == mod.end() ? "" : full(it->second.rate)};
    write_csv_row(out, fields);
  }
  return out.str();
}

std::string rates_text(const FactorModel& model) {
  std::map<std::size_t, ModifiedAxis> mod;
  const bool has_modified = model.kind == AnalysisKind::MCA && model.q_active >= 2;
  if (has_modified) {
    const std::vector<double> ev(model.eigenvalues.begin(), model.eigenvalues.end());
    for (const auto& m : modified_rates(ev, model.q_active)) mod.emplace(m.axis, m);
  }
  std::ostringstream out;
  out << fmt::format("{} total inertia {:.8f}\n", to_string(model.kind), model.total_inertia);
  out << fmt::format("{:>5}  {:>12}  {:>9}  {:>12}\n", "Axis", "Eigenvalue", "Rate (%)", "Modified (%)");
  const auto rates = model.rates();
  for (std::size_t l = 0; l < model.rank(); ++l) {
    auto it = mod.find(l);
    const std::string m = it == mod.end() ? (has_modified ? "-" : "n/a") : fmt::format("{:.2f}", 100.0 * it->second.rate);
    out << fmt::format("{:>5}  {:>12.8f}  {:>9.2f}  {:>12}\n", l + 1, model.eigenvalues(static_cast<Index>(l)),
                       100.0 * rates(static_cast<Index>(l)), m);
  }
  return out.str();
}

std::string fmt_cos2(double v) { return std::isfinite(v) ? fmt::format("{:.4f}", v) : std::string("n/a"); }

struct Ranked {
  std::string label;
  double contrib;
  double coord;
  double cos2;
};

std::vector<Ranked> ranked(const PointCloud& cloud, std::size_t axis) {
  std::vector<Ranked> out;
  const auto l = static_cast<Index>(axis);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto k = static_cast<Index>(i);
    out.push_back({cloud.labels[i], cloud.contrib(k, l), cloud.coords(k, l), cloud.cos2(k, l)});
  }
  // Contributions equal up to rounding noise count as ties.
  auto key = [](double c) { return std::llround(c * 1e12); };
  std::stable_sort(out.begin(), out.end(), [&](const Ranked& a, const Ranked& b) {
    if (key(a.contrib) != key(b.contrib)) return key(a.contrib) > key(b.contrib);
    return a.label < b.label;
  });
  return out;
}

std::string report_csv(const FactorModel& model, std::size_t axis) {
  std::ostringstream out;
  const std::vector<std::string> header{"section", "label", "contribution_percent", "coordinate", "cos2"};
  write_csv_row(out, header);
  auto emit_main = [&](const char* section, const PointCloud& cloud) {
    for (const auto& r : ranked(cloud, axis)) {
      const std::vector<std::string> f{section, r.label, full(100.0 * r.contrib), full(r.coord), full(r.cos2)};
      write_csv_row(out, f);
    }
  };
  emit_main("main_col", model.cols);
  if (model.kind == AnalysisKind::CA) emit_main("main_row", model.rows);
  auto emit_list = [&](const char* section, const std::vector<Projection>& list) {
    for (const auto& p : list) {
      const auto l = static_cast<Index>(axis);
      const std::vector<std::string> f{section, p.label, "", full(p.coords(l)), full(p.cos2(l))};
      write_csv_row(out, f);
    }
  };
  emit_list("supplementary_col", model.sup_cols);
  emit_list("supplementary_row", model.sup_rows);
  emit_list("centroid", model.centroids);
  return out.str();
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->category()) {
      case ErrorCategory::Config: return kExitConfig;
      case ErrorCategory::Data: return kExitData;
      case ErrorCategory::Numeric: return kExitNumeric;
    }
  }
  if (dynamic_cast<const boost::property_tree::ptree_error*>(&e)) return kExitConfig;
  return kExitData;
}

FitOutcome run_fit(const RunConfig& cfg) {
  if (cfg.kind == AnalysisKind::PCA) return fit_pca(cfg);

  const SurveySchema schema = configured_schema(cfg);
  const CodedTable table = ingest_csv(cfg.resolve(cfg.input), schema);
  FitOutcome out;
  out.individuals = table.n();

  if (cfg.kind == AnalysisKind::CA) {
    ContingencyTable ct = crosstab(table, cfg.ca_rows, cfg.ca_cols);
    for (const auto& q : cfg.supplementary) {
      const ContingencyTable extra = crosstab(table, q, cfg.ca_cols);
      const Index base = ct.counts.rows();
      ct.counts.conservativeResize(base + extra.counts.rows(), Eigen::NoChange);
      ct.counts.bottomRows(extra.counts.rows()) = extra.counts;
      ct.row_labels.insert(ct.row_labels.end(), extra.row_labels.begin(), extra.row_labels.end());
      ct.row_roles.insert(ct.row_roles.end(), extra.row_labels.size(), Role::Supplementary);
    }
    out.model = fit_ca(ct, cfg.max_axes);
    attach_centroids(cfg, &schema, out.model);
    return out;
  }

  const IndicatorMatrix ind = build_indicator(table);
  const std::size_t threshold = cfg.threshold.value_or(schema.sparse_threshold);
  const Demotion dem = demote_sparse(ind, threshold);
  for (auto j : dem.demoted) out.demoted.push_back(ind.columns[j].label());
  out.model = fit_mca(dem.matrix, cfg.max_axes);
  attach_centroids(cfg, &schema, out.model);
  return out;
}

void cmd_fit(const RunConfig& cfg, std::ostream& log) {
  const FitOutcome fit = run_fit(cfg);
  ensure_dir(cfg.out);
  save_model(fit.model, cfg.model_path());
  write_file(cfg.out / "rates.csv", rates_csv(fit.model));
  const std::string table = rates_text(fit.model);
  write_file(cfg.out / "rates.txt", table);

  json manifest;
  manifest["tool"] = "gda";
  manifest["version"] = kVersion;
  manifest["eigen_version"] =
      fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  manifest["command"] = "fit";
  manifest["kind"] = to_string(fit.model.kind);
  manifest["seed"] = cfg.seed;
  manifest["rates"] = to_string(cfg.rates);
  manifest["input"] = cfg.input.generic_string();
  manifest["schema"] = cfg.schema.generic_string();
  manifest["individuals"] = fit.individuals;
  manifest["main_rows"] = fit.model.rows.size();
  manifest["main_columns"] = fit.model.cols.size();
  manifest["q_active"] = fit.model.q_active;
  manifest["axes"] = fit.model.axes();
  manifest["demoted"] = fit.demoted;
  manifest["demoted_count"] = fit.demoted.size();
  manifest["supplementary_questions"] = cfg.supplementary;
  if (cfg.threshold) manifest["threshold"] = *cfg.threshold;
  manifest["artifacts"] = {"model.json", "rates.csv", "rates.txt", "manifest.json"};
  write_file(cfg.out / "manifest.json", manifest.dump(2) + "\n");

  log << table;
  if (!fit.demoted.empty()) {
    log << "demoted to supplementary:";
    for (const auto& d : fit.demoted) log << ' ' << d;
    log << '\n';
  }
  log << "wrote " << cfg.out.generic_string() << "/{model.json,rates.csv,rates.txt,manifest.json}\n";
}

std::string format_report(const FactorModel& model, std::size_t axis) {
  if (axis >= model.axes())
    throw Error(ErrorCode::BadAxis, fmt::format("axis {} not in model ({} axes)", axis + 1, model.axes()));
  const auto l = static_cast<Index>(axis);
  std::ostringstream out;
  out << fmt::format("{} axis {}: eigenvalue {:.8f}, rate {:.2f}%", to_string(model.kind), axis + 1,
                     model.eigenvalues(l), 100.0 * model.rates()(l));
  if (model.kind == AnalysisKind::MCA && model.q_active >= 2) {
    const std::vector<double> ev(model.eigenvalues.begin(), model.eigenvalues.end());
    for (const auto& m : modified_rates(ev, model.q_active))
      if (m.axis == axis) out << fmt::format(", modified rate {:.2f}%", 100.0 * m.rate);
  }
  out << "\n";

  std::size_t width = 8;
  for (const auto& s : model.cols.labels) width = std::max(width, s.size());
  if (model.kind == AnalysisKind::CA)
    for (const auto& s : model.rows.labels) width = std::max(width, s.size());
  for (const auto* list : {&model.sup_cols, &model.sup_rows, &model.centroids})
    for (const auto& p : *list) width = std::max(width, p.label.size());

  auto main_table = [&](const char* title, const PointCloud& cloud) {
    out << "\n" << title << "\n";
    out << fmt::format("{:<{}}  {:>12}  {:>14}\n", "Label", width, "Contrib. (%)", "Coord.");
    for (const auto& r : ranked(cloud, axis))
      out << fmt::format("{:<{}}  {:>12.2f}  {:>14.7f}\n", r.label, width, 100.0 * r.contrib, r.coord);
  };
  main_table(model.kind == AnalysisKind::PCA ? "Variables" : "Main column points", model.cols);
  if (model.kind == AnalysisKind::CA) main_table("Main row points", model.rows);

  if (!model.sup_cols.empty() || !model.sup_rows.empty() || !model.centroids.empty()) {
    out << "\nSupplementary points\n";
    out << fmt::format("{:<{}}  {:>14}  {:>8}\n", "Label", width, "Coord.", "cos2");
    for (const auto* list : {&model.sup_cols, &model.sup_rows, &model.centroids})
      for (const auto& p : *list)
        out << fmt::format("{:<{}}  {:>14.7f}  {:>8}\n", p.label, width, p.coords(l), fmt_cos2(p.cos2(l)));
  }
  return out.str();
}

void cmd_report(const RunConfig& cfg, std::ostream& log) {
  const FactorModel model = load_model(cfg.model_path());
  const std::size_t axis = cfg.axes.first - 1;
  const std::string text = format_report(model, axis);
  const std::string csv = report_csv(model, axis);
  write_file(cfg.out / fmt::format("report_axis{}.txt", axis + 1), text);
  write_file(cfg.out / fmt::format("report_axis{}.csv", axis + 1), csv);
  log << text;
}

void cmd_plot(const RunConfig& cfg, std::ostream& log) {
  const FactorModel model = load_model(cfg.model_path());
  PlotOptions options;
  options.axis_x = cfg.axes.first - 1;
  options.axis_y = cfg.axes.second - 1;
  options.rates = cfg.rates;
  const std::string svg = render_factor_plane(model, options);
  const auto path = cfg.out / fmt::format("plot_axes_{}_{}.svg", cfg.axes.first, cfg.axes.second);
  write_file(path, svg);
  log << "wrote " << path.generic_string() << "\n";
}

TypicalityResult cmd_typicality(const RunConfig& cfg, std::ostream& log) {
  const auto& spec = cfg.typicality;
  if (!spec.enabled) throw Error(ErrorCode::BadConfig, "config has no [typicality] section");
  const FactorModel model = load_model(cfg.model_path());
  const PointSet reference = reference_cloud(model, spec.axes);
  const auto dims = static_cast<Index>(reference.dims());

  std::vector<std::string> labels = spec.labels;
  std::string description;
  if (!spec.column.empty()) {
    const auto doc = read_csv(cfg.resolve(cfg.input));
    const auto id_col = doc.column(id_column(cfg));
    const auto col = doc.column(spec.column);
    for (const auto& row : doc.rows)
      if (row[col] == spec.value) labels.push_back(row[id_col]);
    description = spec.column + "=" + spec.value;
  } else {
    description = "labels";
  }
  if (labels.empty()) throw Error(ErrorCode::EmptySet, "subcloud '" + description + "' selects no individuals");

  std::unordered_map<std::string, std::size_t> main_of;
  for (std::size_t i = 0; i < model.rows.size(); ++i) main_of.emplace(model.rows.labels[i], i);
  std::unordered_map<std::string, std::size_t> sup_of;
  for (std::size_t i = 0; i < model.sup_rows.size(); ++i) sup_of.emplace(model.sup_rows[i].label, i);

  std::vector<std::size_t> internal;
  Eigen::MatrixXd points(static_cast<Index>(labels.size()), dims);
  bool all_main = true;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (auto it = main_of.find(labels[k]); it != main_of.end()) {
      internal.push_back(it->second);
      points.row(static_cast<Index>(k)) = reference.coords.row(static_cast<Index>(it->second));
    } else if (auto jt = sup_of.find(labels[k]); jt != sup_of.end()) {
      all_main = false;
      points.row(static_cast<Index>(k)) = model.sup_rows[jt->second].coords.head(dims).transpose();
    } else {
      throw Error(ErrorCode::DimensionMismatch, "subcloud member '" + labels[k] + "' is not a row of the model");
    }
  }
  Subcloud sub;
  sub.label = description;
  if (all_main) {
    sub.members = internal;
  } else {
    sub.members = points;
  }

  const TypicalityResult result = typicality_test(reference, sub, spec.n_perm, cfg.seed, spec.threads);

  json doc;
  doc["subcloud"] = description;
  doc["size"] = labels.size();
  doc["internal"] = all_main;
  doc["axes"] = reference.dims();
  doc["observed_statistic"] = result.observed_statistic;
  doc["n_perm"] = spec.n_perm;
  doc["permutation_count"] = result.permutation_count;
  doc["mode"] = to_string(result.mode);
  doc["p_value"] = result.p_value;
  doc["seed"] = result.seed;
  ensure_dir(cfg.out);
  write_file(cfg.out / "typicality.json", doc.dump(2) + "\n");

  log << fmt::format("subcloud {} ({} points, {}) on {} axes\n", description, labels.size(),
                     all_main ? "internal" : "external", reference.dims());
  log << fmt::format("observed statistic {:.6g}\n", result.observed_statistic);
  log << fmt::format("mode {}, {} permutations, seed {}\n", to_string(result.mode), result.permutation_count,
                     result.seed);
  log << fmt::format("p-value {:.6g}\n", result.p_value);
  return result;
}

void cmd_cluster(const RunConfig& cfg, std::ostream& log) {
  const FactorModel model = load_model(cfg.model_path());
  const PointCloud& cloud = cfg.cluster.rows ? model.rows : model.cols;
  std::vector<std::size_t> axes;
  for (auto a : cfg.cluster.axes) {
    if (a < 1 || a > model.axes()) throw Error(ErrorCode::BadAxis, fmt::format("axis {} not in model", a));
    axes.push_back(a - 1);
  }
  const std::vector<double> masses(cloud.masses.begin(), cloud.masses.end());
  const Dendrogram dg = ward_cluster(cloud.coords, masses, axes, cloud.labels);
  const auto clusters = cut(dg, cfg.cluster.k);

  write_file(cfg.out / "dendrogram.txt", dg.to_text());
  std::ostringstream csv;
  const std::vector<std::string> header{"label", "cluster"};
  write_csv_row(csv, header);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const std::vector<std::string> f{cloud.labels[i], std::to_string(clusters[i] + 1)};
    write_csv_row(csv, f);
  }
  write_file(cfg.out / "clusters.csv", csv.str());
  log << fmt::format("clustered {} {} points into {} clusters; wrote dendrogram.txt, clusters.csv\n", cloud.size(),
                     cfg.cluster.rows ? "row" : "column", cfg.cluster.k);
}

}  // namespace gda::cli
