#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gda/ca_engine.hpp"
#include "gda/cluster.hpp"
#include "gda/error.hpp"
#include "gda/inference.hpp"
#include "gda/model_io.hpp"
#include "gda/tabular.hpp"

namespace py = pybind11;
using namespace gda;

namespace {

std::vector<Role> roles_from(const std::optional<std::vector<bool>>& supplementary, Eigen::Index n) {
  std::vector<Role> roles(static_cast<std::size_t>(n), Role::Main);
  if (!supplementary) return roles;
  if (static_cast<Eigen::Index>(supplementary->size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "supplementary flags must match the table shape");
  for (std::size_t k = 0; k < roles.size(); ++k)
    if ((*supplementary)[k]) roles[k] = Role::Supplementary;
  return roles;
}

FactorModel py_fit_ca(const Eigen::MatrixXd& counts, std::optional<std::vector<std::string>> row_labels,
                      std::optional<std::vector<std::string>> col_labels,
                      std::optional<std::vector<bool>> supplementary_rows,
                      std::optional<std::vector<bool>> supplementary_cols, std::optional<std::size_t> max_axes) {
  auto t = ContingencyTable::from_counts(counts);
  if (row_labels) t.row_labels = *row_labels;
  if (col_labels) t.col_labels = *col_labels;
  t.row_roles = roles_from(supplementary_rows, counts.rows());
  t.col_roles = roles_from(supplementary_cols, counts.cols());
  return fit_ca(t, max_axes);
}

FactorModel py_fit_pca(const Eigen::MatrixXd& values, std::optional<std::vector<std::string>> row_labels,
                       std::optional<std::vector<std::string>> col_labels,
                       std::optional<std::vector<bool>> supplementary_rows, std::optional<std::size_t> max_axes) {
  auto t = NumericTable::from_values(values);
  if (row_labels) t.row_labels = *row_labels;
  if (col_labels) t.col_labels = *col_labels;
  t.row_roles = roles_from(supplementary_rows, values.rows());
  return fit_pca_standardized(t, max_axes);
}

/// Survey CSV + schema -> indicator, optionally with sparse demotion.
IndicatorMatrix py_survey_indicator(const std::filesystem::path& csv, const std::filesystem::path& schema,
                                    std::optional<std::size_t> threshold) {
  auto ind = build_indicator(ingest_csv(csv, load_schema(schema)));
  if (threshold) ind = demote_sparse(ind, *threshold).matrix;
  return ind;
}

Eigen::MatrixXd linkage(const Dendrogram& dg) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dg.merges().size()), 4);
  for (std::size_t t = 0; t < dg.merges().size(); ++t) {
    const auto& m = dg.merges()[t];
    out.row(static_cast<Eigen::Index>(t)) << static_cast<double>(m.a), static_cast<double>(m.b), m.height, m.mass;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Correspondence analysis, MCA, standardized PCA, typicality tests and Ward clustering";

  static py::exception<Error> gda_error(m, "GdaError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = gda_error;
      py::object instance = exc(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(gda_error.ptr(), instance.ptr());
    }
  });

  py::enum_<AnalysisKind>(m, "AnalysisKind")
      .value("CA", AnalysisKind::CA)
      .value("MCA", AnalysisKind::MCA)
      .value("PCA", AnalysisKind::PCA);

  py::class_<PointCloud>(m, "PointCloud")
      .def_readonly("labels", &PointCloud::labels)
      .def_readonly("masses", &PointCloud::masses)
      .def_readonly("coords", &PointCloud::coords)
      .def_readonly("contrib", &PointCloud::contrib)
      .def_readonly("cos2", &PointCloud::cos2)
      .def_readonly("dist2", &PointCloud::dist2)
      .def("__len__", &PointCloud::size);

  py::class_<Projection>(m, "Projection")
      .def_readonly("label", &Projection::label)
      .def_readonly("coords", &Projection::coords)
      .def_readonly("cos2", &Projection::cos2)
      .def_readonly("dist2", &Projection::dist2)
      .def_readonly("weight", &Projection::weight);

  py::class_<FactorModel>(m, "FactorModel")
      .def_readonly("kind", &FactorModel::kind)
      .def_readonly("q_active", &FactorModel::q_active)
      .def_readonly("eigenvalues", &FactorModel::eigenvalues)
      .def_readonly("total_inertia", &FactorModel::total_inertia)
      .def_readonly("rows", &FactorModel::rows)
      .def_readonly("cols", &FactorModel::cols)
      .def_readonly("sup_rows", &FactorModel::sup_rows)
      .def_readonly("sup_cols", &FactorModel::sup_cols)
      .def_readonly("centroids", &FactorModel::centroids)
      .def_property_readonly("axes", &FactorModel::axes)
      .def_property_readonly("rank", &FactorModel::rank)
      .def("rates", &FactorModel::rates)
      .def("to_json", [](const FactorModel& model) { return model_to_json(model).dump(); })
      .def_static("from_json",
                  [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); });

  py::class_<IndicatorMatrix>(m, "IndicatorMatrix")
      .def_readonly("data", &IndicatorMatrix::data)
      .def_readonly("row_labels", &IndicatorMatrix::row_labels)
      .def_readonly("q_active", &IndicatorMatrix::q_active)
      .def_property_readonly("column_labels",
                             [](const IndicatorMatrix& ind) {
                               std::vector<std::string> out;
                               for (const auto& c : ind.columns) out.push_back(c.label());
                               return out;
                             })
      .def_property_readonly("supplementary_columns",
                             [](const IndicatorMatrix& ind) {
                               std::vector<bool> out;
                               for (const auto& c : ind.columns) out.push_back(c.role == Role::Supplementary);
                               return out;
                             })
      .def("main_column_count", &IndicatorMatrix::main_column_count);

  m.def("fit_ca", &py_fit_ca, py::arg("counts"), py::arg("row_labels") = py::none(),
        py::arg("col_labels") = py::none(), py::arg("supplementary_rows") = py::none(),
        py::arg("supplementary_cols") = py::none(), py::arg("max_axes") = py::none());
  m.def("survey_indicator", &py_survey_indicator, py::arg("csv"), py::arg("schema"),
        py::arg("threshold") = py::none(), "Code a survey CSV; demote sparse modalities when threshold is given.");
  m.def("double_columns", py::overload_cast<const IndicatorMatrix&>(&double_columns), py::arg("indicator"));
  m.def("fit_mca", &fit_mca, py::arg("indicator"), py::arg("max_axes") = py::none());
  m.def("fit_pca", &py_fit_pca, py::arg("values"), py::arg("row_labels") = py::none(),
        py::arg("col_labels") = py::none(), py::arg("supplementary_rows") = py::none(),
        py::arg("max_axes") = py::none());

  m.def("chi2_distance", &chi2_distance, py::arg("model"), py::arg("a"), py::arg("b"));
  m.def(
      "modified_rates",
      [](const std::vector<double>& eigenvalues, std::size_t q) {
        std::vector<py::tuple> out;
        for (const auto& a : modified_rates(eigenvalues, q)) out.push_back(py::make_tuple(a.axis, a.modified, a.rate));
        return out;
      },
      py::arg("eigenvalues"), py::arg("q"), "List of (axis, modified eigenvalue, rate); axes are 0-based.");
  m.def(
      "project_row",
      [](const FactorModel& model, const std::vector<double>& profile, std::string label) {
        return project_supplementary_row(model, profile, std::move(label));
      },
      py::arg("model"), py::arg("profile"), py::arg("label") = "");
  m.def(
      "project_col",
      [](const FactorModel& model, const std::vector<double>& profile, std::string label) {
        return project_supplementary_col(model, profile, std::move(label));
      },
      py::arg("model"), py::arg("profile"), py::arg("label") = "");
  m.def(
      "category_centroid",
      [](const FactorModel& model, const std::vector<std::size_t>& members, std::string label) {
        return category_centroid(model, members, std::move(label));
      },
      py::arg("model"), py::arg("members"), py::arg("label") = "");

  py::class_<TypicalityResult>(m, "TypicalityResult")
      .def_readonly("observed_statistic", &TypicalityResult::observed_statistic)
      .def_readonly("permutation_count", &TypicalityResult::permutation_count)
      .def_readonly("p_value", &TypicalityResult::p_value)
      .def_readonly("seed", &TypicalityResult::seed)
      .def_property_readonly("mode", [](const TypicalityResult& r) { return to_string(r.mode); });

  m.def("mahalanobis_statistic",
        [](const Eigen::MatrixXd& coords, const Eigen::VectorXd& masses, const Eigen::MatrixXd& points) {
          return mahalanobis_statistic(PointSet{coords, masses}, points);
        },
        py::arg("reference"), py::arg("masses"), py::arg("points"));
  m.def(
      "typicality",
      [](const Eigen::MatrixXd& coords, const Eigen::VectorXd& masses, const std::vector<std::size_t>& members,
         std::uint64_t n_perm, std::uint64_t seed, unsigned threads) {
        return typicality_test(PointSet{coords, masses}, Subcloud{members, "subcloud"}, n_perm, seed, threads);
      },
      py::arg("reference"), py::arg("masses"), py::arg("members"), py::arg("n_perm") = 999, py::arg("seed") = 0,
      py::arg("threads") = 1, "Subcloud given as row indices into the reference.");
  m.def(
      "typicality_external",
      [](const Eigen::MatrixXd& coords, const Eigen::VectorXd& masses, const Eigen::MatrixXd& points,
         std::uint64_t n_perm, std::uint64_t seed, unsigned threads) {
        return typicality_test(PointSet{coords, masses}, Subcloud{points, "subcloud"}, n_perm, seed, threads);
      },
      py::arg("reference"), py::arg("masses"), py::arg("points"), py::arg("n_perm") = 999, py::arg("seed") = 0,
      py::arg("threads") = 1, "Subcloud given as points in the reference coordinates.");

  py::class_<Dendrogram>(m, "Dendrogram")
      .def_property_readonly("labels", &Dendrogram::labels)
      .def_property_readonly("leaves", &Dendrogram::leaves)
      .def("linkage", &linkage, "(P-1) x 4 array of [a, b, height, mass], node ids as in scipy.")
      .def("cophenetic", &Dendrogram::cophenetic)
      .def("cophenetic_matrix", &Dendrogram::cophenetic_matrix)
      .def("to_text", &Dendrogram::to_text);

  m.def(
      "ward",
      [](const Eigen::MatrixXd& coords, const std::vector<double>& masses, const std::vector<std::size_t>& axes,
         std::vector<std::string> labels) { return ward_cluster(coords, masses, axes, std::move(labels)); },
      py::arg("coords"), py::arg("masses"), py::arg("axes") = std::vector<std::size_t>{},
      py::arg("labels") = std::vector<std::string>{});
  m.def("cut", &cut, py::arg("dendrogram"), py::arg("k"));

  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));
}
