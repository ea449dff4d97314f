#include "gda/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "gda/error.hpp"

namespace gda {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

constexpr const char* kFormat = "gda-model/1";

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const VectorXd& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(number(v(k)));
  return out;
}

json mat(const MatrixXd& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(vec(m.row(i).transpose()));
  return out;
}

double read_number(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

VectorXd read_vec(const json& a) {
  VectorXd out(static_cast<Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) out(static_cast<Index>(k)) = read_number(a[k]);
  return out;
}

MatrixXd read_mat(const json& a, Index cols) {
  MatrixXd out(static_cast<Index>(a.size()), cols);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<Index>(a[i].size()) != cols) throw Error(ErrorCode::DimensionMismatch, "ragged matrix in model");
    for (Index j = 0; j < cols; ++j) out(static_cast<Index>(i), j) = read_number(a[i][static_cast<std::size_t>(j)]);
  }
  return out;
}

json cloud_json(const PointCloud& c) {
  return {{"labels", c.labels}, {"masses", vec(c.masses)}, {"dist2", vec(c.dist2)},
          {"coords", mat(c.coords)}, {"contrib", mat(c.contrib)}, {"cos2", mat(c.cos2)}};
}

PointCloud read_cloud(const json& j, Index axes) {
  PointCloud c;
  c.labels = j.at("labels").get<std::vector<std::string>>();
  c.masses = read_vec(j.at("masses"));
  c.dist2 = read_vec(j.at("dist2"));
  c.coords = read_mat(j.at("coords"), axes);
  c.contrib = read_mat(j.at("contrib"), axes);
  c.cos2 = read_mat(j.at("cos2"), axes);
  return c;
}

json projections_json(const std::vector<Projection>& list) {
  json out = json::array();
  for (const auto& p : list)
    out.push_back({{"label", p.label}, {"coords", vec(p.coords)}, {"cos2", vec(p.cos2)},
                   {"dist2", number(p.dist2)}, {"weight", number(p.weight)}});
  return out;
}

std::vector<Projection> read_projections(const json& a, ProjectionRole role) {
  std::vector<Projection> out;
  for (const auto& j : a) {
    Projection p;
    p.label = j.at("label").get<std::string>();
    p.role = role;
    p.coords = read_vec(j.at("coords"));
    p.cos2 = read_vec(j.at("cos2"));
    p.dist2 = read_number(j.at("dist2"));
    p.weight = read_number(j.at("weight"));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

json model_to_json(const FactorModel& model) {
  json doc;
  doc["format"] = kFormat;
  doc["kind"] = to_string(model.kind);
  doc["q_active"] = model.q_active;
  doc["total_inertia"] = model.total_inertia;
  doc["axes"] = model.axes();
  doc["eigenvalues"] = vec(model.eigenvalues);
  doc["rates"] = vec(model.rates());
  json modified = json::array();
  if (model.kind == AnalysisKind::MCA && model.q_active >= 2) {
    const std::vector<double> ev(model.eigenvalues.begin(), model.eigenvalues.end());
    for (const auto& m : modified_rates(ev, model.q_active))
      modified.push_back({{"axis", m.axis + 1}, {"modified", m.modified}, {"rate", m.rate}});
  }
  doc["modified_rates"] = modified;
  doc["rows"] = cloud_json(model.rows);
  doc["cols"] = cloud_json(model.cols);
  doc["supplementary_rows"] = projections_json(model.sup_rows);
  doc["supplementary_cols"] = projections_json(model.sup_cols);
  doc["centroids"] = projections_json(model.centroids);
  doc["row_profiles"] = mat(model.row_profiles);
  doc["mean_profile"] = vec(model.mean_profile);
  doc["means"] = vec(model.means);
  doc["scales"] = vec(model.scales);
  return doc;
}

FactorModel model_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat)
      throw Error(ErrorCode::BadConfig, "unsupported model format " + doc.at("format").dump());
    FactorModel model;
    model.kind = analysis_kind_from_string(doc.at("kind").get<std::string>());
    model.q_active = doc.at("q_active").get<std::size_t>();
    model.total_inertia = doc.at("total_inertia").get<double>();
    const auto axes = static_cast<Index>(doc.at("axes").get<std::size_t>());
    model.eigenvalues = read_vec(doc.at("eigenvalues"));
    model.rows = read_cloud(doc.at("rows"), axes);
    model.cols = read_cloud(doc.at("cols"), axes);
    model.sup_rows = read_projections(doc.at("supplementary_rows"), ProjectionRole::SupplementaryRow);
    model.sup_cols = read_projections(doc.at("supplementary_cols"), ProjectionRole::SupplementaryCol);
    model.centroids = read_projections(doc.at("centroids"), ProjectionRole::Centroid);
    model.mean_profile = read_vec(doc.at("mean_profile"));
    model.row_profiles = read_mat(doc.at("row_profiles"), model.mean_profile.size());
    model.means = read_vec(doc.at("means"));
    model.scales = read_vec(doc.at("scales"));
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("malformed model: ") + e.what());
  }
}

void save_model(const FactorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << model_to_json(model).dump(1) << "\n";
}

FactorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace gda
