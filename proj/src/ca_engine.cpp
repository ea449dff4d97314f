#include "gda/ca_engine.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "gda/error.hpp"

namespace gda {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Below this a residual singular value is rounding noise even when it is the largest.
constexpr double kAbsoluteFloor = 1e-13;
// Squared distance under which a point is treated as the origin.
constexpr double kOriginTolerance = 1e-20;

Index idx(std::size_t k) { return static_cast<Index>(k); }

/// Generalized SVD of a standardized residual matrix S with row weights r and
/// column weights c. Fills eigenvalues, coordinates and diagnostics.
void factorize(const MatrixXd& s, const VectorXd& r, const VectorXd& c, std::optional<std::size_t> max_axes,
               FactorModel& model) {
  Eigen::JacobiSVD<MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& d = svd.singularValues();

  Index rank = 0;
  if (d.size() > 0) {
    const double tol = std::max(kRankTolerance * d(0), kAbsoluteFloor);
    while (rank < d.size() && d(rank) > tol) ++rank;
  }
  Index axes = rank;
  if (max_axes) axes = std::min<Index>(axes, idx(*max_axes));

  model.eigenvalues = d.head(rank).array().square();
  model.total_inertia = s.squaredNorm();

  const VectorXd sv = d.head(axes);
  MatrixXd f = r.cwiseSqrt().cwiseInverse().asDiagonal() * svd.matrixU().leftCols(axes) * sv.asDiagonal();
  MatrixXd g = c.cwiseSqrt().cwiseInverse().asDiagonal() * svd.matrixV().leftCols(axes) * sv.asDiagonal();

  // Orient each axis so its largest-contribution column point is positive.
  for (Index l = 0; l < axes; ++l) {
    Index best = 0;
    double best_ctr = -1.0;
    for (Index j = 0; j < g.rows(); ++j) {
      const double ctr = c(j) * g(j, l) * g(j, l);
      if (ctr > best_ctr) {
        best_ctr = ctr;
        best = j;
      }
    }
    if (g(best, l) < 0.0) {
      f.col(l) = -f.col(l);
      g.col(l) = -g.col(l);
    }
  }

  auto fill = [&](PointCloud& cloud, const VectorXd& masses, MatrixXd coords, VectorXd dist2) {
    cloud.masses = masses;
    cloud.contrib.resize(coords.rows(), axes);
    cloud.cos2.resize(coords.rows(), axes);
    for (Index l = 0; l < axes; ++l) {
      const double lambda = model.eigenvalues(l);
      cloud.contrib.col(l) = masses.cwiseProduct(coords.col(l).cwiseAbs2()) / lambda;
    }
    for (Index i = 0; i < coords.rows(); ++i) {
      if (dist2(i) <= kOriginTolerance) {
        cloud.cos2.row(i).setConstant(kNaN);
      } else {
        cloud.cos2.row(i) = coords.row(i).cwiseAbs2() / dist2(i);
      }
    }
    cloud.coords = std::move(coords);
    cloud.dist2 = std::move(dist2);
  };

  const VectorXd row_dist2 = s.rowwise().squaredNorm().cwiseQuotient(r);
  const VectorXd col_dist2 = s.colwise().squaredNorm().transpose().cwiseQuotient(c);
  fill(model.rows, r, std::move(f), row_dist2);
  fill(model.cols, c, std::move(g), col_dist2);
}

Projection make_projection(VectorXd coords, double dist2, std::string label,
                           ProjectionRole role, double weight) {
  Projection p;
  p.label = std::move(label);
  p.role = role;
  p.dist2 = dist2;
  p.weight = weight;
  if (dist2 <= kOriginTolerance) {
    p.cos2 = VectorXd::Constant(coords.size(), kNaN);
  } else {
    p.cos2 = coords.cwiseAbs2() / dist2;
  }
  p.coords = std::move(coords);
  return p;
}

VectorXd inv_sqrt_lambda(const FactorModel& model) {
  return model.eigenvalues.head(idx(model.axes())).cwiseSqrt().cwiseInverse();
}

void check_profile(std::span<const double> profile, std::size_t expected, double& total) {
  if (profile.size() != expected)
    throw Error(ErrorCode::DimensionMismatch,
                "profile has " + std::to_string(profile.size()) + " entries, expected " + std::to_string(expected));
  total = 0.0;
  for (double v : profile) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::NegativeEntry, "profile entries must be >= 0");
    total += v;
  }
  if (total <= 0.0) throw Error(ErrorCode::ZeroProfile, "profile sums to zero");
}

}  // namespace

std::string to_string(AnalysisKind kind) {
  switch (kind) {
    case AnalysisKind::CA: return "CA";
    case AnalysisKind::MCA: return "MCA";
    case AnalysisKind::PCA: return "PCA";
  }
  return "CA";
}

AnalysisKind analysis_kind_from_string(const std::string& s) {
  if (s == "CA" || s == "ca") return AnalysisKind::CA;
  if (s == "MCA" || s == "mca") return AnalysisKind::MCA;
  if (s == "PCA" || s == "pca") return AnalysisKind::PCA;
  throw Error(ErrorCode::BadConfig, "unknown analysis kind '" + s + "'");
}

VectorXd FactorModel::rates() const {
  if (total_inertia <= 0.0) return VectorXd::Zero(eigenvalues.size());
  return eigenvalues / total_inertia;
}

FactorModel fit_ca(const ContingencyTable& table, std::optional<std::size_t> max_axes) {
  table.validate();
  const auto mr = table.main_rows();
  const auto mc = table.main_cols();

  MatrixXd n(idx(mr.size()), idx(mc.size()));
  for (std::size_t a = 0; a < mr.size(); ++a)
    for (std::size_t b = 0; b < mc.size(); ++b) n(idx(a), idx(b)) = table.counts(idx(mr[a]), idx(mc[b]));

  const double grand = n.sum();
  const MatrixXd p = n / grand;
  const VectorXd r = p.rowwise().sum();
  const VectorXd c = p.colwise().sum().transpose();

  // Centering by r c^T removes the trivial axis before factorization.
  const VectorXd rs = r.cwiseSqrt().cwiseInverse();
  const VectorXd cs = c.cwiseSqrt().cwiseInverse();
  const MatrixXd s = rs.asDiagonal() * (p - r * c.transpose()) * cs.asDiagonal();

  FactorModel model;
  model.kind = AnalysisKind::CA;
  factorize(s, r, c, max_axes, model);
  for (auto i : mr) model.rows.labels.push_back(table.row_labels[i]);
  for (auto j : mc) model.cols.labels.push_back(table.col_labels[j]);
  model.row_profiles = r.cwiseInverse().asDiagonal() * p;
  model.mean_profile = c;

  std::vector<double> buf;
  for (std::size_t i = 0; i < table.row_roles.size(); ++i) {
    if (table.row_roles[i] != Role::Supplementary) continue;
    buf.clear();
    for (auto j : mc) buf.push_back(table.counts(idx(i), idx(j)));
    double total = 0.0;
    for (double v : buf) total += v;
    if (total <= 0.0) continue;
    model.sup_rows.push_back(project_supplementary_row(model, buf, table.row_labels[i]));
  }
  for (std::size_t j = 0; j < table.col_roles.size(); ++j) {
    if (table.col_roles[j] != Role::Supplementary) continue;
    buf.clear();
    for (auto i : mr) buf.push_back(table.counts(idx(i), idx(j)));
    double total = 0.0;
    for (double v : buf) total += v;
    if (total <= 0.0) continue;
    model.sup_cols.push_back(project_supplementary_col(model, buf, table.col_labels[j]));
  }
  return model;
}

FactorModel fit_mca(const IndicatorMatrix& ind, std::optional<std::size_t> max_axes) {
  if (ind.data.rows() == 0) throw Error(ErrorCode::EmptyTable, "indicator has no rows");
  if (ind.q_active == 0 || ind.main_column_count() == 0)
    throw Error(ErrorCode::EmptyActiveBlock, "no active questions or main modalities");
  if (ind.columns.size() != static_cast<std::size_t>(ind.data.cols()))
    throw Error(ErrorCode::DimensionMismatch, "column metadata does not match indicator width");

  ContingencyTable table;
  table.counts = ind.data;
  table.row_labels = ind.row_labels;
  if (table.row_labels.empty())
    for (Index i = 0; i < ind.data.rows(); ++i) table.row_labels.push_back(std::to_string(i + 1));
  table.row_roles.assign(table.row_labels.size(), Role::Main);
  for (const auto& col : ind.columns) {
    table.col_labels.push_back(col.label());
    table.col_roles.push_back(col.role);
  }

  FactorModel model = fit_ca(table, max_axes);
  model.kind = AnalysisKind::MCA;
  model.q_active = ind.q_active;
  return model;
}

NumericTable NumericTable::from_values(const MatrixXd& values) {
  NumericTable t;
  t.values = values;
  for (Index i = 0; i < values.rows(); ++i) t.row_labels.push_back("r" + std::to_string(i + 1));
  for (Index j = 0; j < values.cols(); ++j) t.col_labels.push_back("v" + std::to_string(j + 1));
  t.row_roles.assign(static_cast<std::size_t>(values.rows()), Role::Main);
  return t;
}

FactorModel fit_pca_standardized(const NumericTable& data, std::optional<std::size_t> max_axes) {
  const auto rows = static_cast<std::size_t>(data.values.rows());
  if (data.row_labels.size() != rows || data.row_roles.size() != rows ||
      data.col_labels.size() != static_cast<std::size_t>(data.values.cols()))
    throw Error(ErrorCode::DimensionMismatch, "labels/roles do not match data shape");
  if (!data.values.allFinite()) throw Error(ErrorCode::NegativeEntry, "non-finite value");

  std::vector<Index> main;
  for (std::size_t i = 0; i < rows; ++i)
    if (data.row_roles[i] == Role::Main) main.push_back(idx(i));
  if (main.size() < 2) throw Error(ErrorCode::EmptyTable, "PCA needs at least 2 main individuals");
  if (data.values.cols() == 0) throw Error(ErrorCode::EmptyTable, "PCA needs at least 1 variable");

  const MatrixXd x = data.values(main, Eigen::all);
  const auto count = static_cast<double>(x.rows());
  const VectorXd mean = x.colwise().mean().transpose();
  const MatrixXd centered = x.rowwise() - mean.transpose();
  const VectorXd sd = (centered.colwise().squaredNorm().transpose() / count).cwiseSqrt();
  for (Index k = 0; k < sd.size(); ++k) {
    // Relative to magnitude so that rounding noise in a constant column is caught.
    if (!(sd(k) > 1e-12 * std::max(1.0, std::abs(mean(k)))))
      throw Error(ErrorCode::ConstantColumn, data.col_labels[static_cast<std::size_t>(k)]);
  }
  const MatrixXd z = centered * sd.cwiseInverse().asDiagonal();

  const VectorXd r = VectorXd::Constant(x.rows(), 1.0 / count);
  const VectorXd c = VectorXd::Ones(x.cols());

  FactorModel model;
  model.kind = AnalysisKind::PCA;
  factorize(z / std::sqrt(count), r, c, max_axes, model);
  for (auto i : main) model.rows.labels.push_back(data.row_labels[static_cast<std::size_t>(i)]);
  model.cols.labels = data.col_labels;
  model.row_profiles = z;
  model.mean_profile = VectorXd::Zero(x.cols());
  model.means = mean;
  model.scales = sd;

  std::vector<double> buf;
  for (std::size_t i = 0; i < rows; ++i) {
    if (data.row_roles[i] != Role::Supplementary) continue;
    const auto row = data.values.row(idx(i));
    buf.assign(row.begin(), row.end());
    model.sup_rows.push_back(project_supplementary_row(model, buf, data.row_labels[i]));
  }
  return model;
}

FactorModel fit_pca_standardized(const MatrixXd& data, std::optional<std::size_t> max_axes) {
  return fit_pca_standardized(NumericTable::from_values(data), max_axes);
}

double chi2_distance(const FactorModel& model, std::size_t a, std::size_t b) {
  const std::size_t main = model.rows.size();
  const std::size_t total = main + model.sup_rows.size();
  for (auto k : {a, b}) {
    if (k >= total) throw Error(ErrorCode::DimensionMismatch, "row index out of range");
    if (k >= main) throw Error(ErrorCode::SupplementaryPoint, "distances are defined on main rows only");
  }
  if (model.row_profiles.rows() != idx(main))
    throw Error(ErrorCode::DimensionMismatch, "model carries no row profiles");
  const VectorXd diff = (model.row_profiles.row(idx(a)) - model.row_profiles.row(idx(b))).transpose();
  return diff.cwiseAbs2().cwiseQuotient(model.cols.masses).sum();
}

std::vector<ModifiedAxis> modified_rates(std::span<const double> eigenvalues, std::size_t q) {
  if (q < 2) throw Error(ErrorCode::QTooSmall, "modified rates need Q >= 2, got " + std::to_string(q));
  const double qd = static_cast<double>(q);
  const double mean = 1.0 / qd;
  const double scale = (qd / (qd - 1.0)) * (qd / (qd - 1.0));

  std::vector<ModifiedAxis> out;
  double sum = 0.0;
  for (std::size_t l = 0; l < eigenvalues.size(); ++l) {
    const double lambda = eigenvalues[l];
    if (!(lambda > mean)) continue;
    const double dev = lambda - mean;
    out.push_back({l, scale * dev * dev, 0.0});
    sum += out.back().modified;
  }
  for (auto& a : out) a.rate = a.modified / sum;
  return out;
}

AxisContributions contributions(const FactorModel& model, std::size_t axis) {
  if (axis >= model.axes()) {
    throw Error(ErrorCode::ZeroEigenvalue,
                "axis " + std::to_string(axis + 1) + " has no positive eigenvalue in this model");
  }
  return {model.rows.contrib.col(idx(axis)), model.cols.contrib.col(idx(axis))};
}

double cos2(const FactorModel& model, PointRef point, std::size_t axis) {
  if (axis >= model.axes()) throw Error(ErrorCode::BadAxis, "axis " + std::to_string(axis + 1));
  auto from_cloud = [&](const PointCloud& cloud) {
    if (point.index >= cloud.size()) throw Error(ErrorCode::DimensionMismatch, "point index out of range");
    if (cloud.dist2(idx(point.index)) <= kOriginTolerance)
      throw Error(ErrorCode::OriginPoint, cloud.labels[point.index]);
    return cloud.cos2(idx(point.index), idx(axis));
  };
  auto from_list = [&](const std::vector<Projection>& list) {
    if (point.index >= list.size()) throw Error(ErrorCode::DimensionMismatch, "point index out of range");
    const auto& p = list[point.index];
    if (p.dist2 <= kOriginTolerance) throw Error(ErrorCode::OriginPoint, p.label);
    return p.cos2(idx(axis));
  };
  switch (point.cloud) {
    case Cloud::Row: return from_cloud(model.rows);
    case Cloud::Col: return from_cloud(model.cols);
    case Cloud::SupplementaryRow: return from_list(model.sup_rows);
    case Cloud::SupplementaryCol: return from_list(model.sup_cols);
    case Cloud::Centroid: return from_list(model.centroids);
  }
  return kNaN;
}

Projection project_supplementary_row(const FactorModel& model, std::span<const double> profile,
                                     std::string label) {
  const std::size_t j = model.cols.size();
  const VectorXd inv = inv_sqrt_lambda(model);
  const MatrixXd& g = model.cols.coords;

  if (model.kind == AnalysisKind::PCA) {
    if (profile.size() != j)
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(j) + " values, got " + std::to_string(profile.size()));
    VectorXd z(idx(j));
    for (std::size_t k = 0; k < j; ++k) {
      if (!std::isfinite(profile[k])) throw Error(ErrorCode::NegativeEntry, "non-finite value");
      z(idx(k)) = (profile[k] - model.means(idx(k))) / model.scales(idx(k));
    }
    VectorXd coords = (g.transpose() * z).cwiseProduct(inv);
    return make_projection(std::move(coords), z.squaredNorm(), std::move(label),
                           ProjectionRole::SupplementaryRow, 1.0);
  }

  double total = 0.0;
  check_profile(profile, j, total);
  const VectorXd h = Eigen::Map<const VectorXd>(profile.data(), idx(j)) / total;
  VectorXd coords = (g.transpose() * h).cwiseProduct(inv);
  const double dist2 = (h - model.mean_profile).cwiseAbs2().cwiseQuotient(model.cols.masses).sum();
  return make_projection(std::move(coords), dist2, std::move(label), ProjectionRole::SupplementaryRow,
                         total);
}

Projection project_supplementary_col(const FactorModel& model, std::span<const double> profile,
                                     std::string label) {
  const std::size_t i = model.rows.size();
  const VectorXd inv = inv_sqrt_lambda(model);
  const MatrixXd& f = model.rows.coords;

  if (model.kind == AnalysisKind::PCA) {
    // Supplementary variable: coordinates are its correlations with the axes.
    if (profile.size() != i)
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(i) + " values, got " + std::to_string(profile.size()));
    const VectorXd x = Eigen::Map<const VectorXd>(profile.data(), idx(i));
    const VectorXd centered = x.array() - x.mean();
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(i));
    if (!(sd > 0.0)) throw Error(ErrorCode::ConstantColumn, label);
    const VectorXd z = centered / sd;
    VectorXd coords = (f.transpose() * z.cwiseProduct(model.rows.masses)).cwiseProduct(inv);
    return make_projection(std::move(coords), 1.0, std::move(label), ProjectionRole::SupplementaryCol, 1.0);
  }

  double total = 0.0;
  check_profile(profile, i, total);
  const VectorXd k = Eigen::Map<const VectorXd>(profile.data(), idx(i)) / total;
  VectorXd coords = (f.transpose() * k).cwiseProduct(inv);
  const double dist2 = (k - model.rows.masses).cwiseAbs2().cwiseQuotient(model.rows.masses).sum();
  return make_projection(std::move(coords), dist2, std::move(label), ProjectionRole::SupplementaryCol,
                         total);
}

Projection category_centroid(const FactorModel& model, std::span<const std::size_t> individuals,
                             std::string label) {
  if (individuals.empty()) throw Error(ErrorCode::EmptySet, "centroid of an empty set");
  const std::size_t main = model.rows.size();
  VectorXd coords = VectorXd::Zero(idx(model.axes()));
  VectorXd profile = VectorXd::Zero(model.row_profiles.cols());
  double mass = 0.0;
  for (auto i : individuals) {
    if (i >= main) throw Error(ErrorCode::SupplementaryPoint, "centroid members must be main rows");
    const double m = model.rows.masses(idx(i));
    coords += m * model.rows.coords.row(idx(i)).transpose();
    profile += m * model.row_profiles.row(idx(i)).transpose();
    mass += m;
  }
  coords /= mass;
  profile /= mass;
  const double dist2 = (profile - model.mean_profile).cwiseAbs2().cwiseQuotient(model.cols.masses).sum();
  return make_projection(std::move(coords), dist2, std::move(label), ProjectionRole::Centroid,
                         static_cast<double>(individuals.size()));
}

}  // namespace gda
