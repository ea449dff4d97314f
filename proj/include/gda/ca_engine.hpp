#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gda/tabular.hpp"

namespace gda {

enum class AnalysisKind { CA, MCA, PCA };

std::string to_string(AnalysisKind kind);
AnalysisKind analysis_kind_from_string(const std::string& s);

/// Main points of one cloud (rows or columns) with their diagnostics.
/// Matrices are points x retained axes.
struct PointCloud {
  std::vector<std::string> labels;
  Eigen::VectorXd masses;
  Eigen::MatrixXd coords;
  Eigen::MatrixXd contrib;
  /// NaN for a point sitting at the origin.
  Eigen::MatrixXd cos2;
  /// Squared distance of each point to the cloud origin in the full space.
  Eigen::VectorXd dist2;

  std::size_t size() const noexcept { return labels.size(); }
};

enum class ProjectionRole { SupplementaryRow, SupplementaryCol, Centroid };

struct Projection {
  std::string label;
  ProjectionRole role = ProjectionRole::SupplementaryRow;
  Eigen::VectorXd coords;
  Eigen::VectorXd cos2;
  double dist2 = 0.0;
  /// Total count (CA/MCA profile total) or member count (centroids).
  double weight = 0.0;
};

/// Result of a CA, MCA or standardized PCA fit.
///
/// `eigenvalues` holds every nonzero eigenvalue of the problem so rates stay
/// exact; coordinates only span the first `axes()` of them. For PCA the
/// "column" cloud is the variables: unit masses, coordinates equal to the
/// variable/axis correlations.
struct FactorModel {
  AnalysisKind kind = AnalysisKind::CA;
  std::size_t q_active = 0;
  Eigen::VectorXd eigenvalues;
  double total_inertia = 0.0;

  PointCloud rows;
  PointCloud cols;
  std::vector<Projection> sup_rows;
  std::vector<Projection> sup_cols;
  std::vector<Projection> centroids;

  /// Main row profiles (p_ij / r_i) for CA/MCA, standardized values for PCA.
  Eigen::MatrixXd row_profiles;
  /// Profile of the cloud's centre: column masses for CA/MCA, zero for PCA.
  Eigen::VectorXd mean_profile;
  /// PCA only: per-variable mean and population standard deviation.
  Eigen::VectorXd means;
  Eigen::VectorXd scales;

  std::size_t axes() const noexcept { return static_cast<std::size_t>(rows.coords.cols()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  /// lambda / total inertia for every eigenvalue.
  Eigen::VectorXd rates() const;
};

/// Singular values below this fraction of the largest are dropped.
inline constexpr double kRankTolerance = 1e-12;

/// CA of the main block. Supplementary rows/columns with a nonzero total are
/// projected and attached. `max_axes` defaults to every positive axis.
FactorModel fit_ca(const ContingencyTable& table, std::optional<std::size_t> max_axes = std::nullopt);

/// CA of the main columns of an indicator matrix.
FactorModel fit_mca(const IndicatorMatrix& ind, std::optional<std::size_t> max_axes = std::nullopt);

/// Numeric individuals x variables, with optional supplementary rows.
struct NumericTable {
  Eigen::MatrixXd values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<Role> row_roles;

  static NumericTable from_values(const Eigen::MatrixXd& values);
};

FactorModel fit_pca_standardized(const NumericTable& data, std::optional<std::size_t> max_axes = std::nullopt);
FactorModel fit_pca_standardized(const Eigen::MatrixXd& data, std::optional<std::size_t> max_axes = std::nullopt);

/// Squared chi-squared distance between two main row profiles (squared
/// Euclidean distance of standardized values for PCA).
double chi2_distance(const FactorModel& model, std::size_t a, std::size_t b);

struct ModifiedAxis {
  std::size_t axis = 0;
  double modified = 0.0;
  double rate = 0.0;
};

/// Benzécri correction: eigenvalues above 1/Q are mapped to
/// (Q/(Q-1))^2 (lambda - 1/Q)^2 and renormalized to rates.
std::vector<ModifiedAxis> modified_rates(std::span<const double> eigenvalues, std::size_t q);

struct AxisContributions {
  Eigen::VectorXd rows;
  Eigen::VectorXd cols;
};

AxisContributions contributions(const FactorModel& model, std::size_t axis);

enum class Cloud { Row, Col, SupplementaryRow, SupplementaryCol, Centroid };

struct PointRef {
  Cloud cloud = Cloud::Row;
  std::size_t index = 0;
};

double cos2(const FactorModel& model, PointRef point, std::size_t axis);

/// Projects a supplementary row given its counts over the main columns
/// (raw variable values for PCA).
Projection project_supplementary_row(const FactorModel& model, std::span<const double> profile,
                                     std::string label = {});
/// Projects a supplementary column given its counts over the main rows.
Projection project_supplementary_col(const FactorModel& model, std::span<const double> profile,
                                     std::string label = {});

/// Mass-weighted mean point of a set of main rows.
Projection category_centroid(const FactorModel& model, std::span<const std::size_t> individuals,
                             std::string label = {});

}  // namespace gda
