#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gda/ca_engine.hpp"

namespace gda {

/// Weighted point cloud: one row of coordinates per point.
struct PointSet {
  Eigen::MatrixXd coords;
  Eigen::VectorXd masses;

  std::size_t size() const noexcept { return static_cast<std::size_t>(coords.rows()); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(coords.cols()); }
};

/// Main rows of a fitted model on its first `axes` axes (all retained axes
/// when `axes` is 0).
PointSet reference_cloud(const FactorModel& model, std::size_t axes = 0);

/// Either indices into the reference cloud or external points in the same
/// coordinate system (e.g. projected supplementary individuals).
struct Subcloud {
  std::variant<std::vector<std::size_t>, Eigen::MatrixXd> members;
  std::string label;

  bool internal() const noexcept { return members.index() == 0; }
  std::size_t size() const;
};

/// Mean point and inverse covariance of a reference cloud, mass weighted.
class ReferenceGeometry {
 public:
  /// Throws SingularCovariance when the covariance is not invertible.
  explicit ReferenceGeometry(const PointSet& reference);

  /// (g - mu)^T Sigma^-1 (g - mu).
  double statistic(const Eigen::VectorXd& subcloud_mean) const;
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd whitening_;
};

/// Mahalanobis norm of the uniform mean of `subcloud_points` about the
/// reference mean point, under the reference covariance.
double mahalanobis_statistic(const PointSet& reference, const Eigen::MatrixXd& subcloud_points);

enum class TestMode { Exhaustive, MonteCarlo };

struct TypicalityResult {
  double observed_statistic = 0.0;
  std::uint64_t permutation_count = 0;
  double p_value = 1.0;
  TestMode mode = TestMode::MonteCarlo;
  std::uint64_t seed = 0;
};

std::string to_string(TestMode mode);

/// Subset-sampling permutation test. Exhaustive when the number of size-m
/// subsets of the reference is at most `n_perm`. Results do not depend on
/// `threads`.
TypicalityResult typicality_test(const PointSet& reference, const Subcloud& subcloud, std::uint64_t n_perm,
                                 std::uint64_t seed, unsigned threads = 1);

}  // namespace gda
