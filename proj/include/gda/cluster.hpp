#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gda {

/// One agglomeration step. Leaves are nodes 0..P-1; the node created by
/// merge t is P + t. `a` holds the cluster with the smaller lowest leaf.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0.0;
  double mass = 0.0;
};

class Dendrogram {
 public:
  Dendrogram(std::vector<std::string> labels, std::vector<Merge> merges);

  std::size_t leaves() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Merge>& merges() const noexcept { return merges_; }

  /// Height of the merge that first joins leaves i and j (0 when i == j).
  double cophenetic(std::size_t i, std::size_t j) const;
  Eigen::MatrixXd cophenetic_matrix() const;

  /// Nested-list text form, see write_dendrogram.
  std::string to_text() const;

 private:
  std::vector<std::string> labels_;
  std::vector<Merge> merges_;
};

/// Mass-weighted Ward agglomeration on Euclidean coordinates. Merge height
/// is the Ward cost m_a m_b / (m_a + m_b) |g_a - g_b|^2, so heights sum to the
/// cloud's inertia about its mass-weighted mean. `axes` selects coordinate
/// columns (all when empty). Equal costs go to the pair with the smallest
/// lowest leaves.
Dendrogram ward_cluster(const Eigen::MatrixXd& coords, std::span<const double> masses,
                        std::span<const std::size_t> axes = {}, std::vector<std::string> labels = {});

/// Cluster id per leaf after undoing the k-1 highest merges. Ids are
/// numbered by each cluster's lowest leaf.
std::vector<std::size_t> cut(const Dendrogram& dendrogram, std::size_t k);

/// Writes a header comment line and then the tree, one node per line with
/// two-space indentation per depth:
///
///     # gda-dendrogram v1: node = [left, right, height, mass]; leaf = "label"
///     [
///       [
///         "p0",
///         "p1",
///         0.5,
///         2
///       ],
///       "p2",
///       4.166666666666667,
///       3
///     ]
///
/// The body is valid JSON. Heights use 17 significant digits (%g style, no
/// trailing zeros).
void write_dendrogram(std::ostream& out, const Dendrogram& dendrogram);

}  // namespace gda
