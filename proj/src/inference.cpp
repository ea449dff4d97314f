#include "gda/inference.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <thread>

#include "gda/error.hpp"

namespace gda {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Each draw gets its own generator so results are independent of scheduling.
std::uint64_t draw_seed(std::uint64_t seed, std::uint64_t draw) {
  return splitmix64(splitmix64(seed) ^ splitmix64(draw + 1));
}

bool at_least(double stat, double observed) {
  return stat >= observed - 1e-12 * std::max(1.0, observed);
}

// Number of size-m subsets of n items, saturating at cap + 1.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t m, std::uint64_t cap) {
  m = std::min(m, n - m);
  long double acc = 1.0L;
  for (std::uint64_t k = 1; k <= m; ++k) {
    acc = acc * static_cast<long double>(n - m + k) / static_cast<long double>(k);
    if (acc > static_cast<long double>(cap) + 0.5L) return cap + 1;
  }
  return static_cast<std::uint64_t>(acc + 0.5L);
}

VectorXd subset_mean(const MatrixXd& coords, std::span<const std::size_t> members) {
  VectorXd sum = VectorXd::Zero(coords.cols());
  for (auto i : members) sum += coords.row(static_cast<Index>(i)).transpose();
  return sum / static_cast<double>(members.size());
}

}  // namespace

PointSet reference_cloud(const FactorModel& model, std::size_t axes) {
  const std::size_t l = axes == 0 ? model.axes() : axes;
  if (l > model.axes()) throw Error(ErrorCode::BadAxis, "model has only " + std::to_string(model.axes()) + " axes");
  return {model.rows.coords.leftCols(static_cast<Index>(l)), model.rows.masses};
}

std::size_t Subcloud::size() const {
  if (internal()) return std::get<0>(members).size();
  return static_cast<std::size_t>(std::get<1>(members).rows());
}

std::string to_string(TestMode mode) { return mode == TestMode::Exhaustive ? "exhaustive" : "monte_carlo"; }

ReferenceGeometry::ReferenceGeometry(const PointSet& reference) {
  if (reference.size() < 2) throw Error(ErrorCode::SingularCovariance, "reference cloud needs >= 2 points");
  if (reference.dims() == 0) throw Error(ErrorCode::SingularCovariance, "reference cloud has no axes");
  if (reference.masses.size() != reference.coords.rows())
    throw Error(ErrorCode::DimensionMismatch, "one mass per reference point");
  const double total = reference.masses.sum();
  if (!(total > 0.0) || (reference.masses.array() < 0.0).any())
    throw Error(ErrorCode::DegenerateInput, "reference masses must be nonnegative with positive sum");
  const VectorXd w = reference.masses / total;

  mean_ = reference.coords.transpose() * w;
  const MatrixXd centered = reference.coords.rowwise() - mean_.transpose();
  cov_ = centered.transpose() * w.asDiagonal() * centered;

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov_);
  const VectorXd& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || ev.minCoeff() <= 1e-12 * top)
    throw Error(ErrorCode::SingularCovariance, "reference covariance is not invertible on the retained axes");
  whitening_ = ev.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

double ReferenceGeometry::statistic(const VectorXd& subcloud_mean) const {
  return (whitening_ * (subcloud_mean - mean_)).squaredNorm();
}

double mahalanobis_statistic(const PointSet& reference, const MatrixXd& subcloud_points) {
  if (subcloud_points.rows() == 0) throw Error(ErrorCode::EmptySet, "empty subcloud");
  if (subcloud_points.cols() != reference.coords.cols())
    throw Error(ErrorCode::DimensionMismatch, "subcloud dimension differs from reference");
  const ReferenceGeometry geometry(reference);
  return geometry.statistic(subcloud_points.colwise().mean().transpose());
}

TypicalityResult typicality_test(const PointSet& reference, const Subcloud& subcloud, std::uint64_t n_perm,
                                 std::uint64_t seed, unsigned threads) {
  if (n_perm == 0) throw Error(ErrorCode::BadConfig, "n_perm must be >= 1");
  const std::size_t n = reference.size();
  const std::size_t m = subcloud.size();
  if (m == 0) throw Error(ErrorCode::EmptySet, "empty subcloud");
  if (m > n) throw Error(ErrorCode::SubcloudTooLarge, std::to_string(m) + " members, reference has " + std::to_string(n));

  const ReferenceGeometry geometry(reference);
  const MatrixXd& coords = reference.coords;

  TypicalityResult result;
  result.seed = seed;
  if (subcloud.internal()) {
    auto members = std::get<0>(subcloud.members);
    std::sort(members.begin(), members.end());
    if (std::adjacent_find(members.begin(), members.end()) != members.end())
      throw Error(ErrorCode::DimensionMismatch, "duplicate subcloud member");
    if (members.back() >= n) throw Error(ErrorCode::DimensionMismatch, "subcloud member out of range");
    result.observed_statistic = geometry.statistic(subset_mean(coords, members));
  } else {
    const auto& pts = std::get<1>(subcloud.members);
    if (pts.cols() != coords.cols()) throw Error(ErrorCode::DimensionMismatch, "subcloud dimension differs from reference");
    result.observed_statistic = geometry.statistic(pts.colwise().mean().transpose());
  }
  const double observed = result.observed_statistic;

  const std::uint64_t subsets = binomial_capped(n, m, n_perm);
  if (subsets <= n_perm) {
    // Enumerate every size-m subset in lexicographic order.
    result.mode = TestMode::Exhaustive;
    result.permutation_count = subsets;
    std::vector<std::size_t> comb(m);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    std::uint64_t hits = 0;
    while (true) {
      if (at_least(geometry.statistic(subset_mean(coords, comb)), observed)) ++hits;
      std::size_t k = m;
      while (k > 0 && comb[k - 1] == n - m + (k - 1)) --k;
      if (k == 0) break;
      ++comb[k - 1];
      for (std::size_t t = k; t < m; ++t) comb[t] = comb[t - 1] + 1;
    }
    result.p_value = static_cast<double>(hits) / static_cast<double>(subsets);
    return result;
  }

  result.mode = TestMode::MonteCarlo;
  result.permutation_count = n_perm;

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> swaps(m);
    std::uint64_t hits = 0;
    for (std::uint64_t draw = begin; draw < end; ++draw) {
      std::mt19937_64 rng(draw_seed(seed, draw));
      // Partial Fisher-Yates; swaps are undone so pool stays the identity.
      for (std::size_t k = 0; k < m; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, n - 1);
        swaps[k] = pick(rng);
        std::swap(pool[k], pool[swaps[k]]);
      }
      if (at_least(geometry.statistic(subset_mean(coords, std::span(pool).first(m))), observed)) ++hits;
      for (std::size_t k = m; k-- > 0;) std::swap(pool[k], pool[swaps[k]]);
    }
    return hits;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(n_perm, 256))));
  std::uint64_t hits = 0;
  if (workers == 1) {
    hits = run_range(0, n_perm);
  } else {
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = n_perm * w / workers;
      const std::uint64_t end = n_perm * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] { partial[w] = run_range(begin, end); });
    }
    for (auto& t : pool) t.join();
    for (auto h : partial) hits += h;
  }
  result.p_value = static_cast<double>(1 + hits) / static_cast<double>(1 + n_perm);
  return result;
}

}  // namespace gda
