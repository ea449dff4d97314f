#include "gda/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "gda/error.hpp"

namespace gda {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Above this many points the condensed cost matrix is replaced by a
// nearest-neighbour chain on centroids (same hierarchy for Ward, O(P) memory).
constexpr std::size_t kMatrixLimit = 4096;

struct Leaf {
  std::size_t slot_a;
  std::size_t slot_b;
  double height;
  double mass;
};

double ward_cost(double ma, double mb, const VectorXd& ga, const VectorXd& gb) {
  return ma * mb / (ma + mb) * (ga - gb).squaredNorm();
}

// Greedy Lance-Williams agglomeration over a condensed cost matrix with a
// per-row nearest-neighbour cache. Slots are lowest leaves.
std::vector<Leaf> lance_williams(const MatrixXd& x, const std::vector<double>& mass0) {
  const std::size_t p = static_cast<std::size_t>(x.rows());
  auto at = [p](std::size_t i, std::size_t j) { return i * p - i * (i + 1) / 2 + (j - i - 1); };

  std::vector<double> d(p * (p - 1) / 2);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      d[at(i, j)] = ward_cost(mass0[i], mass0[j], x.row(static_cast<Index>(i)).transpose(),
                              x.row(static_cast<Index>(j)).transpose());

  std::vector<double> mass = mass0;
  std::vector<char> active(p, 1);
  std::vector<std::size_t> nn(p, 0);
  std::vector<double> nnd(p, std::numeric_limits<double>::infinity());

  auto rescan = [&](std::size_t k) {
    nnd[k] = std::numeric_limits<double>::infinity();
    nn[k] = p;
    for (std::size_t l = k + 1; l < p; ++l) {
      if (active[l] && d[at(k, l)] < nnd[k]) {
        nnd[k] = d[at(k, l)];
        nn[k] = l;
      }
    }
  };
  for (std::size_t k = 0; k + 1 < p; ++k) rescan(k);
  nnd[p - 1] = std::numeric_limits<double>::infinity();

  std::vector<Leaf> out;
  out.reserve(p - 1);
  for (std::size_t step = 0; step + 1 < p; ++step) {
    std::size_t i = p;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p; ++k) {
      if (active[k] && nnd[k] < best) {
        best = nnd[k];
        i = k;
      }
    }
    const std::size_t j = nn[i];
    const double dij = d[at(i, j)];
    out.push_back({i, j, dij, mass[i] + mass[j]});

    for (std::size_t k = 0; k < p; ++k) {
      if (!active[k] || k == i || k == j) continue;
      const double dki = d[at(std::min(k, i), std::max(k, i))];
      const double dkj = d[at(std::min(k, j), std::max(k, j))];
      const double mk = mass[k];
      d[at(std::min(k, i), std::max(k, i))] =
          ((mk + mass[i]) * dki + (mk + mass[j]) * dkj - mk * dij) / (mk + mass[i] + mass[j]);
    }
    active[j] = 0;
    mass[i] += mass[j];
    nnd[j] = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < j; ++k) {
      if (!active[k]) continue;
      if (k == i || nn[k] == i || nn[k] == j) {
        rescan(k);
      } else if (k < i) {
        const double dki = d[at(k, i)];
        if (dki < nnd[k] || (dki == nnd[k] && i < nn[k])) {
          nnd[k] = dki;
          nn[k] = i;
        }
      }
    }
  }
  return out;
}

// Nearest-neighbour chain on centroids; merges come out of height order and
// are stably sorted afterwards.
std::vector<Leaf> nn_chain(const MatrixXd& x, const std::vector<double>& mass0) {
  const std::size_t p = static_cast<std::size_t>(x.rows());
  MatrixXd centroid = x;
  std::vector<double> mass = mass0;
  std::vector<char> active(p, 1);
  std::vector<std::size_t> chain;
  std::vector<Leaf> out;
  out.reserve(p - 1);

  auto cost = [&](std::size_t a, std::size_t b) {
    return ward_cost(mass[a], mass[b], centroid.row(static_cast<Index>(a)).transpose(),
                     centroid.row(static_cast<Index>(b)).transpose());
  };

  std::size_t remaining = p;
  while (remaining > 1) {
    if (chain.empty()) {
      std::size_t first = 0;
      while (!active[first]) ++first;
      chain.push_back(first);
    }
    const std::size_t a = chain.back();
    const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : p;
    std::size_t b = prev;
    double best = prev < p ? cost(a, prev) : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p; ++k) {
      if (!active[k] || k == a || k == prev) continue;
      const double c = cost(a, k);
      if (c < best) {
        best = c;
        b = k;
      }
    }
    if (b == prev) {
      chain.pop_back();
      chain.pop_back();
      const std::size_t lo = std::min(a, b);
      const std::size_t hi = std::max(a, b);
      const double m = mass[lo] + mass[hi];
      out.push_back({lo, hi, best, m});
      centroid.row(static_cast<Index>(lo)) =
          (mass[lo] * centroid.row(static_cast<Index>(lo)) + mass[hi] * centroid.row(static_cast<Index>(hi))) / m;
      mass[lo] = m;
      active[hi] = 0;
      --remaining;
    } else {
      chain.push_back(b);
    }
  }
  // Sort on heights lifted to their children's so a rounding inversion can
  // never place a merge before the merges that built its clusters.
  std::vector<double> lifted(out.size());
  std::vector<double> slot_height(p, 0.0);
  for (std::size_t t = 0; t < out.size(); ++t) {
    lifted[t] = std::max({out[t].height, slot_height[out[t].slot_a], slot_height[out[t].slot_b]});
    slot_height[out[t].slot_a] = lifted[t];
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return lifted[l] < lifted[r]; });
  std::vector<Leaf> sorted;
  sorted.reserve(out.size());
  for (auto t : order) sorted.push_back(out[t]);
  return sorted;
}

void write_node(std::ostream& out, const Dendrogram& dg, std::size_t node, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  const std::size_t p = dg.leaves();
  if (node < p) {
    out << pad << nlohmann::json(dg.labels()[node]).dump();
    return;
  }
  const auto& m = dg.merges()[node - p];
  out << pad << "[\n";
  write_node(out, dg, m.a, depth + 1);
  out << ",\n";
  write_node(out, dg, m.b, depth + 1);
  out << ",\n" << pad << "  " << fmt::format("{:.17g}", m.height) << ",\n";
  out << pad << "  " << fmt::format("{:.17g}", m.mass) << "\n" << pad << "]";
}

}  // namespace

Dendrogram::Dendrogram(std::vector<std::string> labels, std::vector<Merge> merges)
    : labels_(std::move(labels)), merges_(std::move(merges)) {
  const std::size_t p = labels_.size();
  if (p < 2) throw Error(ErrorCode::DegenerateInput, "a dendrogram needs at least 2 leaves");
  if (merges_.size() != p - 1) throw Error(ErrorCode::DimensionMismatch, "a dendrogram over P leaves has P-1 merges");
  std::vector<char> used(2 * p - 1, 0);
  for (std::size_t t = 0; t < merges_.size(); ++t) {
    for (auto node : {merges_[t].a, merges_[t].b}) {
      if (node >= p + t || used[node]) throw Error(ErrorCode::DimensionMismatch, "malformed merge list");
      used[node] = 1;
    }
  }
}

double Dendrogram::cophenetic(std::size_t i, std::size_t j) const {
  const std::size_t p = leaves();
  if (i >= p || j >= p) throw Error(ErrorCode::DimensionMismatch, "leaf index out of range");
  if (i == j) return 0.0;
  std::vector<std::size_t> parent(2 * p - 1, 2 * p - 1);
  for (std::size_t t = 0; t < merges_.size(); ++t) parent[merges_[t].a] = parent[merges_[t].b] = p + t;
  std::vector<char> above_i(2 * p, 0);
  for (std::size_t n = i; n < 2 * p - 1; n = parent[n]) above_i[n] = 1;
  std::size_t n = j;
  while (!above_i[n]) n = parent[n];
  return merges_[n - p].height;
}

MatrixXd Dendrogram::cophenetic_matrix() const {
  const std::size_t p = leaves();
  MatrixXd out = MatrixXd::Zero(static_cast<Index>(p), static_cast<Index>(p));
  std::vector<std::vector<std::size_t>> members(2 * p - 1);
  for (std::size_t k = 0; k < p; ++k) members[k] = {k};
  for (std::size_t t = 0; t < merges_.size(); ++t) {
    const auto& m = merges_[t];
    for (auto x : members[m.a])
      for (auto y : members[m.b])
        out(static_cast<Index>(x), static_cast<Index>(y)) = out(static_cast<Index>(y), static_cast<Index>(x)) = m.height;
    auto& joined = members[p + t];
    joined = std::move(members[m.a]);
    joined.insert(joined.end(), members[m.b].begin(), members[m.b].end());
    members[m.b].clear();
  }
  return out;
}

std::string Dendrogram::to_text() const {
  std::ostringstream ss;
  write_dendrogram(ss, *this);
  return ss.str();
}

Dendrogram ward_cluster(const MatrixXd& coords, std::span<const double> masses, std::span<const std::size_t> axes,
                        std::vector<std::string> labels) {
  const auto p = static_cast<std::size_t>(coords.rows());
  if (p < 2) throw Error(ErrorCode::DegenerateInput, "clustering needs at least 2 points");
  if (masses.size() != p) throw Error(ErrorCode::DimensionMismatch, "one mass per point");
  for (double m : masses)
    if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorCode::DegenerateInput, "masses must be positive");
  if (!coords.allFinite()) throw Error(ErrorCode::DegenerateInput, "non-finite coordinate");
  if (labels.empty()) {
    for (std::size_t k = 0; k < p; ++k) labels.push_back(std::to_string(k));
  } else if (labels.size() != p) {
    throw Error(ErrorCode::DimensionMismatch, "one label per point");
  }

  MatrixXd x;
  if (axes.empty()) {
    x = coords;
  } else {
    std::vector<Index> cols;
    for (auto a : axes) {
      if (a >= static_cast<std::size_t>(coords.cols())) throw Error(ErrorCode::BadAxis, "axis " + std::to_string(a + 1));
      cols.push_back(static_cast<Index>(a));
    }
    x = coords(Eigen::all, cols);
  }

  const std::vector<double> mass(masses.begin(), masses.end());
  const auto steps = p <= kMatrixLimit ? lance_williams(x, mass) : nn_chain(x, mass);

  std::vector<std::size_t> node(p);
  std::iota(node.begin(), node.end(), std::size_t{0});
  std::vector<double> height_of(2 * p - 1, 0.0);
  std::vector<Merge> merges;
  merges.reserve(p - 1);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto& s = steps[t];
    const std::size_t a = node[s.slot_a];
    const std::size_t b = node[s.slot_b];
    // Clamp rounding so that cophenetic heights are exactly ultrametric.
    const double h = std::max({s.height, height_of[a], height_of[b]});
    merges.push_back({a, b, h, s.mass});
    height_of[p + t] = h;
    node[s.slot_a] = p + t;
  }
  return Dendrogram(std::move(labels), std::move(merges));
}

std::vector<std::size_t> cut(const Dendrogram& dendrogram, std::size_t k) {
  const std::size_t p = dendrogram.leaves();
  if (k < 1 || k > p) throw Error(ErrorCode::BadK, "k must be in [1, " + std::to_string(p) + "]");
  std::vector<std::size_t> parent(2 * p - 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t n) {
    while (parent[n] != n) n = parent[n] = parent[parent[n]];
    return n;
  };
  const auto& merges = dendrogram.merges();
  for (std::size_t t = 0; t < p - k; ++t) {
    parent[find(merges[t].a)] = p + t;
    parent[find(merges[t].b)] = p + t;
  }
  std::vector<std::size_t> out(p);
  std::vector<std::size_t> id_of(2 * p - 1, p);
  std::size_t next = 0;
  for (std::size_t leaf = 0; leaf < p; ++leaf) {
    const auto root = find(leaf);
    if (id_of[root] == p) id_of[root] = next++;
    out[leaf] = id_of[root];
  }
  return out;
}

void write_dendrogram(std::ostream& out, const Dendrogram& dendrogram) {
  out << "# gda-dendrogram v1: node = [left, right, height, mass]; leaf = \"label\"\n";
  write_node(out, dendrogram, 2 * dendrogram.leaves() - 2, 0);
  out << "\n";
}

}  // namespace gda
