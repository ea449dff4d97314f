#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <doctest.h>

#include "gda/ca_engine.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gda;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<double> column(const MatrixXd& m, Index j) { return {m.col(j).data(), m.col(j).data() + m.rows()}; }
std::vector<double> row(const MatrixXd& m, Index i) {
  std::vector<double> out;
  for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

MatrixXd random_shape_table(std::mt19937_64& rng) {
  const Index rows = std::uniform_int_distribution<Index>(2, 8)(rng);
  const Index cols = std::uniform_int_distribution<Index>(2, 6)(rng);
  return oracle::random_table(rng, rows, cols);
}

}  // namespace

TEST_CASE("independence table has no informative axis") {
  const auto m = fit_ca(ContingencyTable::from_counts((MatrixXd(2, 2) << 10, 10, 10, 10).finished()));
  CHECK(std::abs(m.total_inertia) < 1e-15);
  CHECK(m.rank() == 0);
  CHECK(m.axes() == 0);
  CHECK_ERROR_CODE(contributions(m, 0), ErrorCode::ZeroEigenvalue);
}

TEST_CASE("perfect 2x2 association") {
  const auto m = fit_ca(ContingencyTable::from_counts((MatrixXd(2, 2) << 10, 0, 0, 10).finished()));
  REQUIRE(m.rank() == 1);
  CHECK(m.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.total_inertia == doctest::Approx(1.0).epsilon(1e-12));
  const auto ctr = contributions(m, 0);
  CHECK(ctr.rows(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ctr.rows(1) == doctest::Approx(0.5).epsilon(1e-12));
  // Both rows lie on the only axis.
  CHECK(cos2(m, {Cloud::Row, 0}, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cos2(m, {Cloud::Col, 1}, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit_ca matches the dense eigendecomposition oracle") {
  std::mt19937_64 rng(43);
  SUBCASE("random 4x3 with entries 1-9") {
    const MatrixXd n = oracle::random_table(rng, 4, 3, 1, 9);
    const auto m = fit_ca(ContingencyTable::from_counts(n));
    const auto o = oracle::correspondence_analysis(n);
    REQUIRE(m.rank() == static_cast<std::size_t>(o.eigenvalues.size()));
    CHECK((m.eigenvalues - o.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(oracle::max_diff_up_to_sign(m.rows.coords, o.f) < 1e-10);
    CHECK(oracle::max_diff_up_to_sign(m.cols.coords, o.g) < 1e-10);
    CHECK((m.rows.contrib - o.row_contrib).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((m.cols.contrib - o.col_contrib).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((m.rows.cos2 - o.row_cos2).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((m.cols.cos2 - o.col_cos2).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("contributions recomputed from masses and coordinates") {
    const MatrixXd n = oracle::random_table(rng, 4, 3, 1, 9);
    const auto m = fit_ca(ContingencyTable::from_counts(n));
    for (std::size_t l = 0; l < m.axes(); ++l) {
      const auto ctr = contributions(m, l);
      for (Index i = 0; i < 4; ++i) {
        const double f = m.rows.coords(i, static_cast<Index>(l));
        CHECK(ctr.rows(i) == doctest::Approx(m.rows.masses(i) * f * f / m.eigenvalues(static_cast<Index>(l))));
      }
    }
  }
}

TEST_CASE("FactorModel invariants on 100 random tables") {
  std::mt19937_64 rng(2024);
  for (int seed = 0; seed < 100; ++seed) {
    const MatrixXd n = random_shape_table(rng);
    const auto m = fit_ca(ContingencyTable::from_counts(n));
    CAPTURE(seed);
    CHECK(std::abs(m.rows.masses.sum() - 1.0) < 1e-12);
    CHECK(std::abs(m.cols.masses.sum() - 1.0) < 1e-12);
    CHECK(std::abs(m.eigenvalues.sum() - m.total_inertia) < 1e-10);
    CHECK(m.axes() == m.rank());
    for (Index l = 0; l < static_cast<Index>(m.axes()); ++l) {
      CHECK(std::abs(m.rows.contrib.col(l).sum() - 1.0) < 1e-10);
      CHECK(std::abs(m.cols.contrib.col(l).sum() - 1.0) < 1e-10);
      CHECK(std::abs(m.rows.masses.dot(m.rows.coords.col(l).cwiseAbs2()) - m.eigenvalues(l)) < 1e-10);
      CHECK(std::abs(m.cols.masses.dot(m.cols.coords.col(l).cwiseAbs2()) - m.eigenvalues(l)) < 1e-10);
      if (l > 0) CHECK(m.eigenvalues(l) <= m.eigenvalues(l - 1));
    }
    for (Index i = 0; i < m.rows.cos2.rows(); ++i)
      if (m.rows.dist2(i) > 1e-20) CHECK(std::abs(m.rows.cos2.row(i).sum() - 1.0) < 1e-10);
    for (Index j = 0; j < m.cols.cos2.rows(); ++j)
      if (m.cols.dist2(j) > 1e-20) CHECK(std::abs(m.cols.cos2.row(j).sum() - 1.0) < 1e-10);
  }
}

TEST_CASE("axis orientation puts the largest-contribution column on the positive side") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const auto m = fit_ca(ContingencyTable::from_counts(random_shape_table(rng)));
    for (Index l = 0; l < static_cast<Index>(m.axes()); ++l) {
      Index best = 0;
      m.cols.contrib.col(l).maxCoeff(&best);
      CHECK(m.cols.coords(best, l) > 0.0);
    }
  }
}

TEST_CASE("transpose swaps clouds, scaling changes nothing") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const MatrixXd n = random_shape_table(rng);
    const auto m = fit_ca(ContingencyTable::from_counts(n));
    const auto t = fit_ca(ContingencyTable::from_counts(n.transpose()));
    REQUIRE(t.rank() == m.rank());
    CHECK((t.eigenvalues - m.eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(oracle::max_diff_up_to_sign(t.rows.coords, m.cols.coords) < 1e-10);
    CHECK(oracle::max_diff_up_to_sign(t.cols.coords, m.rows.coords) < 1e-10);

    const auto s = fit_ca(ContingencyTable::from_counts(n * 7.25));
    REQUIRE(s.rank() == m.rank());
    CHECK((s.rows.masses - m.rows.masses).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.cols.masses - m.cols.masses).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.eigenvalues - m.eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.rows.coords - m.rows.coords).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.cols.coords - m.cols.coords).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("chi2_distance") {
  SUBCASE("hand computation on [[1,3],[3,1]]") {
    const auto m = fit_ca(ContingencyTable::from_counts((MatrixXd(2, 2) << 1, 3, 3, 1).finished()));
    // Profiles (1/4, 3/4) and (3/4, 1/4), column masses 1/2: 2 * (1/2)^2 / (1/2) = 1.
    CHECK(chi2_distance(m, 0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    const double coord = (m.rows.coords.row(0) - m.rows.coords.row(1)).squaredNorm();
    CHECK(std::abs(coord - 1.0) < 1e-12);
    CHECK(chi2_distance(m, 0, 0) == 0.0);
  }
  SUBCASE("identical rows") {
    const auto m = fit_ca(ContingencyTable::from_counts((MatrixXd(3, 2) << 1, 2, 2, 4, 5, 1).finished()));
    CHECK(chi2_distance(m, 0, 1) == doctest::Approx(0.0).scale(1e-14));
  }
  SUBCASE("full-rank coordinate distance on random tables") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
      const MatrixXd n = random_shape_table(rng);
      const auto m = fit_ca(ContingencyTable::from_counts(n));
      for (std::size_t a = 0; a < m.rows.size(); ++a)
        for (std::size_t b = 0; b < m.rows.size(); ++b) {
          const double coord = m.axes() == 0 ? 0.0
                                             : (m.rows.coords.row(static_cast<Index>(a)) -
                                                m.rows.coords.row(static_cast<Index>(b)))
                                                   .squaredNorm();
          CHECK(std::abs(chi2_distance(m, a, b) - coord) < 1e-10);
        }
    }
  }
  SUBCASE("distributional equivalence: splitting a column proportionally") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 50; ++rep) {
      const MatrixXd n = random_shape_table(rng);
      MatrixXd split(n.rows(), n.cols() + 1);
      split.leftCols(n.cols()) = n;
      split.col(0) = 0.3 * n.col(0);
      split.col(n.cols()) = 0.7 * n.col(0);
      const auto a = fit_ca(ContingencyTable::from_counts(n));
      const auto b = fit_ca(ContingencyTable::from_counts(split));
      CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
      for (std::size_t i = 0; i < a.rows.size(); ++i)
        for (std::size_t k = 0; k < a.rows.size(); ++k)
          CHECK(std::abs(chi2_distance(a, i, k) - chi2_distance(b, i, k)) < 1e-10);
    }
  }
  SUBCASE("errors") {
    auto t = ContingencyTable::from_counts((MatrixXd(3, 2) << 1, 2, 3, 1, 2, 2).finished());
    t.row_roles[2] = Role::Supplementary;
    const auto m = fit_ca(t);
    CHECK_ERROR_CODE(chi2_distance(m, 0, 2), ErrorCode::SupplementaryPoint);
    CHECK_ERROR_CODE(chi2_distance(m, 0, 3), ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("modified_rates") {
  SUBCASE("Q=7 with eigenvalues reconstructed from the activities rates") {
    const std::vector<double> ev{0.536, 0.282};
    const auto mr = modified_rates(ev, 7);
    REQUIRE(mr.size() == 2);
    CHECK(mr[0].axis == 0);
    CHECK(std::abs(100.0 * mr[0].rate - 88.7) < 0.5);
    CHECK(std::abs(100.0 * mr[1].rate - 11.1) < 0.5);
    const double q = 7.0;
    CHECK(mr[0].modified == doctest::Approx((q / (q - 1)) * (q / (q - 1)) * (0.536 - 1 / q) * (0.536 - 1 / q)));
  }
  SUBCASE("nothing above the average eigenvalue") {
    const std::vector<double> ev{1.0 / 7, 1.0 / 7, 1.0 / 7};
    CHECK(modified_rates(ev, 7).empty());
  }
  SUBCASE("Q=2 keeps one axis") {
    const std::vector<double> ev{0.75, 0.25};
    const auto mr = modified_rates(ev, 2);
    REQUIRE(mr.size() == 1);
    CHECK(mr[0].rate == 1.0);
    CHECK(mr[0].modified == doctest::Approx(0.25));
  }
  SUBCASE("rates sum to one and skip low axes") {
    const std::vector<double> ev{0.6, 0.3, 0.2, 0.1, 0.05};
    const auto mr = modified_rates(ev, 5);
    REQUIRE(mr.size() == 2);
    CHECK(mr[0].rate + mr[1].rate == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mr[1].axis == 1);
  }
  SUBCASE("Q < 2") {
    const std::vector<double> ev{0.5};
    CHECK_ERROR_CODE(modified_rates(ev, 1), ErrorCode::QTooSmall);
  }
}

TEST_CASE("cos2 on the origin point is signalled") {
  // Middle row profile equals the column margin.
  const auto m = fit_ca(ContingencyTable::from_counts((MatrixXd(3, 2) << 2, 0, 1, 1, 0, 2).finished()));
  CHECK(std::isnan(m.rows.cos2(1, 0)));
  CHECK_ERROR_CODE(cos2(m, {Cloud::Row, 1}, 0), ErrorCode::OriginPoint);
  CHECK_ERROR_CODE(cos2(m, {Cloud::Row, 0}, 5), ErrorCode::BadAxis);
  CHECK(cos2(m, {Cloud::Row, 0}, 0) == doctest::Approx(1.0));
}

TEST_CASE("supplementary projection") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    const MatrixXd n = random_shape_table(rng);
    const auto m = fit_ca(ContingencyTable::from_counts(n));
    if (m.axes() == 0) continue;
    for (Index i = 0; i < n.rows(); ++i) {
      const auto p = project_supplementary_row(m, row(n, i));
      CHECK((p.coords - m.rows.coords.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(std::abs(p.dist2 - m.rows.dist2(i)) < 1e-10);
    }
    for (Index j = 0; j < n.cols(); ++j) {
      const auto p = project_supplementary_col(m, column(n, j));
      CHECK((p.coords - m.cols.coords.row(j).transpose()).cwiseAbs().maxCoeff() < 1e-10);
    }
    const std::vector<double> avg_row(m.cols.masses.data(), m.cols.masses.data() + m.cols.masses.size());
    CHECK(project_supplementary_row(m, avg_row).coords.cwiseAbs().maxCoeff() < 1e-10);
    const std::vector<double> avg_col(m.rows.masses.data(), m.rows.masses.data() + m.rows.masses.size());
    CHECK(project_supplementary_col(m, avg_col).coords.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("supplementary cos2 in a rank-2 model matches the direct profile distance") {
  std::mt19937_64 rng(5);
  const MatrixXd n = oracle::random_table(rng, 6, 5, 1, 9);
  const auto m = fit_ca(ContingencyTable::from_counts(n), 2);
  REQUIRE(m.axes() == 2);
  REQUIRE(m.rank() == 4);
  const std::vector<double> extra{3, 0, 7, 1, 2};
  const auto p = project_supplementary_row(m, extra);

  const VectorXd c = n.colwise().sum().transpose() / n.sum();
  double d2 = 0.0;
  for (Index j = 0; j < 5; ++j) d2 += std::pow(extra[static_cast<std::size_t>(j)] / 13.0 - c(j), 2) / c(j);
  CHECK(p.dist2 == doctest::Approx(d2).epsilon(1e-12));
  for (Index l = 0; l < 2; ++l) CHECK(std::abs(p.cos2(l) - p.coords(l) * p.coords(l) / d2) < 1e-12);
  CHECK(p.cos2.sum() < 1.0);

  // Same value through the full-rank model's coordinates.
  const auto full = fit_ca(ContingencyTable::from_counts(n));
  CHECK(std::abs(project_supplementary_row(full, extra).coords.squaredNorm() - d2) < 1e-10);
}

TEST_CASE("supplementary rows and columns attached by fit_ca") {
  MatrixXd n(4, 3);
  n << 5, 1, 2, 1, 6, 2, 3, 3, 3, 0, 0, 0;
  auto t = ContingencyTable::from_counts(n);
  t.row_roles[2] = Role::Supplementary;
  t.row_roles[3] = Role::Supplementary;  // zero total: skipped
  t.col_roles[2] = Role::Supplementary;
  const auto m = fit_ca(t);
  CHECK(m.rows.size() == 2);
  CHECK(m.cols.size() == 2);
  REQUIRE(m.sup_rows.size() == 1);
  CHECK(m.sup_rows[0].label == "r3");
  REQUIRE(m.sup_cols.size() == 1);
  CHECK(m.sup_cols[0].label == "c3");
  CHECK(m.sup_rows[0].weight == 6.0);
  CHECK_ERROR_CODE(project_supplementary_row(m, std::vector<double>{1, 2, 3}), ErrorCode::DimensionMismatch);
  CHECK_ERROR_CODE(project_supplementary_row(m, std::vector<double>{0, 0}), ErrorCode::ZeroProfile);
  CHECK_ERROR_CODE(project_supplementary_row(m, std::vector<double>{-1, 2}), ErrorCode::NegativeEntry);
}

TEST_CASE("category_centroid") {
  std::mt19937_64 rng(123);
  for (int rep = 0; rep < 50; ++rep) {
    const MatrixXd n = oracle::random_table(rng, 7, 5);
    const auto m = fit_ca(ContingencyTable::from_counts(n));

    const std::vector<std::size_t> one{3};
    CHECK((category_centroid(m, one).coords - m.rows.coords.row(3).transpose()).cwiseAbs().maxCoeff() < 1e-12);

    std::vector<std::size_t> all(7);
    std::iota(all.begin(), all.end(), 0);
    CHECK(category_centroid(m, all).coords.cwiseAbs().maxCoeff() < 1e-10);

    std::vector<std::size_t> part;
    std::vector<double> summed(5, 0.0);
    for (std::size_t i = 0; i < 7; ++i) {
      if (std::bernoulli_distribution(0.5)(rng)) {
        part.push_back(i);
        for (Index j = 0; j < 5; ++j) summed[static_cast<std::size_t>(j)] += n(static_cast<Index>(i), j);
      }
    }
    if (part.empty()) continue;
    const auto c = category_centroid(m, part);
    const auto p = project_supplementary_row(m, summed);
    CHECK((c.coords - p.coords).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(c.dist2 - p.dist2) < 1e-10);
  }
  const auto m = fit_ca(ContingencyTable::from_counts((MatrixXd(2, 2) << 1, 3, 3, 1).finished()));
  CHECK_ERROR_CODE(category_centroid(m, std::vector<std::size_t>{}), ErrorCode::EmptySet);
  CHECK_ERROR_CODE(category_centroid(m, std::vector<std::size_t>{2}), ErrorCode::SupplementaryPoint);
}

TEST_CASE("MCA") {
  SUBCASE("two independent binary questions") {
    const auto schema = testing::schema_from("[question.a]\nmodalities = y|n\n[question.b]\nmodalities = y|n\n");
    const auto ind = build_indicator(testing::table_from(schema, "id,a,b\n1,y,y\n2,y,n\n3,n,y\n4,n,n\n"));
    const auto m = fit_mca(ind);
    REQUIRE(m.rank() == 2);
    CHECK(std::abs(m.eigenvalues(0) - 0.5) < 1e-10);
    CHECK(std::abs(m.eigenvalues(1) - 0.5) < 1e-10);
    CHECK(std::abs(m.total_inertia - 1.0) < 1e-10);
    CHECK(m.kind == AnalysisKind::MCA);
    CHECK(m.q_active == 2);
    const auto o = oracle::correspondence_analysis(ind.data);
    CHECK((m.eigenvalues - o.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("complete data: constant masses, inertia J/Q - 1") {
    const auto schema = load_schema(testing::fixture("activities/schema.ini"));
    const auto ind = build_indicator(ingest_csv(testing::fixture("activities/survey.csv"), schema));
    const auto m = fit_mca(ind);
    const double n = static_cast<double>(ind.data.rows());
    CHECK((m.rows.masses.array() - 1.0 / n).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(m.total_inertia - (25.0 / 7.0 - 1.0)) < 1e-10);
    CHECK(m.cols.size() == 25);
    CHECK(m.sup_cols.size() == 6);
  }
  SUBCASE("demoted modalities are projected, not fitted") {
    const auto schema = load_schema(testing::fixture("activities/schema.ini"));
    const auto ind = build_indicator(ingest_csv(testing::fixture("activities/survey.csv"), schema));
    const auto d = demote_sparse(ind, 16);
    const auto m = fit_mca(d.matrix);
    CHECK(m.cols.size() == 21);
    CHECK(m.sup_cols.size() == 10);
    CHECK(m.sup_cols[0].label == "cinema_dont know");
    for (Index l = 0; l < static_cast<Index>(m.axes()); ++l) CHECK(std::abs(m.cols.contrib.col(l).sum() - 1.0) < 1e-10);
  }
  SUBCASE("empty active block") {
    const auto schema = testing::schema_from("[question.a]\nmodalities = y|n\nrole = supplementary\n");
    const auto ind = build_indicator(testing::table_from(schema, "id,a\n1,y\n2,n\n"));
    CHECK_ERROR_CODE(fit_mca(ind), ErrorCode::EmptyActiveBlock);
  }
}

TEST_CASE("standardized PCA") {
  SUBCASE("perfectly correlated columns") {
    MatrixXd x(5, 2);
    x << 1, 3, 2, 5, 3, 7, 4, 9, 10, 21;
    const auto m = fit_pca_standardized(x);
    REQUIRE(m.rank() == 1);
    CHECK(m.eigenvalues(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.rates()(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.kind == AnalysisKind::PCA);
    CHECK((m.rows.masses.array() == 0.2).all());
  }
  SUBCASE("orthogonal standardized columns") {
    MatrixXd x(4, 3);
    x << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
    const auto m = fit_pca_standardized(x);
    REQUIRE(m.rank() == 3);
    CHECK((m.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(m.total_inertia == doctest::Approx(3.0));
  }
  SUBCASE("gait fixture matches the correlation eigendecomposition") {
    const auto doc = read_csv(testing::fixture("gait/measurements.csv"));
    MatrixXd x(45, 6);
    Index r = 0;
    for (const auto& line : doc.rows) {
      if (line[1] != "healthy") continue;
      for (Index k = 0; k < 6; ++k) x(r, k) = std::stod(line[static_cast<std::size_t>(3 + k)]);
      ++r;
    }
    REQUIRE(r == 45);
    const auto m = fit_pca_standardized(x);
    const VectorXd ev = oracle::correlation_eigenvalues(x);
    CHECK((m.eigenvalues - ev).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((m.rates() - ev / 6.0).cwiseAbs().maxCoeff() < 1e-10);

    // Variable coordinates are correlations with the row coordinates.
    for (Index l = 0; l < 2; ++l) {
      for (Index k = 0; k < 6; ++k) {
        const VectorXd a = x.col(k).array() - x.col(k).mean();
        const VectorXd b = m.rows.coords.col(l);
        const double corr = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
        CHECK(std::abs(m.cols.coords(k, l) - corr) < 1e-10);
      }
      CHECK(std::abs(m.rows.contrib.col(l).sum() - 1.0) < 1e-10);
      CHECK(std::abs(m.cols.contrib.col(l).sum() - 1.0) < 1e-10);
    }

    // Supplementary individual at the mean lands at the origin; an active
    // individual re-projects onto itself.
    const VectorXd mean = x.colwise().mean().transpose();
    const std::vector<double> at_mean(mean.data(), mean.data() + 6);
    CHECK(project_supplementary_row(m, at_mean).coords.cwiseAbs().maxCoeff() < 1e-10);
    const auto self = project_supplementary_row(m, row(x, 4));
    CHECK((self.coords - m.rows.coords.row(4).transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(chi2_distance(m, 0, 1) - (m.rows.coords.row(0) - m.rows.coords.row(1)).squaredNorm()) < 1e-10);

    // An active variable re-projected as supplementary gives its own coordinates.
    const auto var = project_supplementary_col(m, column(x, 2));
    CHECK((var.coords - m.cols.coords.row(2).transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("constant column") {
    MatrixXd x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    CHECK_ERROR_CODE(fit_pca_standardized(x), ErrorCode::ConstantColumn);
  }
}
