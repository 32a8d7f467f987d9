#include <doctest.h>

#include <cmath>
#include <set>

#include "lssclt/data_gen.hpp"
#include "lssclt/errors.hpp"

using namespace lssclt;

namespace {

struct Moments {
  double mean = 0, var = 0, m4 = 0, m8 = 0;
};

Moments moments(const DistributionSpec& d, Index count, std::uint64_t seed) {
  Engine eng = make_engine(seed, 0);
  std::vector<double> buf(static_cast<std::size_t>(count));
  EntrySampler(d).fill(eng, buf.data(), count);
  Moments m;
  for (double v : buf) {
    m.mean += v;
    m.var += v * v;
    m.m4 += v * v * v * v;
    m.m8 += v * v * v * v * v * v * v * v;
  }
  m.mean /= count;
  m.var = m.var / count - m.mean * m.mean;
  m.m4 /= count;
  m.m8 /= count;
  return m;
}

}  // namespace

TEST_CASE("fourth moments of the entry laws") {
  CHECK(DistributionSpec::normal().nu4() == 3.0);
  CHECK(DistributionSpec::exp1().nu4() == 9.0);
  CHECK(DistributionSpec::t6().nu4() == 6.0);
  CHECK(DistributionSpec::rademacher().nu4() == 1.0);
  CHECK(DistributionSpec::gamma(4.0, 0.5).nu4() == doctest::Approx(4.5).epsilon(1e-15));
  CHECK_THROWS_AS(DistributionSpec::gamma(0.0, 1.0), InvalidArgument);
}

TEST_CASE("parse_distribution") {
  CHECK(parse_distribution("normal").kind == DistributionKind::StandardNormal);
  CHECK(parse_distribution("bernoulli").kind == DistributionKind::Rademacher);
  const auto g = parse_distribution("gamma:4,0.5");
  CHECK(g.kind == DistributionKind::StandardizedGamma);
  CHECK(g.shape == 4.0);
  CHECK(g.scale == 0.5);
  CHECK_THROWS_AS(parse_distribution("cauchy"), ParseError);
  CHECK_THROWS_AS(parse_distribution("gamma:4"), ParseError);
}

TEST_CASE("sample_matrix") {
  SUBCASE("rademacher support") {
    const auto m = sample_matrix(DistributionSpec::rademacher(), 4, 2, 17);
    CHECK(m.p() == 4);
    CHECK(m.n() == 2);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 2; ++j) CHECK(std::abs(m.values(i, j)) == 1.0);
  }
  SUBCASE("zero dimensions") {
    CHECK_THROWS_AS(sample_matrix(DistributionSpec::normal(), 0, 3, 1), InvalidDimension);
    CHECK_THROWS_AS(sample_matrix(DistributionSpec::normal(), 3, 0, 1), InvalidDimension);
  }
  SUBCASE("deterministic and seed dependent") {
    const auto a = sample_matrix(DistributionSpec::t6(), 50, 7, 3);
    const auto b = sample_matrix(DistributionSpec::t6(), 50, 7, 3);
    const auto c = sample_matrix(DistributionSpec::t6(), 50, 7, 4);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(sample_matrix(DistributionSpec::t6(), 50, 7, 3, 1).values != a.values);
  }
}

TEST_CASE("centered exp(1) moments from 1e6 draws") {
  const auto m = moments(DistributionSpec::exp1(), 1000000, 2024);
  CHECK(std::abs(m.mean) <= 5e-3);
  CHECK(std::abs(m.m4 - 9.0) <= 0.3);
}

TEST_CASE("every law matches (0, 1, nu4) within 3 standard errors") {
  const Index count = 1000000;
  for (const auto& d : {DistributionSpec::normal(), DistributionSpec::exp1(), DistributionSpec::t6(),
                        DistributionSpec::rademacher(), DistributionSpec::gamma(4.0, 0.5)}) {
    CAPTURE(d.label());
    const auto m = moments(d, count, 99);
    const double nu4 = d.nu4();
    CHECK(std::abs(m.mean) <= 3.0 * std::sqrt(1.0 / count));
    // Centering costs mean^2, at most 9 / count given the check above.
    CHECK(std::abs(m.var - 1.0) <= 3.0 * std::sqrt((nu4 - 1.0) / count) + 9.0 / count);
    if (d.kind == DistributionKind::CenteredT6) {
      // E X^8 is infinite for t(6), so the standard error is not defined.
      CHECK(std::abs(m.m4 - nu4) <= 0.5);
    } else {
      CHECK(std::abs(m.m4 - nu4) <= 3.0 * std::sqrt((m.m8 - m.m4 * m.m4) / count) + 1e-12);
    }
  }
}

TEST_CASE("covariance_factor") {
  SUBCASE("identity") {
    const auto f = covariance_factor(CovarianceSpec::identity(), 5);
    CHECK(f.diagonal_only);
    CHECK(f.dense().isApprox(Eigen::MatrixXd::Identity(5, 5)));
  }
  SUBCASE("diagonal spike") {
    const auto f = covariance_factor(CovarianceSpec::diagonal_spike(0.5), 4);
    CHECK(f.diagonal_only);
    CHECK(f.diag(0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(f.diag(1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(f.diag(2) == 1.0);
    CHECK(f.diag(3) == 1.0);
  }
  SUBCASE("banded 3x3") {
    const auto l = covariance_factor(CovarianceSpec::banded(0.5, 1.0), 3).dense();
    const Eigen::MatrixXd s = l * l.transpose();
    for (int i = 0; i < 3; ++i) CHECK(s(i, i) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s(1, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(s(0, 2)) <= 1e-15);
  }
  SUBCASE("not positive definite") {
    CHECK_THROWS_AS(covariance_factor(CovarianceSpec::banded(0.9, 1.0), 50), FactorizationError);
  }
  SUBCASE("L L^T reproduces Sigma up to p = 1000") {
    for (const auto& spec : {CovarianceSpec::identity(), CovarianceSpec::diagonal_spike(0.08),
                             CovarianceSpec::diagonal_spike(0.25), CovarianceSpec::banded(0.5, 0.8),
                             CovarianceSpec::banded(0.5, 0.4), CovarianceSpec::banded(-0.3, 0.6)}) {
      for (Index p : {Index{1}, Index{7}, Index{100}, Index{1000}}) {
        CAPTURE(spec.label());
        CAPTURE(p);
        const Eigen::MatrixXd l = covariance_factor(spec, p).dense();
        const Eigen::MatrixXd s = covariance_matrix(spec, p);
        CHECK((l * l.transpose() - s).cwiseAbs().maxCoeff() <= 1e-12 * s.cwiseAbs().maxCoeff());
        CHECK(l.isLowerTriangular());
      }
    }
  }
}

TEST_CASE("block sizes use the floor") {
  CHECK(CovarianceSpec::diagonal_spike(0.08).block_size(600) == 48);
  CHECK(CovarianceSpec::diagonal_spike(0.25).block_size(3) == 0);
  CHECK(CovarianceSpec::banded(0.5, 0.4).block_size(1500) == 600);
  CHECK_THROWS_AS(CovarianceSpec::diagonal_spike(1.5), InvalidArgument);
}

TEST_CASE("parse_covariance") {
  CHECK(parse_covariance("identity").is_identity());
  const auto d = parse_covariance("diag:0.25");
  CHECK(d.kind == CovarianceKind::DiagonalSpike);
  CHECK(d.nu == 0.25);
  const auto b = parse_covariance("banded:0.5,0.8");
  CHECK(b.kind == CovarianceKind::BandedTridiagonal);
  CHECK(b.v1 == 0.5);
  CHECK(b.v2 == 0.8);
  CHECK_THROWS_AS(parse_covariance("toeplitz:0.3"), ParseError);
}

TEST_CASE("apply_covariance") {
  const auto raw = sample_matrix(DistributionSpec::normal(), 2, 5, 8);
  SUBCASE("identity is a no-op") {
    CHECK(apply_covariance(raw, CovarianceSpec::identity()).values == raw.values);
  }
  SUBCASE("diagonal spike scales the first row") {
    const auto y = apply_covariance(raw, CovarianceSpec::diagonal_spike(0.5));
    CHECK(y.values.row(0).isApprox(std::sqrt(2.0) * raw.values.row(0)));
    CHECK(y.values.row(1) == raw.values.row(1));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(apply_covariance(raw, covariance_factor(CovarianceSpec::identity(), 3)), InvalidDimension);
  }
  SUBCASE("sample covariance of 1e5 columns") {
    const auto spec = CovarianceSpec::banded(0.4, 0.75);
    const auto y = apply_covariance(sample_matrix(DistributionSpec::normal(), 4, 100000, 5), spec);
    const Eigen::MatrixXd s = y.values * y.values.transpose() / 100000.0;
    CHECK((s - covariance_matrix(spec, 4)).cwiseAbs().maxCoeff() <= 0.05);
  }
}

TEST_CASE("streamed rows equal the materialized matrix") {
  const auto dist = DistributionSpec::exp1();
  for (const auto& spec : {CovarianceSpec::identity(), CovarianceSpec::diagonal_spike(0.3),
                           CovarianceSpec::banded(0.45, 0.7)}) {
    const Index p = 700, n = 9;
    const auto full = apply_covariance(sample_matrix(dist, p, n, 12, 3), spec);
    std::optional<CovarianceFactor> factor;
    if (!spec.is_identity()) factor = covariance_factor(spec, p);
    RowBlockGenerator gen(dist, factor, p, n, make_engine(12, 3));
    RowBlock block(256, n);
    Index row = 0;
    while (!gen.done()) {
      const Index got = gen.next(block);
      CHECK((block.topRows(got) - full.values.middleRows(row, got)).cwiseAbs().maxCoeff() <= 1e-13);
      row += got;
    }
    CHECK(row == p);
  }
}

TEST_CASE("standardize") {
  DataMatrix d;
  d.values = Eigen::MatrixXd(2, 2);
  d.values << 0.0, 2.0, 1.0, 5.0;
  SUBCASE("none leaves data alone") { CHECK(standardize(d, StandardizeMode::None).values == d.values); }
  SUBCASE("row (0, 2) per variable") {
    const auto s = standardize(d, StandardizeMode::PerVariable);
    CHECK(s.values(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(s.values(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    const double mean = s.values.row(0).mean();
    const double var = (s.values.row(0).array() - mean).square().sum() / 1.0;
    CHECK(std::abs(mean) <= 1e-15);
    CHECK(var == doctest::Approx(1.0));
  }
  SUBCASE("global") {
    const auto s = standardize(d, StandardizeMode::Global);
    const double mean = s.values.mean();
    const double var = (s.values.array() - mean).square().sum() / 3.0;
    CHECK(std::abs(mean) <= 1e-15);
    CHECK(var == doctest::Approx(1.0));
  }
  SUBCASE("constant row") {
    d.values.row(1).setConstant(3.0);
    CHECK_THROWS_AS(standardize(d, StandardizeMode::PerVariable), DegenerateVariable);
  }
  SUBCASE("single observation") {
    DataMatrix one;
    one.values = Eigen::MatrixXd::Ones(3, 1);
    CHECK_THROWS_AS(standardize(one, StandardizeMode::PerVariable), InvalidDimension);
  }
  CHECK(parse_standardize_mode("per-variable") == StandardizeMode::PerVariable);
  CHECK(to_string(StandardizeMode::Global) == "global");
  CHECK_THROWS_AS(parse_standardize_mode("zscore"), ParseError);
}
