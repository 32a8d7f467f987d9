#pragma once

// Random data matrices for the p >> n regime.
//
// Entries of the p x n matrix are generated row by row (variable by
// variable) from one engine per (seed, stream) pair, so a matrix can either
// be materialized or streamed through a row-block generator and both routes
// see the same draws in the same order.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace lssclt {

using Index = Eigen::Index;

/// Row-major block of consecutive variables, used for streaming.
using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 64-bit engine used for every random draw in the library.
using Engine = std::mt19937_64;

/// Independent engine for stream `stream` of `seed`. Monte Carlo replication r
/// uses stream r, so results do not depend on scheduling.
Engine make_engine(std::uint64_t seed, std::uint64_t stream);

enum class DistributionKind {
  StandardNormal,
  CenteredExp1,
  CenteredT6,
  StandardizedGamma,
  Rademacher,
};

/// Standardized (mean 0, variance 1) entry law with its exact fourth moment.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::StandardNormal;
  double shape = 0.0;  // StandardizedGamma only
  double scale = 0.0;  // StandardizedGamma only

  static DistributionSpec normal() { return {DistributionKind::StandardNormal}; }
  static DistributionSpec exp1() { return {DistributionKind::CenteredExp1}; }
  static DistributionSpec t6() { return {DistributionKind::CenteredT6}; }
  static DistributionSpec rademacher() { return {DistributionKind::Rademacher}; }
  static DistributionSpec gamma(double shape, double scale);

  /// E X^4 of the standardized law.
  double nu4() const;
  std::string label() const;
};

/// Accepts normal, exp, t6, rademacher (alias bernoulli) and gamma:k,theta.
DistributionSpec parse_distribution(std::string_view text);

enum class CovarianceKind { Identity, DiagonalSpike, BandedTridiagonal };

/// Population covariance design Sigma.
struct CovarianceSpec {
  CovarianceKind kind = CovarianceKind::Identity;
  double nu = 0.0;  // DiagonalSpike: fraction of variances equal to 2
  double v1 = 0.0;  // BandedTridiagonal: off-diagonal value
  double v2 = 0.0;  // BandedTridiagonal: fraction of the leading block

  static CovarianceSpec identity() { return {}; }
  static CovarianceSpec diagonal_spike(double nu);
  static CovarianceSpec banded(double v1, double v2);

  bool is_identity() const { return kind == CovarianceKind::Identity; }
  /// Size of the perturbed leading block at dimension p, i.e. floor(frac * p).
  Index block_size(Index p) const;
  std::string label() const;
};

/// Accepts identity, diag:nu and banded:v1,v2.
CovarianceSpec parse_covariance(std::string_view text);

/// Dense Sigma; meant for small p.
Eigen::MatrixXd covariance_matrix(const CovarianceSpec& spec, Index p);

/// Lower-triangular L with L L^T = Sigma. Every supported design factors into
/// a lower bidiagonal matrix, stored as its diagonal and subdiagonal.
struct CovarianceFactor {
  Eigen::VectorXd diag;  // L(i, i)
  Eigen::VectorXd sub;   // L(i + 1, i), length p - 1
  bool diagonal_only = true;

  Index size() const { return diag.size(); }
  Eigen::MatrixXd dense() const;
};

CovarianceFactor covariance_factor(const CovarianceSpec& spec, Index p);

/// p x n matrix, rows are variables and columns are observations.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::uint64_t seed = 0;

  Index p() const { return values.rows(); }
  Index n() const { return values.cols(); }
};
using RawMatrix = DataMatrix;

/// Draws every entry i.i.d. from `dist`, row by row, from make_engine(seed, stream).
RawMatrix sample_matrix(const DistributionSpec& dist, Index p, Index n, std::uint64_t seed,
                        std::uint64_t stream = 0);

/// Columns become Gamma * s_j with Gamma the Cholesky factor of `spec`.
DataMatrix apply_covariance(const RawMatrix& raw, const CovarianceSpec& spec);
DataMatrix apply_covariance(const RawMatrix& raw, const CovarianceFactor& factor);

enum class StandardizeMode { None, PerVariable, Global };

StandardizeMode parse_standardize_mode(std::string_view text);
std::string to_string(StandardizeMode mode);

/// Per-variable: every row gets sample mean 0 and sample variance 1 (n - 1
/// denominator). Global: the same for the pooled entries.
DataMatrix standardize(const DataMatrix& data, StandardizeMode mode);

/// Draws into a contiguous buffer; the switch on the law happens once per call.
class EntrySampler {
 public:
  explicit EntrySampler(const DistributionSpec& dist);
  void fill(Engine& engine, double* out, Index count) const;

 private:
  DistributionSpec dist_;
};

/// Streams the rows of Y = Gamma X in blocks without holding the p x n matrix.
class RowBlockGenerator {
 public:
  RowBlockGenerator(const DistributionSpec& dist, std::optional<CovarianceFactor> factor, Index p,
                    Index n, Engine engine);

  /// Writes the next rows into `block` (at most block.rows()); returns how many.
  Index next(RowBlock& block);
  bool done() const { return row_ == p_; }
  Index p() const { return p_; }
  Index n() const { return n_; }

 private:
  EntrySampler sampler_;
  std::optional<CovarianceFactor> factor_;
  Index p_;
  Index n_;
  Index row_ = 0;
  Engine engine_;
  Eigen::VectorXd current_;
  Eigen::VectorXd previous_;
};

}  // namespace lssclt
