#include "lssclt/data_gen.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

#include "lssclt/errors.hpp"
#include "parse_util.hpp"

namespace lssclt {

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6c73u};
  return Engine(seq);
}

// ---------------------------------------------------------------------------
// Distributions

DistributionSpec DistributionSpec::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw InvalidArgument("gamma shape and scale must be positive");
  }
  return {DistributionKind::StandardizedGamma, shape, scale};
}

double DistributionSpec::nu4() const {
  switch (kind) {
    case DistributionKind::StandardNormal: return 3.0;
    case DistributionKind::CenteredExp1: return 9.0;
    case DistributionKind::CenteredT6: return 6.0;
    case DistributionKind::StandardizedGamma: return 3.0 + 6.0 / shape;
    case DistributionKind::Rademacher: return 1.0;
  }
  return 0.0;
}

std::string DistributionSpec::label() const {
  switch (kind) {
    case DistributionKind::StandardNormal: return "normal";
    case DistributionKind::CenteredExp1: return "exp";
    case DistributionKind::CenteredT6: return "t6";
    case DistributionKind::Rademacher: return "rademacher";
    case DistributionKind::StandardizedGamma: {
      std::ostringstream os;
      os << "gamma:" << shape << ',' << scale;
      return os.str();
    }
  }
  return "?";
}

DistributionSpec parse_distribution(std::string_view text) {
  auto [name, args] = detail::split_head(text);
  if (name == "normal" || name == "gaussian") return DistributionSpec::normal();
  if (name == "exp") return DistributionSpec::exp1();
  if (name == "t6") return DistributionSpec::t6();
  if (name == "rademacher" || name == "bernoulli") return DistributionSpec::rademacher();
  if (name == "gamma") {
    auto values = detail::parse_doubles(args);
    if (values.size() != 2) throw ParseError("gamma expects gamma:shape,scale");
    return DistributionSpec::gamma(values[0], values[1]);
  }
  throw ParseError("unknown distribution '" + std::string(text) +
                   "' (normal, exp, t6, rademacher, gamma:k,theta)");
}

EntrySampler::EntrySampler(const DistributionSpec& dist) : dist_(dist) {}

void EntrySampler::fill(Engine& engine, double* out, Index count) const {
  switch (dist_.kind) {
    case DistributionKind::StandardNormal: {
      boost::random::normal_distribution<double> normal;
      for (Index i = 0; i < count; ++i) out[i] = normal(engine);
      break;
    }
    case DistributionKind::CenteredExp1: {
      boost::random::exponential_distribution<double> expo(1.0);
      for (Index i = 0; i < count; ++i) out[i] = expo(engine) - 1.0;
      break;
    }
    case DistributionKind::CenteredT6: {
      // Var t(6) = 6/4, so dividing by sqrt(1.5) leaves E X^4 = 6.
      boost::random::student_t_distribution<double> student(6.0);
      const double inv_sd = 1.0 / std::sqrt(1.5);
      for (Index i = 0; i < count; ++i) out[i] = student(engine) * inv_sd;
      break;
    }
    case DistributionKind::StandardizedGamma: {
      boost::random::gamma_distribution<double> gam(dist_.shape, dist_.scale);
      const double mean = dist_.shape * dist_.scale;
      const double inv_sd = 1.0 / (std::sqrt(dist_.shape) * dist_.scale);
      for (Index i = 0; i < count; ++i) out[i] = (gam(engine) - mean) * inv_sd;
      break;
    }
    case DistributionKind::Rademacher: {
      Index i = 0;
      while (i < count) {
        std::uint64_t bits = engine();
        for (int b = 0; b < 64 && i < count; ++b, ++i, bits >>= 1) {
          out[i] = (bits & 1u) ? 1.0 : -1.0;
        }
      }
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Covariance designs

CovarianceSpec CovarianceSpec::diagonal_spike(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw InvalidArgument("diagonal spike fraction must lie in (0,1)");
  CovarianceSpec spec;
  spec.kind = CovarianceKind::DiagonalSpike;
  spec.nu = nu;
  return spec;
}

CovarianceSpec CovarianceSpec::banded(double v1, double v2) {
  if (!std::isfinite(v1)) throw InvalidArgument("banded off-diagonal must be finite");
  if (!(v2 > 0.0 && v2 <= 1.0)) throw InvalidArgument("banded block fraction must lie in (0,1]");
  CovarianceSpec spec;
  spec.kind = CovarianceKind::BandedTridiagonal;
  spec.v1 = v1;
  spec.v2 = v2;
  return spec;
}

Index CovarianceSpec::block_size(Index p) const {
  // The small slack keeps products like 0.08 * 600 from flooring to 47.
  auto count = [p](double frac) {
    return static_cast<Index>(std::floor(frac * static_cast<double>(p) + 1e-9));
  };
  switch (kind) {
    case CovarianceKind::Identity: return 0;
    case CovarianceKind::DiagonalSpike: return count(nu);
    case CovarianceKind::BandedTridiagonal: return count(v2);
  }
  return 0;
}

std::string CovarianceSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case CovarianceKind::Identity: os << "identity"; break;
    case CovarianceKind::DiagonalSpike: os << "diag:" << nu; break;
    case CovarianceKind::BandedTridiagonal: os << "banded:" << v1 << ',' << v2; break;
  }
  return os.str();
}

CovarianceSpec parse_covariance(std::string_view text) {
  auto [name, args] = detail::split_head(text);
  if (name == "identity") return CovarianceSpec::identity();
  auto values = detail::parse_doubles(args);
  if (name == "diag") {
    if (values.size() != 1) throw ParseError("diag expects diag:nu");
    return CovarianceSpec::diagonal_spike(values[0]);
  }
  if (name == "banded") {
    if (values.size() != 2) throw ParseError("banded expects banded:v1,v2");
    return CovarianceSpec::banded(values[0], values[1]);
  }
  throw ParseError("unknown covariance '" + std::string(text) +
                   "' (identity, diag:nu, banded:v1,v2)");
}

Eigen::MatrixXd covariance_matrix(const CovarianceSpec& spec, Index p) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(p, p);
  const Index m = spec.block_size(p);
  if (spec.kind == CovarianceKind::DiagonalSpike) {
    for (Index i = 0; i < m; ++i) sigma(i, i) = 2.0;
  } else if (spec.kind == CovarianceKind::BandedTridiagonal) {
    for (Index i = 0; i + 1 < m; ++i) {
      sigma(i, i + 1) = spec.v1;
      sigma(i + 1, i) = spec.v1;
    }
  }
  return sigma;
}

Eigen::MatrixXd CovarianceFactor::dense() const {
  const Index p = size();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, p);
  for (Index i = 0; i < p; ++i) l(i, i) = diag(i);
  for (Index i = 0; i + 1 < p; ++i) l(i + 1, i) = sub(i);
  return l;
}

CovarianceFactor covariance_factor(const CovarianceSpec& spec, Index p) {
  if (p < 1) throw InvalidDimension("covariance factor needs p >= 1");
  CovarianceFactor factor;
  factor.diag = Eigen::VectorXd::Ones(p);
  factor.sub = Eigen::VectorXd::Zero(p - 1);
  const Index m = spec.block_size(p);
  switch (spec.kind) {
    case CovarianceKind::Identity: break;
    case CovarianceKind::DiagonalSpike:
      factor.diag.head(m).setConstant(std::sqrt(2.0));
      break;
    case CovarianceKind::BandedTridiagonal: {
      // Cholesky of a tridiagonal matrix is lower bidiagonal.
      factor.diagonal_only = (m < 2 || spec.v1 == 0.0);
      for (Index i = 1; i < m; ++i) {
        const double l = spec.v1 / factor.diag(i - 1);
        const double pivot = 1.0 - l * l;
        if (!(pivot > 0.0)) {
          std::ostringstream os;
          os << "covariance " << spec.label() << " is not positive definite at p=" << p
             << " (pivot " << pivot << " at row " << i << ")";
          throw FactorizationError(os.str());
        }
        factor.sub(i - 1) = l;
        factor.diag(i) = std::sqrt(pivot);
      }
      break;
    }
  }
  return factor;
}

// ---------------------------------------------------------------------------
// Matrices

RawMatrix sample_matrix(const DistributionSpec& dist, Index p, Index n, std::uint64_t seed,
                        std::uint64_t stream) {
  if (p < 1 || n < 1) throw InvalidDimension("sample_matrix needs p >= 1 and n >= 1");
  RowBlockGenerator gen(dist, std::nullopt, p, n, make_engine(seed, stream));
  RawMatrix raw;
  raw.seed = seed;
  raw.values.resize(p, n);
  RowBlock block(256, n);
  Index row = 0;
  while (!gen.done()) {
    const Index rows = gen.next(block);
    raw.values.middleRows(row, rows) = block.topRows(rows);
    row += rows;
  }
  return raw;
}

DataMatrix apply_covariance(const RawMatrix& raw, const CovarianceSpec& spec) {
  if (spec.is_identity()) return raw;
  return apply_covariance(raw, covariance_factor(spec, raw.p()));
}

DataMatrix apply_covariance(const RawMatrix& raw, const CovarianceFactor& factor) {
  if (factor.size() != raw.p()) {
    throw InvalidDimension("covariance factor is " + std::to_string(factor.size()) +
                           "-dimensional but data has p=" + std::to_string(raw.p()));
  }
  DataMatrix out;
  out.seed = raw.seed;
  out.values.resize(raw.p(), raw.n());
  for (Index i = 0; i < raw.p(); ++i) {
    if (i == 0 || factor.sub(i - 1) == 0.0) {
      out.values.row(i) = factor.diag(i) * raw.values.row(i);
    } else {
      out.values.row(i) = factor.diag(i) * raw.values.row(i) + factor.sub(i - 1) * raw.values.row(i - 1);
    }
  }
  return out;
}

StandardizeMode parse_standardize_mode(std::string_view text) {
  if (text == "none") return StandardizeMode::None;
  if (text == "per-variable") return StandardizeMode::PerVariable;
  if (text == "global") return StandardizeMode::Global;
  throw ParseError("unknown standardize mode '" + std::string(text) +
                   "' (none, per-variable, global)");
}

std::string to_string(StandardizeMode mode) {
  switch (mode) {
    case StandardizeMode::None: return "none";
    case StandardizeMode::PerVariable: return "per-variable";
    case StandardizeMode::Global: return "global";
  }
  return "?";
}

DataMatrix standardize(const DataMatrix& data, StandardizeMode mode) {
  DataMatrix out = data;
  if (mode == StandardizeMode::None) return out;
  if (mode == StandardizeMode::PerVariable) {
    if (data.n() < 2) throw InvalidDimension("per-variable standardization needs n >= 2");
    const double denom = static_cast<double>(data.n() - 1);
    for (Index i = 0; i < data.p(); ++i) {
      auto row = out.values.row(i);
      row.array() -= row.mean();
      const double var = row.squaredNorm() / denom;
      if (!(var > 0.0)) {
        throw DegenerateVariable("variable " + std::to_string(i) + " has zero variance");
      }
      row /= std::sqrt(var);
    }
    return out;
  }
  const double count = static_cast<double>(data.values.size());
  if (count < 2) throw InvalidDimension("global standardization needs at least two entries");
  out.values.array() -= out.values.mean();
  const double var = out.values.squaredNorm() / (count - 1.0);
  if (!(var > 0.0)) throw DegenerateVariable("data matrix is constant");
  out.values /= std::sqrt(var);
  return out;
}

// ---------------------------------------------------------------------------
// Streaming

RowBlockGenerator::RowBlockGenerator(const DistributionSpec& dist,
                                     std::optional<CovarianceFactor> factor, Index p, Index n,
                                     Engine engine)
    : sampler_(dist), factor_(std::move(factor)), p_(p), n_(n), engine_(std::move(engine)) {
  if (p < 1 || n < 1) throw InvalidDimension("row generator needs p >= 1 and n >= 1");
  if (factor_ && factor_->size() != p) {
    throw InvalidDimension("covariance factor dimension does not match p");
  }
  current_.resize(n);
  previous_.setZero(n);
}

Index RowBlockGenerator::next(RowBlock& block) {
  if (block.cols() != n_) throw InvalidDimension("row block has the wrong column count");
  const Index rows = std::min<Index>(block.rows(), p_ - row_);
  for (Index r = 0; r < rows; ++r, ++row_) {
    if (!factor_) {
      sampler_.fill(engine_, block.row(r).data(), n_);
      continue;
    }
    sampler_.fill(engine_, current_.data(), n_);
    const double d = factor_->diag(row_);
    const double e = row_ > 0 ? factor_->sub(row_ - 1) : 0.0;
    if (e == 0.0) {
      block.row(r) = d * current_.transpose();
    } else {
      block.row(r) = d * current_.transpose() + e * previous_.transpose();
    }
    std::swap(current_, previous_);
  }
  return rows;
}

}  // namespace lssclt
