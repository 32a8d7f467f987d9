#include "lssclt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "lssclt/csv.hpp"
#include "lssclt/errors.hpp"
#include "lssclt/test_function.hpp"
#include "summation.hpp"

namespace lssclt {

GramAccumulator::GramAccumulator(Index n) : gram_(Eigen::MatrixXd::Zero(n, n)), n_(n) {
  if (n < 1) throw InvalidDimension("Gram accumulator needs n >= 1");
}

void GramAccumulator::add_rows(const Eigen::Ref<const RowBlock>& rows) {
  if (rows.cols() != n_) throw InvalidDimension("row block width does not match n");
  if (rows.rows() == 0) return;
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
  fourth_power_sum_ += rows.array().square().square().sum();
  rows_seen_ += rows.rows();
}

NormalizedMatrix GramAccumulator::finish() const {
  if (rows_seen_ < 1) throw InvalidDimension("no rows were accumulated");
  const double p = static_cast<double>(rows_seen_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_) * p);
  NormalizedMatrix a;
  a.n = n_;
  a.p = rows_seen_;
  a.values.resize(n_, n_);
  for (Index j = 0; j < n_; ++j) {
    a.values(j, j) = (gram_(j, j) - p) * scale;
    for (Index i = j + 1; i < n_; ++i) {
      const double v = gram_(i, j) * scale;
      a.values(i, j) = v;
      a.values(j, i) = v;
    }
  }
  return a;
}

NormalizedMatrix normalized_gram(const DataMatrix& data) {
  if (data.p() < 1 || data.n() < 1) throw InvalidDimension("normalized_gram needs p, n >= 1");
  GramAccumulator acc(data.n());
  RowBlock block;
  for (Index row = 0; row < data.p(); row += GramAccumulator::kBlockRows) {
    const Index rows = std::min(GramAccumulator::kBlockRows, data.p() - row);
    block = data.values.middleRows(row, rows);
    acc.add_rows(block);
  }
  return acc.finish();
}

Spectrum eigenvalues(const NormalizedMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.values, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge (n=" + std::to_string(a.n) + ")");
  }
  Spectrum s;
  s.n = a.n;
  s.p = a.p;
  const auto& ev = solver.eigenvalues();
  s.values.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.values.begin(), s.values.end());
  return s;
}

double lss(const Spectrum& spectrum, const TestFunction& f) {
  detail::NeumaierSum sum;
  for (double lambda : spectrum.values) {
    const double v = f(lambda);
    if (!std::isfinite(v)) {
      throw EvaluationError("test function " + f.label() + " is not finite at eigenvalue " +
                            std::to_string(lambda));
    }
    sum.add(v);
  }
  return sum.value();
}

double frobenius_trace(const NormalizedMatrix& a) { return a.values.squaredNorm(); }

double trace(const NormalizedMatrix& a) { return a.values.trace(); }

double kolmogorov_distance(const Spectrum& spectrum, const std::function<double(double)>& cdf) {
  const auto& v = spectrum.values;
  const double count = static_cast<double>(v.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / count - f));
    worst = std::max(worst, std::abs(f - static_cast<double>(i) / count));
  }
  return worst;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  write_csv_column(out, spectrum.values);
}

}  // namespace lssclt
