#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "lssclt/data_gen.hpp"

namespace lssclt {

class TestFunction;

/// A = sqrt(p/n) (X^T X / p - I_n) = (X^T X - p I_n) / sqrt(n p).
struct NormalizedMatrix {
  Eigen::MatrixXd values;  // n x n, symmetric
  Index n = 0;
  Index p = 0;
};

/// Sorted eigenvalues of a NormalizedMatrix together with its (n, p).
struct Spectrum {
  std::vector<double> values;
  Index n = 0;
  Index p = 0;
};

/// Accumulates X^T X from row blocks so the p x n matrix never has to exist.
/// Materialized and streamed inputs go through the same block products.
class GramAccumulator {
 public:
  static constexpr Index kBlockRows = 256;

  explicit GramAccumulator(Index n);

  void add_rows(const Eigen::Ref<const RowBlock>& rows);
  Index rows_seen() const { return rows_seen_; }
  /// Sum of fourth powers of every entry seen so far.
  double fourth_power_sum() const { return fourth_power_sum_; }

  NormalizedMatrix finish() const;

 private:
  Eigen::MatrixXd gram_;  // lower triangle is authoritative
  Index n_;
  Index rows_seen_ = 0;
  double fourth_power_sum_ = 0.0;
};

NormalizedMatrix normalized_gram(const DataMatrix& data);

/// Ascending eigenvalues; NumericalError if the solver does not converge.
Spectrum eigenvalues(const NormalizedMatrix& a);

/// sum_j f(lambda_j); EvaluationError when f is not finite at an eigenvalue.
double lss(const Spectrum& spectrum, const TestFunction& f);

/// tr(A A^T) = sum_ij A_ij^2, no eigensolve.
double frobenius_trace(const NormalizedMatrix& a);

double trace(const NormalizedMatrix& a);

/// sup_x |F_n(x) - F(x)| between the empirical CDF of `spectrum` and `cdf`.
double kolmogorov_distance(const Spectrum& spectrum, const std::function<double(double)>& cdf);

/// One eigenvalue per line.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

}  // namespace lssclt
