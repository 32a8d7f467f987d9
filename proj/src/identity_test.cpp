#include "lssclt/identity_test.hpp"

#include "lssclt/errors.hpp"
#include "lssclt/normal.hpp"

namespace lssclt {

double nu4_hat(const DataMatrix& data) {
  if (data.values.size() == 0) throw InvalidDimension("nu4_hat needs a non-empty matrix");
  return data.values.array().square().square().sum() / static_cast<double>(data.values.size());
}

double l_n_statistic(const NormalizedMatrix& b, double nu4) {
  return 0.5 * (frobenius_trace(b) - static_cast<double>(b.n) - (nu4 - 2.0));
}

TestResult l_n(const DataMatrix& data, std::optional<double> nu4) {
  TestResult r;
  r.n = data.n();
  r.p = data.p();
  r.nu4_source = nu4 ? Nu4Source::Provided : Nu4Source::Estimated;
  r.nu4_used = nu4 ? *nu4 : nu4_hat(data);
  r.statistic = l_n_statistic(normalized_gram(data), r.nu4_used);
  r.p_value = two_sided_p_value(r.statistic);
  return r;
}

TestResult test_identity(const DataMatrix& data, const std::vector<double>& alphas,
                         std::optional<double> nu4) {
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  }
  auto r = l_n(data, nu4);
  for (double a : alphas) r.reject_at[a] = rejects(r.statistic, a);
  return r;
}

TestResult test_identity(const DataMatrix& data, double alpha, std::optional<double> nu4) {
  return test_identity(data, std::vector<double>{alpha}, nu4);
}

}  // namespace lssclt
