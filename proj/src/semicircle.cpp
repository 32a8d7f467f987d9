#include "lssclt/semicircle.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "lssclt/errors.hpp"
#include "summation.hpp"

namespace lssclt::semicircle {

using std::numbers::pi;

double density(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * pi);
}

double cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * pi) + std::asin(x / 2.0) / pi;
}

double moment(int k) {
  if (k < 0) throw InvalidArgument("moment order must be non-negative");
  if (k % 2 != 0) return 0.0;
  // Catalan(j) = prod_{i=2}^{j} (j + i) / i
  const int j = k / 2;
  double c = 1.0;
  for (int i = 2; i <= j; ++i) c = c * (j + i) / i;
  return std::round(c);
}

std::vector<double> psi_all(const TestFunction& f, int kmax, int nodes) {
  if (nodes < 1) throw InvalidArgument("psi needs at least one node");
  if (kmax < 0) throw InvalidArgument("psi order must be non-negative");
  std::vector<double> fv(static_cast<std::size_t>(nodes));
  std::vector<double> theta(fv.size());
  for (int j = 0; j < nodes; ++j) {
    theta[j] = (j + 0.5) * pi / nodes;
    fv[j] = f(2.0 * std::cos(theta[j]));
    if (!std::isfinite(fv[j])) {
      throw EvaluationError("test function " + f.label() + " is not finite at x=" +
                            std::to_string(2.0 * std::cos(theta[j])));
    }
  }
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    detail::NeumaierSum sum;
    for (int j = 0; j < nodes; ++j) sum.add(fv[j] * std::cos(k * theta[j]));
    out[k] = sum.value() / nodes;
  }
  return out;
}

double psi(const TestFunction& f, int k, int nodes) {
  if (k < 0) throw InvalidArgument("psi order must be non-negative");
  return psi_all(f, k, nodes)[static_cast<std::size_t>(k)];
}

double integral(const TestFunction& f, int nodes) {
  const auto p = psi_all(f, 2, nodes);
  return p[0] - p[2];
}

StieltjesPoint stieltjes(std::complex<double> z) {
  if (z.imag() == 0.0 && std::abs(z.real()) <= 2.0) {
    throw BranchCutError("Stieltjes transform is undefined on the support [-2, 2] (z=" +
                         std::to_string(z.real()) + ")");
  }
  if (z.imag() < 0.0) {
    const auto upper = stieltjes(std::conj(z));
    return {z, std::conj(upper.m)};
  }
  // Roots of m^2 + z m + 1: the larger one without cancellation, the other
  // from the product of the roots being 1.
  std::complex<double> s = std::sqrt(z * z - 4.0);
  if (std::real(std::conj(z) * s) < 0.0) s = -s;
  const std::complex<double> large = -(z + s) / 2.0;
  return {z, 1.0 / large};
}

std::complex<double> m_prime(std::complex<double> m) {
  const std::complex<double> denom = 1.0 - m * m;
  if (std::abs(denom) == 0.0) throw SingularityError("m'(z) is singular at m = +-1");
  return m * m / denom;
}

}  // namespace lssclt::semicircle
