#include "lssclt/normal.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "lssclt/errors.hpp"

namespace lssclt {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw InvalidArgument("normal quantile needs 0 < prob < 1");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * prob);
}

double two_sided_p_value(double x) { return std::erfc(std::abs(x) / std::numbers::sqrt2); }

bool rejects(double statistic, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  return std::abs(statistic) > normal_quantile(1.0 - alpha / 2.0);
}

}  // namespace lssclt
