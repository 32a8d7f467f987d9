#pragma once

namespace lssclt {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, via the inverse complementary error function.
double normal_quantile(double prob);

/// 2 (1 - Phi(|x|)), computed from erfc so tiny values keep their precision.
double two_sided_p_value(double x);

/// Two-sided decision with the half-open region {x <= z_{a/2}} U {x > z_{1-a/2}}.
bool rejects(double statistic, double alpha);

}  // namespace lssclt
