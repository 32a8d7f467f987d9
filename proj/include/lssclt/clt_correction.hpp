#pragma once

// Centering and limiting moments for linear spectral statistics of
// A = (X^T X - p I) / sqrt(n p) when p >> n.
//
// The mean correction is the contour integral
//
//   (n / 2 pi i) \oint_{|m| = rho} f(-m - 1/m) X_n(m) (1 - m^2) / m^2 dm
//
// where X_n(m) is the small root of A x^2 + B x + C = 0. The circle is
// traversed once, counter-clockwise, with m = rho e^{i t}, t in [0, 2 pi).
// A doubled range t in [-2 pi, 2 pi] would count the closed contour twice,
// so it is not used.

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lssclt/data_gen.hpp"
#include "lssclt/spectra.hpp"
#include "lssclt/test_function.hpp"

namespace lssclt {

using cplx = std::complex<double>;

enum class RootRule {
  MinModulus,  // root of smallest modulus
  ImagSign,    // (-B + sqrt(disc)) / 2A with Im sqrt(disc) signed like Im B
};

RootRule parse_root_rule(std::string_view text);
std::string to_string(RootRule rule);

struct CorrectionOptions {
  double rho = 0.5;
  int nodes = 512;
  bool calibrated = true;
  RootRule root_rule = RootRule::MinModulus;

  /// InvalidArgument unless 0 < rho < 1 and nodes >= 16.
  void validate() const;
};

struct QuadraticCoeffs {
  cplx a;
  cplx b;
  cplx c;
  Index n = 0;
  Index p = 0;
  double nu4 = 0.0;
  bool calibrated = false;
};

/// A = m - r (1 + m^2), B = m^2 - 1 - r m (1 + 2 m^2) with r = sqrt(n/p), and
///   C       = (m^3/n) (m^2/(1 - m^2) + nu4 - 2) - r m^4
///   C_calib = (m^3/n) (nu4 - 2 + m^2/(1 - m^2) - 2 (nu4 - 1) m r) - r m^4.
QuadraticCoeffs quadratic_coeffs(cplx m, Index n, Index p, double nu4, bool calibrated);

struct RootChoice {
  cplx value;
  cplx other;
  /// |smaller root| / |larger root|; near 1 means the rules may disagree.
  double modulus_ratio = 0.0;
  /// B was numerically real, so the sign rule had to fall back.
  bool real_b = false;
};

RootChoice select_root(const QuadraticCoeffs& q, RootRule rule);
cplx correction_root(const QuadraticCoeffs& q, RootRule rule);

struct ContourCorrection {
  double value = 0.0;
  double imag_residual = 0.0;
  CorrectionOptions options;
  int near_tie_nodes = 0;
  int real_b_nodes = 0;
  std::vector<std::string> warnings;
};

/// Trapezoidal rule on the circle. ContourAccuracyError if the imaginary
/// residual exceeds 1e-6 (1 + |value|).
ContourCorrection mean_correction(const TestFunction& f, Index n, Index p, double nu4,
                                  const CorrectionOptions& opts = {});

enum class LssVariant { Gn, GnCalib, Qn };
std::string to_string(LssVariant v);
LssVariant parse_variant(std::string_view text);

struct LssResult {
  LssVariant variant = LssVariant::GnCalib;
  std::string f_label;
  Index n = 0;
  Index p = 0;
  double nu4 = 0.0;
  double raw_lss = 0.0;     // sum f(lambda_j) - n int f dF
  double correction = 0.0;  // contour term, or sqrt(n^3/p) Psi_3(f) for Qn
  double statistic = 0.0;   // raw_lss - correction
  double asymptotic_mean = 0.0;
  double asymptotic_var = 0.0;
  double standardized = 0.0;  // (statistic - mean) / sqrt(var); NaN when var = 0
  double imag_residual = 0.0;
  double regime_ratio = 0.0;  // n^3 / p
  std::optional<CorrectionOptions> options;
  std::vector<std::string> warnings;
};

/// sum_j f(lambda_j) - n int f dF.
double centered_lss(const Spectrum& spectrum, const TestFunction& f);

LssResult gn_statistic(const Spectrum& spectrum, const TestFunction& f, double nu4,
                       const CorrectionOptions& opts = {});
/// Same, reusing a correction computed for this (f, n, p, nu4).
LssResult gn_statistic(const Spectrum& spectrum, const TestFunction& f, double nu4,
                       const ContourCorrection& correction, double asymptotic_var);

/// Q_n(f) = centered LSS - sqrt(n^3/p) Psi_3(f); intended for n^3/p = O(1).
LssResult qn_statistic(const Spectrum& spectrum, const TestFunction& f, double nu4);

/// Limiting mean of Q_n: (f(2) + f(-2))/4 - Psi_0(f)/2 + (nu4 - 3) Psi_2(f).
double asymptotic_mean(const TestFunction& f, double nu4);

struct CovSeries {
  double value = 0.0;
  /// 2 sum_{K < k <= 2K} k |Psi_k(f1) Psi_k(f2)|
  double tail_estimate = 0.0;
  int terms = 0;
  std::vector<std::string> warnings;
};

/// (nu4 - 3) Psi_1 Psi_1 + 2 sum_{k=1}^{K} k Psi_k(f1) Psi_k(f2).
CovSeries asymptotic_cov_series(const TestFunction& f1, const TestFunction& f2, double nu4,
                                int terms = 200);

struct CovIntegral {
  double value = 0.0;
  int nodes = 0;
  bool derivative_fallback = false;
};

/// (1 / 4 pi^2) \iint f1'(x) f2'(y) H(x, y) dx dy over [-2, 2]^2 with
///   H = (nu4 - 3) sqrt(4 - x^2) sqrt(4 - y^2)
///       + 2 log((4 - xy + sqrt((4-x^2)(4-y^2))) / (4 - xy - sqrt((4-x^2)(4-y^2)))).
/// Tensor Gauss-Legendre after x = 2 cos a, y = 2 cos b, with `nodes` points
/// in a and nodes + 1 in b; the two rules interlace, so no node pair sits on
/// the logarithmic diagonal.
CovIntegral asymptotic_cov_integral(const TestFunction& f1, const TestFunction& f2, double nu4,
                                    int nodes = 400);

}  // namespace lssclt
