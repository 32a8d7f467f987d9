#include "lssclt/clt_correction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lssclt/errors.hpp"
#include "lssclt/semicircle.hpp"
#include "quadrature.hpp"
#include "summation.hpp"

namespace lssclt {

using std::numbers::pi;

namespace {

constexpr double kRealBThreshold = 1e-14;
constexpr double kNearTie = 1e-3;

}  // namespace

RootRule parse_root_rule(std::string_view text) {
  if (text == "min-modulus") return RootRule::MinModulus;
  if (text == "imag-sign") return RootRule::ImagSign;
  throw ParseError("unknown root rule '" + std::string(text) + "' (min-modulus, imag-sign)");
}

std::string to_string(RootRule rule) {
  return rule == RootRule::MinModulus ? "min-modulus" : "imag-sign";
}

std::string to_string(LssVariant v) {
  switch (v) {
    case LssVariant::Gn: return "gn";
    case LssVariant::GnCalib: return "gn-calib";
    case LssVariant::Qn: return "qn";
  }
  return "?";
}

LssVariant parse_variant(std::string_view text) {
  if (text == "gn") return LssVariant::Gn;
  if (text == "gn-calib") return LssVariant::GnCalib;
  if (text == "qn") return LssVariant::Qn;
  throw ParseError("unknown variant '" + std::string(text) + "' (gn, gn-calib, qn)");
}

void CorrectionOptions::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("contour radius must lie in (0, 1)");
  if (nodes < 16) throw InvalidArgument("contour needs at least 16 nodes");
}

// ---------------------------------------------------------------------------
// Quadratic and its roots

QuadraticCoeffs quadratic_coeffs(cplx m, Index n, Index p, double nu4, bool calibrated) {
  if (n < 1 || p < 1) throw InvalidDimension("quadratic_coeffs needs n, p >= 1");
  const cplx m2 = m * m;
  const cplx one_minus = 1.0 - m2;
  if (std::abs(one_minus) == 0.0) throw SingularityError("coefficient C is singular at m = +-1");
  const double r = std::sqrt(static_cast<double>(n) / static_cast<double>(p));
  const double nd = static_cast<double>(n);
  const cplx m3 = m2 * m;
  const cplx m4 = m2 * m2;

  QuadraticCoeffs q;
  q.n = n;
  q.p = p;
  q.nu4 = nu4;
  q.calibrated = calibrated;
  q.a = m - r * (1.0 + m2);
  q.b = m2 - 1.0 - r * m * (1.0 + 2.0 * m2);
  cplx bracket = m2 / one_minus + (nu4 - 2.0);
  if (calibrated) bracket -= 2.0 * (nu4 - 1.0) * m * r;
  q.c = m3 / nd * bracket - r * m4;
  return q;
}

RootChoice select_root(const QuadraticCoeffs& q, RootRule rule) {
  RootChoice out;
  if (q.a == 0.0) {
    if (q.b == 0.0) throw DegenerateQuadratic("quadratic has A = B = 0");
    out.value = -q.c / q.b;
    out.other = std::numeric_limits<double>::infinity();
    out.modulus_ratio = 0.0;
    return out;
  }
  const cplx disc = q.b * q.b - 4.0 * q.a * q.c;
  const cplx principal = std::sqrt(disc);

  // Stable pair: the larger root from the sum without cancellation, the
  // smaller from the product c / a.
  cplx s = principal;
  if (std::real(std::conj(q.b) * s) < 0.0) s = -s;
  const cplx big_num = -(q.b + s) / 2.0;
  cplx large;
  cplx small;
  if (big_num == 0.0) {
    large = small = 0.0;
  } else {
    large = big_num / q.a;
    small = q.c / big_num;
  }
  if (std::abs(small) > std::abs(large)) std::swap(small, large);
  out.modulus_ratio = std::abs(large) == 0.0 ? 1.0 : std::abs(small) / std::abs(large);

  if (rule == RootRule::MinModulus) {
    out.value = small;
    out.other = large;
    return out;
  }

  // Sign rule: Im sqrt(disc) carries the sign of Im B. For numerically real
  // B the rule is silent; take the limit from either side, which aligns the
  // root with B.
  cplx t = principal;
  if (std::abs(q.b.imag()) > kRealBThreshold) {
    if ((t.imag() < 0.0) != (q.b.imag() < 0.0)) t = -t;
  } else {
    out.real_b = true;
    if (std::real(std::conj(q.b) * t) < 0.0) t = -t;
  }
  // (-B + t) / 2A == 2C / (-B - t); use whichever avoids cancellation.
  const cplx plus = -q.b + t;
  const cplx minus = -q.b - t;
  cplx chosen;
  if (std::abs(plus) >= std::abs(minus) || minus == 0.0) {
    chosen = plus / (2.0 * q.a);
  } else {
    chosen = 2.0 * q.c / minus;
  }
  out.value = chosen;
  out.other = std::abs(chosen - small) <= std::abs(chosen - large) ? large : small;
  return out;
}

cplx correction_root(const QuadraticCoeffs& q, RootRule rule) { return select_root(q, rule).value; }

// ---------------------------------------------------------------------------
// Contour integral

ContourCorrection mean_correction(const TestFunction& f, Index n, Index p, double nu4,
                                  const CorrectionOptions& opts) {
  opts.validate();
  if (n < 1 || p < 1) throw InvalidDimension("mean_correction needs n, p >= 1");
  ContourCorrection out;
  out.options = opts;

  const int nodes = opts.nodes;
  std::vector<cplx> roots(static_cast<std::size_t>(nodes));
  detail::NeumaierSum re;
  detail::NeumaierSum im;
  for (int j = 0; j < nodes; ++j) {
    const double theta = 2.0 * pi * j / nodes;
    const cplx m = std::polar(opts.rho, theta);
    const auto q = quadratic_coeffs(m, n, p, nu4, opts.calibrated);
    const auto choice = select_root(q, opts.root_rule);
    roots[j] = choice.value;
    if (std::abs(choice.modulus_ratio - 1.0) < kNearTie) ++out.near_tie_nodes;
    if (choice.real_b) ++out.real_b_nodes;

    const cplx w = -m - 1.0 / m;
    const cplx fw = f(w);
    if (!std::isfinite(fw.real()) || !std::isfinite(fw.imag())) {
      throw EvaluationError("test function " + f.label() + " is not finite on the contour image");
    }
    // dm = i m dt, so (1/2 pi i) dm = m dt / 2 pi.
    const cplx term = fw * choice.value * (1.0 - m * m) / m;
    re.add(term.real());
    im.add(term.imag());
  }
  const double scale = static_cast<double>(n) / nodes;
  out.value = scale * re.value();
  out.imag_residual = std::abs(scale * im.value());

  if (out.near_tie_nodes > 0) {
    out.warnings.push_back(std::to_string(out.near_tie_nodes) +
                           " contour nodes have near-equal root moduli");
  }
  if (out.real_b_nodes > 0 && opts.root_rule == RootRule::ImagSign) {
    out.warnings.push_back(std::to_string(out.real_b_nodes) +
                           " contour nodes have real B; sign rule used its limiting branch");
  }

  std::vector<double> jumps(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) jumps[j] = std::abs(roots[(j + 1) % nodes] - roots[j]);
  std::vector<double> sorted = jumps;
  std::nth_element(sorted.begin(), sorted.begin() + nodes / 2, sorted.end());
  const double median = sorted[static_cast<std::size_t>(nodes / 2)];
  const auto worst = std::max_element(jumps.begin(), jumps.end());
  if (median > 0.0 && *worst > 10.0 * median) {
    std::ostringstream os;
    os << "root-selection discontinuity: jump " << *worst << " after node "
       << (worst - jumps.begin()) << " exceeds 10x the median jump " << median;
    out.warnings.push_back(os.str());
  }

  if (!(out.imag_residual <= 1e-6 * (1.0 + std::abs(out.value)))) {
    std::ostringstream os;
    os << "contour integral has imaginary residual " << out.imag_residual << " for value "
       << out.value << "; increase nodes or move rho";
    throw ContourAccuracyError(os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

double centered_lss(const Spectrum& spectrum, const TestFunction& f) {
  return lss(spectrum, f) - static_cast<double>(spectrum.n) * semicircle::integral(f);
}

namespace {

double standardize_value(double statistic, double mean, double var) {
  if (!(var > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (statistic - mean) / std::sqrt(var);
}

}  // namespace

LssResult gn_statistic(const Spectrum& spectrum, const TestFunction& f, double nu4,
                       const CorrectionOptions& opts) {
  const auto correction = mean_correction(f, spectrum.n, spectrum.p, nu4, opts);
  const auto cov = asymptotic_cov_series(f, f, nu4);
  auto result = gn_statistic(spectrum, f, nu4, correction, cov.value);
  result.warnings.insert(result.warnings.end(), cov.warnings.begin(), cov.warnings.end());
  return result;
}

LssResult gn_statistic(const Spectrum& spectrum, const TestFunction& f, double nu4,
                       const ContourCorrection& correction, double asymptotic_var) {
  LssResult r;
  r.variant = correction.options.calibrated ? LssVariant::GnCalib : LssVariant::Gn;
  r.f_label = f.label();
  r.n = spectrum.n;
  r.p = spectrum.p;
  r.nu4 = nu4;
  r.raw_lss = centered_lss(spectrum, f);
  r.correction = correction.value;
  r.statistic = r.raw_lss - r.correction;
  r.asymptotic_mean = 0.0;
  r.asymptotic_var = asymptotic_var;
  r.standardized = standardize_value(r.statistic, 0.0, asymptotic_var);
  r.imag_residual = correction.imag_residual;
  r.regime_ratio = std::pow(static_cast<double>(r.n), 3) / static_cast<double>(r.p);
  r.options = correction.options;
  r.warnings = correction.warnings;
  return r;
}

LssResult qn_statistic(const Spectrum& spectrum, const TestFunction& f, double nu4) {
  LssResult r;
  r.variant = LssVariant::Qn;
  r.f_label = f.label();
  r.n = spectrum.n;
  r.p = spectrum.p;
  r.nu4 = nu4;
  r.regime_ratio = std::pow(static_cast<double>(r.n), 3) / static_cast<double>(r.p);
  r.raw_lss = centered_lss(spectrum, f);
  r.correction = std::sqrt(r.regime_ratio) * semicircle::psi(f, 3);
  r.statistic = r.raw_lss - r.correction;
  r.asymptotic_mean = asymptotic_mean(f, nu4);
  const auto cov = asymptotic_cov_series(f, f, nu4);
  r.asymptotic_var = cov.value;
  r.standardized = standardize_value(r.statistic, r.asymptotic_mean, r.asymptotic_var);
  r.warnings = cov.warnings;
  if (r.regime_ratio > 10.0) {
    std::ostringstream os;
    os << "n^3/p = " << r.regime_ratio << " is far from the O(1) regime of Q_n";
    r.warnings.push_back(os.str());
  }
  return r;
}

double asymptotic_mean(const TestFunction& f, double nu4) {
  const auto p = semicircle::psi_all(f, 2, semicircle::kDefaultPsiNodes);
  return 0.25 * (f(2.0) + f(-2.0)) - 0.5 * p[0] + (nu4 - 3.0) * p[2];
}

CovSeries asymptotic_cov_series(const TestFunction& f1, const TestFunction& f2, double nu4,
                                int terms) {
  if (terms < 1) throw InvalidArgument("covariance series needs at least one term");
  const int kmax = 2 * terms;
  const int nodes = std::max(semicircle::kDefaultPsiNodes, 2 * kmax);
  const auto p1 = semicircle::psi_all(f1, kmax, nodes);
  const auto p2 = semicircle::psi_all(f2, kmax, nodes);

  CovSeries out;
  out.terms = terms;
  detail::NeumaierSum sum;
  sum.add((nu4 - 3.0) * p1[1] * p2[1]);
  for (int k = 1; k <= terms; ++k) sum.add(2.0 * k * p1[k] * p2[k]);
  out.value = sum.value();
  detail::NeumaierSum tail;
  for (int k = terms + 1; k <= kmax; ++k) tail.add(2.0 * k * std::abs(p1[k] * p2[k]));
  out.tail_estimate = tail.value();
  if (out.tail_estimate > 1e-6 * std::abs(out.value)) {
    std::ostringstream os;
    os << "covariance series tail " << out.tail_estimate << " is not negligible next to "
       << out.value << " after " << terms << " terms";
    out.warnings.push_back(os.str());
  }
  return out;
}

CovIntegral asymptotic_cov_integral(const TestFunction& f1, const TestFunction& f2, double nu4,
                                    int nodes) {
  if (nodes < 2) throw InvalidArgument("covariance integral needs at least two nodes");
  const auto outer = detail::gauss_legendre(nodes, 0.0, pi);
  // Inner rule on [0, 1], graded toward 0 by t = u^3 to absorb the log
  // singularity of the kernel at b = a.
  const auto unit = detail::gauss_legendre(nodes, 0.0, 1.0);

  // g(t) = f'(2 cos t) * 2 sin t is dx/dt times f'; sqrt(4 - x^2) = 2 sin t.
  auto g = [](const TestFunction& f, double t) { return f.derivative(2.0 * std::cos(t)) * 2.0 * std::sin(t); };
  // `d` is a - b, passed separately so that it keeps its digits near b = a.
  auto kernel = [nu4](double a, double b, double d) {
    // With x = 2 cos a, y = 2 cos b:
    //   (4 - xy + S) / (4 - xy - S) = sin^2((a+b)/2) / sin^2((a-b)/2).
    const double log_term = 2.0 * std::log(std::abs(std::sin(0.5 * (a + b)) / std::sin(0.5 * d)));
    return (nu4 - 3.0) * 4.0 * std::sin(a) * std::sin(b) + 2.0 * log_term;
  };

  detail::NeumaierSum total;
  for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
    const double a = outer.nodes[i];
    const double ga = g(f1, a);
    if (ga == 0.0) continue;
    detail::NeumaierSum inner;
    for (std::size_t j = 0; j < unit.nodes.size(); ++j) {
      const double u = unit.nodes[j];
      const double t = u * u * u;
      const double dt = 3.0 * u * u * unit.weights[j];
      const double left = a - a * t;
      const double right = a + (pi - a) * t;
      const double hl = kernel(a, left, a * t);
      const double hr = kernel(a, right, -(pi - a) * t);
      if (!std::isfinite(hl) || !std::isfinite(hr)) throw NumericalError("covariance kernel is not finite");
      inner.add(a * dt * g(f2, left) * hl);
      inner.add((pi - a) * dt * g(f2, right) * hr);
    }
    total.add(outer.weights[i] * ga * inner.value());
  }
  CovIntegral out;
  out.value = total.value() / (4.0 * pi * pi);
  out.nodes = nodes;
  out.derivative_fallback = !(f1.has_exact_derivative() && f2.has_exact_derivative());
  return out;
}

}  // namespace lssclt
