#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lssclt {

/// An analytic test function f, evaluable on the real line and, through its
/// analytic continuation, at complex points such as f(-m - 1/m) on a contour.
///
/// Without an exact derivative, derivative() falls back to a central
/// difference with step 1e-6 * max(1, |x|); that value is approximate.
class TestFunction {
 public:
  using RealFn = std::function<double(double)>;
  using ComplexFn = std::function<std::complex<double>(std::complex<double>)>;

  TestFunction(std::string label, RealFn real, ComplexFn complex,
               std::optional<RealFn> derivative = std::nullopt);

  /// f(x) = sum_k coeffs[k] x^k.
  static TestFunction polynomial(std::vector<double> ascending, std::string label = {});
  static TestFunction constant(double c);

  double operator()(double x) const { return real_(x); }
  std::complex<double> operator()(std::complex<double> w) const { return complex_(w); }

  double derivative(double x) const;
  bool has_exact_derivative() const { return derivative_.has_value(); }

  const std::string& label() const { return label_; }
  /// Ascending coefficients when f is a polynomial.
  const std::optional<std::vector<double>>& coefficients() const { return coeffs_; }

 private:
  std::string label_;
  RealFn real_;
  ComplexFn complex_;
  std::optional<RealFn> derivative_;
  std::optional<std::vector<double>> coeffs_;
};

/// a f + b g. Polynomials stay polynomials.
TestFunction linear_combination(double a, const TestFunction& f, double b, const TestFunction& g);

/// one, x, xsq, xcub, halfx3 (= x(x^2 - 3)/2).
TestFunction builtin_function(std::string_view name);
const std::vector<std::string>& builtin_function_names();

/// A builtin name or "poly:c0,c1,..." with ascending coefficients.
TestFunction parse_test_function(std::string_view text);

}  // namespace lssclt
