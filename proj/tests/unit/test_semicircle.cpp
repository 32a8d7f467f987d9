#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lssclt/errors.hpp"
#include "lssclt/semicircle.hpp"
#include "lssclt/test_function.hpp"
#include "quadrature.hpp"

using namespace lssclt;
using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

// Gauss-Legendre in theta on [0, pi] with x = 2 cos(theta): an oracle for
// semicircle integrals that does not go through psi.
double oracle_integral(const std::function<double(double)>& f, int nodes = 200) {
  const auto rule = detail::gauss_legendre(nodes, 0.0, pi);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    const double x = 2.0 * std::cos(t);
    s += rule.weights[i] * f(x) * semicircle::density(x) * 2.0 * std::sin(t);
  }
  return s;
}

}  // namespace

TEST_CASE("density") {
  CHECK(semicircle::density(0.0) == doctest::Approx(1.0 / pi).epsilon(1e-15));
  CHECK(std::abs(semicircle::density(0.0) - 0.318310) <= 1e-6);
  CHECK(semicircle::density(2.0) == 0.0);
  CHECK(semicircle::density(-2.0) == 0.0);
  CHECK(semicircle::density(3.0) == 0.0);
  const auto rule = detail::gauss_legendre(10000, -2.0, 2.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) total += rule.weights[i] * semicircle::density(rule.nodes[i]);
  CHECK(std::abs(total - 1.0) <= 1e-8);
}

TEST_CASE("cdf") {
  CHECK(semicircle::cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(semicircle::cdf(2.0) == 1.0);
  CHECK(semicircle::cdf(-2.0) == 0.0);
  CHECK(semicircle::cdf(-7.0) == 0.0);
  CHECK(semicircle::cdf(9.0) == 1.0);
  const double h = 1e-5;
  const double fd = (semicircle::cdf(1.0 + h) - semicircle::cdf(1.0 - h)) / (2.0 * h);
  CHECK(std::abs(fd - semicircle::density(1.0)) <= 1e-6);
}

TEST_CASE("moments are Catalan numbers") {
  CHECK(semicircle::moment(0) == 1.0);
  CHECK(semicircle::moment(2) == 1.0);
  CHECK(semicircle::moment(3) == 0.0);
  CHECK(semicircle::moment(4) == 2.0);
  CHECK(semicircle::moment(12) == 132.0);
  CHECK(std::abs(oracle_integral([](double x) { return x * x; }) - 1.0) <= 1e-12);
  CHECK(std::abs(oracle_integral([](double x) { return x * x * x * x; }) - 2.0) <= 1e-12);
  for (int j = 0; j <= 6; ++j) {
    std::vector<double> c(static_cast<std::size_t>(2 * j + 1), 0.0);
    c.back() = 1.0;
    CHECK(std::abs(semicircle::integral(TestFunction::polynomial(c)) - semicircle::moment(2 * j)) <= 1e-10);
  }
  CHECK_THROWS_AS(semicircle::moment(-1), InvalidArgument);
}

TEST_CASE("psi of x^2") {
  const auto f = builtin_function("xsq");
  CHECK(std::abs(semicircle::psi(f, 1)) <= 1e-15);
  CHECK(semicircle::psi(f, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(semicircle::psi(f, 5)) <= 1e-15);
  CHECK(semicircle::psi(f, 0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("psi against a Gauss-Legendre oracle in theta") {
  const auto f = TestFunction("exp", [](double x) { return std::exp(x); },
                              [](cplx w) { return std::exp(w); });
  const auto rule = detail::gauss_legendre(100, 0.0, pi);
  for (int k = 0; k <= 6; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * std::exp(2.0 * std::cos(rule.nodes[i])) * std::cos(k * rule.nodes[i]);
    CHECK(std::abs(semicircle::psi(f, k) - s / pi) <= 1e-13);
  }
}

TEST_CASE("psi is linear and constants are exact") {
  const auto f = builtin_function("xcub");
  const auto g = TestFunction::polynomial({1.0, -2.0, 0.5, 0.0, 0.25});
  const auto h = linear_combination(2.0, f, -3.0, g);
  for (int k = 0; k <= 6; ++k) {
    CHECK(std::abs(semicircle::psi(h, k) - (2.0 * semicircle::psi(f, k) - 3.0 * semicircle::psi(g, k))) <= 1e-13);
  }
  const auto c = TestFunction::constant(4.5);
  CHECK(semicircle::psi(c, 0) == doctest::Approx(4.5).epsilon(1e-15));
  for (int k = 1; k <= 8; ++k) CHECK(std::abs(semicircle::psi(c, k)) <= 1e-14);
}

TEST_CASE("psi is node-count independent for polynomials") {
  const auto g = TestFunction::polynomial({0.3, -1.0, 2.0, 0.5, -0.25, 0.125});
  for (int k = 0; k <= 5; ++k) {
    const double base = semicircle::psi(g, k, 6);
    for (int nodes : {7, 16, 64, 257}) CHECK(std::abs(semicircle::psi(g, k, nodes) - base) <= 1e-12);
  }
}

TEST_CASE("semicircle integral") {
  CHECK(semicircle::integral(builtin_function("xsq")) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(semicircle::integral(builtin_function("one")) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(semicircle::integral(builtin_function("x"))) <= 1e-15);
  const auto bad = TestFunction("sqrt", [](double x) { return std::sqrt(x); }, [](cplx w) { return std::sqrt(w); });
  CHECK_THROWS_AS(semicircle::integral(bad), EvaluationError);
}

TEST_CASE("stieltjes transform") {
  const auto a = semicircle::stieltjes(3.0);
  CHECK(a.m.real() == doctest::Approx((-3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-14));
  CHECK(std::abs(a.m.imag()) <= 1e-16);
  CHECK(std::abs(a.m.real() + 0.381966) <= 1e-6);

  const auto b = semicircle::stieltjes(cplx(0.0, 1.0));
  CHECK(std::abs(b.m.real()) <= 1e-16);
  CHECK(b.m.imag() == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-14));

  const auto c = semicircle::stieltjes(cplx(1e6, 0.0));
  CHECK(std::abs(std::abs(c.m) - 1e-6) <= 1e-12);
  CHECK(c.m.real() < 0.0);

  CHECK_THROWS_AS(semicircle::stieltjes(1.5), BranchCutError);
  CHECK_THROWS_AS(semicircle::stieltjes(-2.0), BranchCutError);
}

TEST_CASE("stieltjes identity, modulus and conjugate symmetry on a grid") {
  double worst = 0.0;
  int count = 0;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 25; ++j) {
      const double re = -8.0 + 16.0 * i / 39.0;
      const double im = (j < 12 ? -1.0 : 1.0) * std::pow(10.0, -4.0 + 5.0 * (j % 12) / 11.0);
      const cplx z(re, j == 24 ? 0.0 : im);
      if (z.imag() == 0.0 && std::abs(re) <= 2.0) continue;
      const auto s = semicircle::stieltjes(z);
      worst = std::max(worst, std::abs(s.m * s.m + z * s.m + 1.0));
      CHECK(std::abs(s.m) <= 1.0 + 1e-15);
      if (z.imag() > 0.0) CHECK(s.m.imag() > 0.0);
      const auto t = semicircle::stieltjes(std::conj(z));
      CHECK(t.m == std::conj(s.m));
      ++count;
    }
  }
  CHECK(count >= 950);
  CHECK(worst <= 1e-12);
}

TEST_CASE("m_prime") {
  CHECK(semicircle::m_prime(0.0) == 0.0);
  CHECK(std::abs(semicircle::m_prime(0.5) - 1.0 / 3.0) <= 1e-15);
  CHECK_THROWS_AS(semicircle::m_prime(1.0), SingularityError);
  CHECK_THROWS_AS(semicircle::m_prime(-1.0), SingularityError);
  const double h = 1e-5;
  const cplx fd = (semicircle::stieltjes(3.0 + h).m - semicircle::stieltjes(3.0 - h).m) / (2.0 * h);
  CHECK(std::abs(fd - semicircle::m_prime(semicircle::stieltjes(3.0).m)) <= 1e-6);
}

TEST_CASE("test functions") {
  SUBCASE("real and complex evaluation agree") {
    for (const auto& name : builtin_function_names()) {
      const auto f = builtin_function(name);
      for (double x : {-2.0, -0.7, 0.0, 1.3, 4.0}) {
        CHECK(std::abs(f(x) - f(cplx(x, 0.0)).real()) <= 1e-12);
        CHECK(f(cplx(x, 0.0)).imag() == 0.0);
      }
    }
  }
  SUBCASE("halfx3") {
    const auto f = builtin_function("halfx3");
    CHECK(f(2.0) == 1.0);
    CHECK(f(1.0) == -1.0);
    CHECK(f.derivative(1.0) == 0.0);
  }
  SUBCASE("derivative fallback") {
    const auto f = TestFunction("sin", [](double x) { return std::sin(x); },
                                [](cplx w) { return std::sin(w); });
    CHECK_FALSE(f.has_exact_derivative());
    CHECK(std::abs(f.derivative(0.4) - std::cos(0.4)) <= 1e-9);
    CHECK(builtin_function("xcub").has_exact_derivative());
    CHECK(builtin_function("xcub").derivative(2.0) == 12.0);
  }
  SUBCASE("parsing") {
    CHECK(parse_test_function("poly:0,0,1").label() == "xsq");
    CHECK(parse_test_function("poly:0,-1.5,0,0.5,0").label() == "halfx3");
    const auto p = parse_test_function("poly:1,2,3");
    CHECK(p(2.0) == 17.0);
    CHECK(p.derivative(2.0) == 14.0);
    CHECK_THROWS_AS(parse_test_function("poly:"), ParseError);
    CHECK_THROWS_AS(parse_test_function("poly:1,a"), ParseError);
    try {
      parse_test_function("cosh");
      FAIL("expected an error");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      for (const auto& name : builtin_function_names()) CHECK(msg.find(name) != std::string::npos);
    }
  }
}
