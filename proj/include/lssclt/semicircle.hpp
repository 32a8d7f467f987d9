#pragma once

// Closed-form analytics of the semicircle law on [-2, 2].

#include <complex>

#include "lssclt/test_function.hpp"

namespace lssclt::semicircle {

inline constexpr int kDefaultPsiNodes = 256;

/// sqrt(4 - x^2) / (2 pi) on [-2, 2], zero outside.
double density(double x);

double cdf(double x);

/// 0 for odd k, Catalan(k/2) for even k.
double moment(int k);

/// Psi_k(f) = (1/2pi) int_{-pi}^{pi} f(2 cos t) cos(k t) dt by the N-node
/// midpoint rule in t (Gauss-Chebyshev). Exact for polynomial f of degree
/// d whenever d + k < 2N.
double psi(const TestFunction& f, int k, int nodes = kDefaultPsiNodes);

/// Psi_0 .. Psi_{kmax} from one set of N function evaluations.
std::vector<double> psi_all(const TestFunction& f, int kmax, int nodes);

/// int f dF = Psi_0(f) - Psi_2(f).
double integral(const TestFunction& f, int nodes = kDefaultPsiNodes);

/// Point z off the cut and the root m of m^2 + z m + 1 = 0 with |m| <= 1.
struct StieltjesPoint {
  std::complex<double> z;
  std::complex<double> m;
};

/// Stieltjes transform m(z) = int (x - z)^{-1} dF(x). BranchCutError for z on
/// [-2, 2]. Exact conjugate symmetry: m(conj z) is computed as conj(m(z)).
StieltjesPoint stieltjes(std::complex<double> z);

/// m'(z) expressed through m: m^2 / (1 - m^2). SingularityError at m = +-1.
std::complex<double> m_prime(std::complex<double> m);

}  // namespace lssclt::semicircle
