#pragma once

#include <complex>
#include <vector>

namespace cqwave {

using Complex = std::complex<double>;

/// Modified Bessel functions K0, K1 for complex argument with Re z > 0.
/// Relative accuracy <= 1e-12 for |z| <= 700; underflows to zero beyond.
/// Throws std::domain_error for Re z <= 0.
Complex bessel_K0(Complex z);
Complex bessel_K1(Complex z);

/// Integer-order modified Bessel functions. I_m accepts Re z >= 0
/// (Miller downward recurrence); K_m requires Re z > 0 (upward recurrence
/// from K0, K1). Accuracy ~1e-10 for m <= 64, |z| <= 200.
/// Throws std::overflow_error if the result is not finite.
Complex bessel_I(int m, Complex z);
Complex bessel_K(int m, Complex z);

/// All orders 0..mmax in one sweep; same accuracy as the single-order calls.
std::vector<Complex> bessel_I_seq(int mmax, Complex z);
std::vector<Complex> bessel_K_seq(int mmax, Complex z);

/// Bessel functions of the first kind, x >= 0.
/// Absolute accuracy <= 1e-12 for x <= 1e4.
double bessel_J0(double x);
double bessel_J1(double x);

}  // namespace cqwave
