#include "cqwave/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cqwave {
namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// S-fraction coefficients of the large-|z| expansion of K0/K1: with w = 1/z,
//   K_nu(z) = sqrt(pi/(2z)) e^{-z} / (1 + d1 w/(1 + d2 w/(1 + ...))).
// Quotient-difference transform of the divergent asymptotic series, computed
// in exact rational arithmetic; the fraction converges for Re z > 0 and is
// accurate to machine precision on the region it is used in (see k01_region).
inline constexpr double kSfracK0[30] = {
    1.25000000000000000e-01, 4.37500000000000000e-01, 6.16071428571428603e-01,
    9.27406832298136696e-01, 1.11268017362185390e+00, 1.42259214692473179e+00,
    1.61083699474360986e+00, 1.91960741863294415e+00, 2.10966228408774725e+00,
    2.41751258792881973e+00, 2.60884240492725716e+00, 2.91593104986581242e+00,
    3.10823545637718546e+00, 3.41467817036066146e+00, 3.60776717396148605e+00,
    3.91365118058244477e+00, 4.10739464208716853e+00, 4.41278762614928421e+00,
    4.60709120688086404e+00, 4.91204701787003195e+00, 5.10683937951814215e+00,
    5.41140177022481961e+00, 5.60662717703303315e+00, 5.91083233407238762e+00,
    6.10644609620468337e+00, 6.41032440462976716e+00, 6.60628992584668584e+00,
    6.90986723286270266e+00, 7.10615401725242357e+00, 7.40945255873671549e+00};

inline constexpr double kSfracK1[30] = {
    -3.75000000000000000e-01, 6.87500000000000000e-01, 2.55681818181818177e-01,
    1.13320707070707072e+00,  7.86145930052615238e-01, 1.62602618901605545e+00,
    1.30102787598244518e+00,  2.12380466056708261e+00, 1.81026118552811588e+00,
    2.62289586619488002e+00,  2.31671288786382501e+00, 3.12247330097561404e+00,
    2.82155250767097732e+00,  3.62226721933858942e+00, 3.32535827350262725e+00,
    4.12216929431682555e+00,  3.82845358701671046e+00, 4.62212968669934376e+00,
    4.33103556058635064e+00,  5.12212315786693040e+00, 4.83323219711331298e+00,
    5.62213599127359309e+00,  5.33513077200660568e+00, 6.12216032364357243e+00,
    5.83679313765367169e+00,  6.62219145959431277e+00, 6.33826452953049468e+00,
    7.12222650700251059e+00,  6.83957890515561218e+00, 7.62226364298531767e+00};

Complex k_sfraction(const double* d, Complex z) {
  const Complex w = 1.0 / z;
  Complex f = 1.0;
  for (int k = 29; k >= 0; --k) f = 1.0 + d[k] * w / f;
  return std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / f;
}

// Ascending-series region: cancellation stays below ~e^{2 Re z}, so the
// series is kept away from large real parts.
bool k01_use_series(Complex z) {
  const double a = std::abs(z);
  return a <= 2.0 || (a <= 8.0 && z.real() <= 4.0);
}

Complex k0_series(Complex z) {
  const Complex q = 0.25 * z * z;
  Complex term = 1.0, si = 1.0, sh = 0.0;
  double hk = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / double(k * k);
    hk += 1.0 / k;
    si += term;
    sh += term * hk;
    if (std::abs(term) * (hk + 1.0) < 1e-18 * std::abs(si)) break;
  }
  return -(std::log(0.5 * z) + kEulerGamma) * si + sh;
}

Complex k1_series(Complex z) {
  const Complex q = 0.25 * z * z;
  // I1(z) = (z/2) sum q^k / (k!(k+1)!)
  Complex ti = 0.5 * z, i1 = ti;
  for (int k = 1; k < 200; ++k) {
    ti *= q / double(k * (k + 1));
    i1 += ti;
    if (std::abs(ti) < 1e-18 * std::abs(i1)) break;
  }
  // correction sum with digamma weights psi(k+1) + psi(k+2)
  Complex tc = 0.25 * z, cs = 0.0;
  double pk = -kEulerGamma, pk1 = 1.0 - kEulerGamma;
  for (int k = 0; k < 200; ++k) {
    const Complex c = tc * (pk + pk1);
    cs += c;
    if (std::abs(c) < 1e-18 * std::abs(cs) && k > 0) break;
    tc *= q / double((k + 1) * (k + 2));
    pk += 1.0 / (k + 1);
    pk1 += 1.0 / (k + 2);
  }
  return 1.0 / z + std::log(0.5 * z) * i1 - cs;
}

void require_right_half(Complex z) {
  if (!(z.real() > 0.0))
    throw std::domain_error("bessel_K: argument must have Re z > 0");
}

// Hankel-form P/Q Chebyshev tables for J0/J1 on x >= 8: with u = 8/x and
// v = 2u^2 - 1,  J_nu(x) = sqrt(2/(pi x)) (P(v) cos w - u Q(v) sin w),
// w = x - (2 nu + 1) pi / 4.
inline constexpr double kChebP0[20] = {
    1.99892069869503741e+00,  -5.36522046813211724e-04, 3.07518478751947449e-06,
    -5.17059453760609752e-08, 1.63064646351513824e-09,  -7.86409137723706975e-11,
    5.16826238734919281e-12,  -4.30457886992539091e-13, 4.32659574315493468e-14,
    -5.06903409593506238e-15, 6.74807221572880888e-16,  -1.00115137233171941e-16,
    1.63059192291752052e-17,  -2.88086615532202747e-18, 5.46808233435302140e-19,
    -1.10620219215133496e-19, 2.36944724900737713e-20,  -5.34255435700641957e-21,
    1.25732913207105445e-21,  -2.90355956544915805e-22};
inline constexpr double kChebQ0[20] = {
    -3.11117092106740177e-02, 6.83851994261164931e-05,  -7.41449841106064689e-07,
    1.79724572479689917e-08,  -7.27191593686632009e-10, 4.22012190466873852e-11,
    -3.20674742099663483e-12, 3.00614512535170573e-13,  -3.33632818532241598e-14,
    4.25522504024514368e-15,  -6.09993013163095797e-16, 9.66212897003809840e-17,
    -1.66860652064939865e-17, 3.10824402474631223e-18,  -6.19111504528736165e-19,
    1.30914251686308907e-19,  -2.92108614147563896e-20, 6.84067185686747598e-21,
    -1.66699976395876516e-21, 3.96356641521063515e-22};
inline constexpr double kChebP1[20] = {
    2.00180608172002739e+00,  8.98989833085940830e-04,  -3.98728430048890841e-06,
    6.17763396064429884e-08,  -1.87189074910630669e-09, 8.81689865958233914e-11,
    -5.70486364039564476e-12, 4.69919551523054203e-13,  -4.68422378399048319e-14,
    5.45267489604453725e-15,  -7.22118084226877695e-16, 1.06676891141794607e-16,
    -1.73123132113814038e-17, 3.04929910508039766e-18,  -5.77242118905565177e-19,
    1.16505566146797000e-19,  -2.49037632939307428e-20, 5.60492412822433603e-21,
    -1.31692667581265139e-21, 3.03714827842110317e-22};
inline constexpr double kChebQ1[20] = {
    9.35555741390706463e-02,  -9.62772354915707965e-05, 9.13861525795545446e-07,
    -2.09597813840834240e-08, 8.22919332765055409e-10,  -4.68636368817694525e-11,
    3.51521879496860824e-12,  -3.26431567432789949e-13, 3.59677658291651740e-14,
    -4.56125239507696923e-15, 6.50828295777398045e-16,  -1.02691475315488320e-16,
    1.76763554795999941e-17,  -3.28345196250117007e-18, 6.52408037996566751e-19,
    -1.37657470420227532e-19, 3.06566198918993641e-20,  -7.16693609551667477e-21,
    1.74384210685278536e-21,  -4.14112953332642518e-22};

double clenshaw(const double* c, int n, double v) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = n - 1; k >= 1; --k) {
    const double t = 2.0 * v * b1 - b2 + c[k];
    b2 = b1;
    b1 = t;
  }
  return v * b1 - b2 + 0.5 * c[0];
}

double j_hankel(double x, const double* cp, const double* cq, double wshift) {
  const double u = 8.0 / x;
  const double v = 2.0 * u * u - 1.0;
  const double w = x - wshift;
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  return amp * (clenshaw(cp, 20, v) * std::cos(w) -
                u * clenshaw(cq, 20, v) * std::sin(w));
}

double j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, s = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -q / double(k * k);
    s += term;
    if (std::abs(term) < 1e-18) break;
  }
  return s;
}

double j1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x, s = term;
  for (int k = 1; k < 60; ++k) {
    term *= -q / double(k * (k + 1));
    s += term;
    if (std::abs(term) < 1e-18) break;
  }
  return s;
}

}  // namespace

Complex bessel_K0(Complex z) {
  require_right_half(z);
  return k01_use_series(z) ? k0_series(z) : k_sfraction(kSfracK0, z);
}

Complex bessel_K1(Complex z) {
  require_right_half(z);
  return k01_use_series(z) ? k1_series(z) : k_sfraction(kSfracK1, z);
}

std::vector<Complex> bessel_I_seq(int mmax, Complex z) {
  std::vector<Complex> out(mmax + 1);
  if (z == 0.0) {
    out[0] = 1.0;
    return out;
  }
  // Miller downward recurrence, normalized by e^z = I0 + 2 sum_{k>=1} I_k;
  // unlike the I0 power series, that sum never cancels catastrophically in
  // the right half-plane
  const int start = mmax + 24 + int(std::abs(z));
  Complex fp = 0.0, fc = 1e-30;
  Complex sum = 2.0 * fc;
  for (int m = start; m >= 1; --m) {
    const Complex fm = fp + (2.0 * m / z) * fc;
    fp = fc;
    fc = fm;
    // fc holds f_{m-1} now
    sum += (m == 1) ? fm : 2.0 * fm;
    if (m - 1 <= mmax) out[m - 1] = fm;
    if (std::abs(fc) > 1e250) {
      fp *= 1e-250;
      fc *= 1e-250;
      sum *= 1e-250;
      for (auto& v : out) v *= 1e-250;
    }
  }
  const Complex scale = std::exp(z) / sum;
  for (auto& v : out) v *= scale;
  for (auto& v : out)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::overflow_error("bessel_I: overflow");
  return out;
}

std::vector<Complex> bessel_K_seq(int mmax, Complex z) {
  require_right_half(z);
  std::vector<Complex> out(mmax + 1);
  out[0] = bessel_K0(z);
  if (mmax >= 1) out[1] = bessel_K1(z);
  for (int m = 1; m < mmax; ++m) out[m + 1] = out[m - 1] + (2.0 * m / z) * out[m];
  for (auto& v : out)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::overflow_error("bessel_K: overflow");
  return out;
}

Complex bessel_I(int m, Complex z) { return bessel_I_seq(m, z)[m]; }

Complex bessel_K(int m, Complex z) { return bessel_K_seq(m, z)[m]; }

double bessel_J0(double x) {
  if (x <= 8.0) return j0_series(x);
  return j_hankel(x, kChebP0, kChebQ0, 0.25 * std::numbers::pi);
}

double bessel_J1(double x) {
  if (x <= 8.0) return j1_series(x);
  return j_hankel(x, kChebP1, kChebQ1, 0.75 * std::numbers::pi);
}

}  // namespace cqwave
