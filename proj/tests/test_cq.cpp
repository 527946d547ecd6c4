#include <atomic>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "cqwave/cq.hpp"
#include "cqwave/genfun.hpp"
#include "doctest.h"

using cqwave::Complex;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

// Polynomial coefficients of delta(zeta) computed by direct expansion,
// independent of delta_poly_coeffs.
std::vector<double> expand_delta(const cqwave::GeneratingFunction& g) {
  // (1 - z)^{k} coefficients via repeated convolution with (1, -1)
  auto one_minus_pow = [](int k) {
    std::vector<double> c{1.0};
    for (int i = 0; i < k; ++i) {
      std::vector<double> next(c.size() + 1, 0.0);
      for (size_t j = 0; j < c.size(); ++j) {
        next[j] += c[j];
        next[j + 1] -= c[j];
      }
      c = std::move(next);
    }
    return c;
  };
  std::vector<double> out(2 + g.ttr_coeffs.size() + 1, 0.0);
  auto add = [&](const std::vector<double>& p, double w) {
    for (size_t j = 0; j < p.size(); ++j) out[j] += w * p[j];
  };
  add(one_minus_pow(1), 1.0);
  add(one_minus_pow(2), 0.5);
  for (size_t j = 0; j < g.ttr_coeffs.size(); ++j) {
    int jj = static_cast<int>(j) + 2;
    add(one_minus_pow(jj + 1), std::pow(2.0, -jj) * g.ttr_coeffs[j]);
  }
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

}  // namespace

TEST_CASE("default contour radius") {
  auto p = cqwave::default_contour(128, 0.05);
  CHECK(p.N == 128);
  CHECK(p.dt == 0.05);
  CHECK(p.lambda == doctest::Approx(std::pow(2.0, -53.0 / 257.0)).epsilon(1e-15));
}

TEST_CASE("contour frequencies live in the right half-plane") {
  auto g = cqwave::bdf2();
  auto p = cqwave::default_contour(16, 0.1);
  auto s = cqwave::contour_frequencies(g, p);
  REQUIRE(s.size() == 17);
  for (const auto& v : s) CHECK(v.real() > 0.0);
  // l = 0 sits on the positive real axis
  CHECK(std::abs(s[0].imag()) < 1e-14);
  CHECK(s[0].real() > 0.0);
  for (int l = 1; l <= 16; ++l)
    CHECK(std::abs(s[17 - l] - std::conj(s[l])) < 1e-12 * std::abs(s[l]));
}

TEST_CASE("differentiation weights of the polynomial symbols") {
  const double dt = 0.05;
  const int N = 128;
  auto p = cqwave::default_contour(N, dt);
  const double tol = 10.0 * std::pow(p.lambda, N + 1);

  for (auto g : {cqwave::bdf2(), cqwave::paper_ttr()}) {
    auto w = cqwave::scalar_weights([](Complex s) { return s; }, g, p, "s");
    REQUIRE(w.weights.size() == static_cast<size_t>(N + 1));
    CHECK(w.real_valued);
    auto poly = cqwave::delta_poly_coeffs(g);
    for (int j = 0; j <= N; ++j) {
      double expect = j < static_cast<int>(poly.size()) ? poly[j] / dt : 0.0;
      CHECK(std::abs(w.weights[j] - expect) * dt <= tol);
    }
  }
}

TEST_CASE("differentiation weights of the trapezoidal symbol") {
  const double dt = 0.1;
  const int N = 64;
  auto g = cqwave::trapezoidal();
  auto p = cqwave::default_contour(N, dt);
  auto s = cqwave::contour_frequencies(g, p);
  double maxk = 0.0;
  for (const auto& v : s) maxk = std::max(maxk, std::abs(v));
  const double tol = 10.0 * std::pow(p.lambda, N + 1) * maxk * dt;

  auto w = cqwave::scalar_weights([](Complex z) { return z; }, g, p, "s");
  for (int j = 0; j <= N; ++j) {
    double expect = (j == 0 ? 2.0 : 4.0 * ((j % 2) ? -1.0 : 1.0)) / dt;
    CHECK(std::abs(w.weights[j] - expect) <= tol);
  }
}

TEST_CASE("composition s times 1/s reproduces the identity") {
  const double dt = 0.05;
  const int N = 128;
  auto p = cqwave::default_contour(N, dt);
  const double tol = 10.0 * std::pow(p.lambda, N + 1);

  // polynomial symbols: the differentiation weights terminate, so the
  // convolution is alias-free up to the 1/s tail
  for (auto g : {cqwave::bdf2(), cqwave::paper_ttr()}) {
    auto wd = cqwave::scalar_weights([](Complex s) { return s; }, g, p, "s");
    auto wi =
        cqwave::scalar_weights([](Complex s) { return 1.0 / s; }, g, p, "1/s");
    for (int n = 0; n <= N; ++n) {
      Complex conv = 0.0;
      for (int j = 0; j <= n; ++j) conv += wd.weights[j] * wi.weights[n - j];
      double expect = (n == 0) ? 1.0 : 0.0;
      CHECK(std::abs(conv - expect) <= tol);
    }
  }
}

TEST_CASE("delta polynomial coefficients") {
  auto pb = cqwave::delta_poly_coeffs(cqwave::bdf2());
  REQUIRE(pb.size() == 3);
  CHECK(pb[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(pb[1] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(pb[2] == doctest::Approx(0.5).epsilon(1e-15));

  auto g = cqwave::paper_ttr();
  auto got = cqwave::delta_poly_coeffs(g);
  auto want = expand_delta(g);
  REQUIRE(got.size() == want.size());
  for (size_t j = 0; j < got.size(); ++j)
    CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-13));

  CHECK_THROWS(cqwave::delta_poly_coeffs(cqwave::trapezoidal()));
}

TEST_CASE("history application excludes the diagonal term") {
  auto g = cqwave::bdf2();
  auto p = cqwave::default_contour(8, 0.5);
  auto bw = cqwave::block_weights(
      [](Complex s) {
        MatrixXcd m(1, 1);
        m(0, 0) = s;
        return m;
      },
      g, p, 1, "s");
  std::vector<VectorXd> x;
  for (int i = 0; i < 3; ++i) {
    VectorXd v(1);
    v[0] = 1.0 + i;
    x.push_back(v);
  }
  VectorXd h2 = cqwave::apply_history(bw, x, 2);
  double manual = bw.weights[2](0, 0) * x[0][0] + bw.weights[1](0, 0) * x[1][0];
  CHECK(h2[0] == doctest::Approx(manual).epsilon(1e-14));
  VectorXd h0 = cqwave::apply_history(bw, x, 0);
  CHECK(h0[0] == 0.0);
}

TEST_CASE("block weights match scalar weights entrywise") {
  auto g = cqwave::paper_ttr();
  auto p = cqwave::default_contour(24, 0.2);
  auto assembler = [](Complex s) {
    MatrixXcd m(2, 2);
    m << s, Complex(1.0), Complex(0.0), 1.0 / s;
    return m;
  };
  auto bw = cqwave::block_weights(assembler, g, p, 1, "mix");
  auto ws = cqwave::scalar_weights([](Complex s) { return s; }, g, p);
  auto wi = cqwave::scalar_weights([](Complex s) { return 1.0 / s; }, g, p);
  for (int j = 0; j <= 24; ++j) {
    // FFT rounding in either path is amplified by lambda^{-j} after the
    // radius-lambda rescaling, so the two results drift apart at large j
    double tol = 5e-15 * std::pow(p.lambda, -double(j)) + 1e-12;
    CHECK(std::abs(bw.weights[j](0, 0) - ws.weights[j].real()) < tol);
    CHECK(std::abs(bw.weights[j](1, 1) - wi.weights[j].real()) < tol);
    double expect01 = (j == 0) ? 1.0 : 0.0;
    CHECK(std::abs(bw.weights[j](0, 1) - expect01) < 1e-10);
    CHECK(std::abs(bw.weights[j](1, 0)) < 1e-12);
  }
}

TEST_CASE("block weights are thread-count independent and call-efficient") {
  auto g = cqwave::bdf2();
  auto p = cqwave::default_contour(16, 0.1);
  std::atomic<int> calls{0};
  auto assembler = [&calls](Complex s) {
    ++calls;
    MatrixXcd m(2, 2);
    m << s, s * s, 1.0 / s, Complex(1.0);
    return m;
  };
  auto w1 = cqwave::block_weights(assembler, g, p, 1, "k");
  int calls_single = calls.exchange(0);
  auto w2 = cqwave::block_weights(assembler, g, p, 3, "k");
  int calls_threaded = calls.load();

  // conjugate symmetry halves the distinct frequencies
  CHECK(calls_single <= 16 / 2 + 2);
  CHECK(calls_threaded == calls_single);
  REQUIRE(w1.weights.size() == w2.weights.size());
  for (size_t j = 0; j < w1.weights.size(); ++j)
    CHECK((w1.weights[j] - w2.weights[j]).norm() == 0.0);
}

TEST_CASE("discrete derivative round-trips") {
  std::mt19937 rng(777u);
  std::normal_distribution<double> dist;
  const double dt = 0.25;
  std::vector<double> x(20);
  for (auto& v : x) v = dist(rng);

  for (auto g : {cqwave::bdf2(), cqwave::trapezoidal(), cqwave::paper_ttr()}) {
    auto anti = cqwave::discrete_derivative(g, dt, x, -1);
    auto back = cqwave::discrete_derivative(g, dt, anti, +1);
    REQUIRE(back.size() == x.size());
    for (size_t i = 0; i < x.size(); ++i)
      CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-10));
  }
}

TEST_CASE("discrete derivative of a ramp (polynomial symbols)") {
  const double dt = 0.125;
  std::vector<double> ramp(12);
  for (size_t i = 0; i < ramp.size(); ++i) ramp[i] = dt * double(i);
  for (auto g : {cqwave::bdf2(), cqwave::paper_ttr()}) {
    auto d = cqwave::discrete_derivative(g, dt, ramp, +1);
    // exact derivative from step J+1 onward (startup weights clear)
    for (size_t i = 6; i < d.size(); ++i)
      CHECK(d[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("vector discrete derivative matches the scalar path") {
  const double dt = 0.5;
  auto g = cqwave::bdf2();
  std::vector<double> xs{0.3, -1.2, 2.0, 0.7, -0.4};
  std::vector<VectorXd> xv;
  for (double v : xs) {
    VectorXd e(2);
    e << v, 2.0 * v;
    xv.push_back(e);
  }
  auto ds = cqwave::discrete_derivative(g, dt, xs, -1);
  auto dv = cqwave::discrete_derivative(g, dt, xv, -1);
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK(dv[i][0] == doctest::Approx(ds[i]).epsilon(1e-14));
    CHECK(dv[i][1] == doctest::Approx(2.0 * ds[i]).epsilon(1e-13));
  }
}

TEST_CASE("herglotz parameters") {
  auto hp = cqwave::herglotz_params(2.0, 0.25);
  CHECK(hp.sigma == 2.0);
  CHECK(hp.rho == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("weights of a terminating kernel are exactly real") {
  auto g = cqwave::bdf2();
  auto p = cqwave::default_contour(32, 0.1);
  auto w = cqwave::scalar_weights([](Complex s) { return s * s; }, g, p, "s^2");
  CHECK(w.real_valued);
  CHECK(w.imag_residue <= 1e-8 * std::abs(w.weights[0]));
  CHECK_FALSE(w.diagnostic);
}
