#include "cqwave/cq.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cqwave/parallel.hpp"

namespace cqwave {
namespace {

// inverse DFT (positive-exponent, unnormalized): out[j] = sum_l in[l] zeta^{lj}
void idft(std::vector<Complex>& data, int howmany, int n) {
  fftw_plan plan = fftw_plan_many_dft(
      1, &n, howmany, reinterpret_cast<fftw_complex*>(data.data()), nullptr, 1,
      n, reinterpret_cast<fftw_complex*>(data.data()), nullptr, 1, n,
      FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

ContourParams default_contour(int N, double dt) {
  if (N < 0 || dt <= 0.0)
    throw std::invalid_argument("default_contour: N >= 0, dt > 0 required");
  const double u = 0.5 * std::numeric_limits<double>::epsilon();
  return {N, dt, std::exp(std::log(u) / (2.0 * N + 1.0))};
}

HerglotzTestParams herglotz_params(double sigma, double dt) {
  if (sigma <= 0.0 || dt <= 0.0)
    throw std::invalid_argument("herglotz_params: sigma, dt > 0 required");
  return {sigma, std::exp(-sigma * dt)};
}

std::vector<Complex> contour_frequencies(const GeneratingFunction& g,
                                         const ContourParams& p) {
  std::vector<Complex> s(p.N + 1);
  for (int l = 0; l <= p.N; ++l) {
    const double ang = -2.0 * std::numbers::pi * l / (p.N + 1);
    const Complex zeta = p.lambda * Complex(std::cos(ang), std::sin(ang));
    s[l] = eval_delta(g, zeta) / p.dt;
  }
  return s;
}

ScalarWeights scalar_weights(const std::function<Complex(Complex)>& kernel,
                             const GeneratingFunction& g,
                             const ContourParams& p, std::string kernel_tag) {
  const int n = p.N + 1;
  const std::vector<Complex> s = contour_frequencies(g, p);
  std::vector<Complex> data(n);
  double kmax = 0.0;
  for (int l = 0; l < n; ++l) {
    data[l] = kernel(s[l]);
    if (!std::isfinite(data[l].real()) || !std::isfinite(data[l].imag()))
      throw std::runtime_error("scalar_weights: non-finite kernel value");
    kmax = std::max(kmax, std::abs(data[l]));
  }
  // conjugate symmetry of the samples decides real-vs-complex output
  double asym = 0.0;
  for (int l = 1; l < n; ++l)
    asym = std::max(asym, std::abs(data[n - l] - std::conj(data[l])));
  const bool symmetric = asym <= 1e-13 * std::max(kmax, 1.0);

  idft(data, 1, n);
  ScalarWeights w;
  w.kernel_tag = std::move(kernel_tag);
  w.real_valued = symmetric;
  w.weights.resize(n);
  const double tol = 1e3 * std::pow(p.lambda, p.N + 1) * std::max(kmax, 1.0);
  double scale = 1.0;  // lambda^{-j}/(N+1)
  for (int j = 0; j < n; ++j) {
    Complex wj = data[j] * (scale / double(n));
    if (symmetric) {
      w.imag_residue = std::max(w.imag_residue, std::abs(wj.imag()) );
      wj = Complex(wj.real(), 0.0);
    }
    w.weights[j] = wj;
    scale /= p.lambda;
  }
  w.diagnostic = symmetric && w.imag_residue > tol;
  return w;
}

BlockWeights block_weights(
    const std::function<Eigen::MatrixXcd(Complex)>& assembler,
    const GeneratingFunction& g, const ContourParams& p, int num_threads,
    std::string kernel_tag) {
  const int n = p.N + 1;
  const std::vector<Complex> s = contour_frequencies(g, p);
  const int ndistinct = n / 2 + 1;  // l = 0..floor(n/2); rest by conjugation

  std::vector<Eigen::MatrixXcd> blocks(n);
  parallel_for(ndistinct, num_threads,
               [&](int l) { blocks[l] = assembler(s[l]); });
  const long rows = blocks[0].rows(), cols = blocks[0].cols();
  for (int l = 0; l < ndistinct; ++l)
    if (blocks[l].rows() != rows || blocks[l].cols() != cols)
      throw std::runtime_error("block_weights: shape mismatch across frequencies");
  for (int l = ndistinct; l < n; ++l) blocks[l] = blocks[n - l].conjugate();

  double kmax = 0.0;
  for (int l = 0; l < ndistinct; ++l) kmax = std::max(kmax, max_abs(blocks[l]));

  // entrywise inverse FFT: data laid out [entry][l]
  const long m2 = rows * cols;
  std::vector<Complex> data(std::size_t(m2) * n);
  for (int l = 0; l < n; ++l) {
    const Complex* b = blocks[l].data();
    for (long e = 0; e < m2; ++e) data[std::size_t(e) * n + l] = b[e];
  }
  blocks.clear();
  blocks.shrink_to_fit();
  idft(data, int(m2), n);

  BlockWeights w;
  w.kernel_tag = std::move(kernel_tag);
  w.weights.assign(n, Eigen::MatrixXd(rows, cols));
  const double tol = 1e3 * std::pow(p.lambda, p.N + 1) * std::max(kmax, 1.0);
  double scale = 1.0;
  for (int j = 0; j < n; ++j) {
    const double f = scale / double(n);
    double* out = w.weights[j].data();
    for (long e = 0; e < m2; ++e) {
      const Complex v = data[std::size_t(e) * n + j] * f;
      w.imag_residue = std::max(w.imag_residue, std::abs(v.imag()));
      out[e] = v.real();
    }
    scale /= p.lambda;
  }
  w.diagnostic = w.imag_residue > tol;
  return w;
}

Eigen::VectorXd apply_history(const BlockWeights& w,
                              const std::vector<Eigen::VectorXd>& x, int n) {
  if (n > int(w.weights.size()) - 1 || n > int(x.size()))
    throw std::out_of_range("apply_history: n out of range");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(w.weights[0].rows());
  for (int j = 0; j < n; ++j) acc += w.weights[n - j] * x[j];
  return acc;
}

double apply_history(const ScalarWeights& w, const std::vector<double>& x,
                     int n) {
  if (n > int(w.weights.size()) - 1 || n > int(x.size()))
    throw std::out_of_range("apply_history: n out of range");
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += w.weights[n - j].real() * x[j];
  return acc;
}

std::vector<double> delta_poly_coeffs(const GeneratingFunction& g) {
  if (g.kind == MethodKind::TR)
    throw std::invalid_argument("delta_poly_coeffs: TR symbol is rational");
  // expand (1-z)^k via binomials up to k = J+1
  const int J = g.kind == MethodKind::BDF2 ? 1 : int(g.ttr_coeffs.size()) + 1;
  std::vector<double> d(J + 2, 0.0);
  auto add_power = [&d](int k, double coef) {
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
      d[i] += coef * binom * (i % 2 ? -1.0 : 1.0);
      binom = binom * (k - i) / (i + 1);
    }
  };
  add_power(1, 1.0);
  add_power(2, 0.5);
  double scale = 0.25;
  for (std::size_t j = 0; j < g.ttr_coeffs.size(); ++j) {
    add_power(int(j) + 3, scale * g.ttr_coeffs[j]);
    scale *= 0.5;
  }
  return d;
}

namespace {

inline double zero_like(const double&) { return 0.0; }
inline Eigen::VectorXd zero_like(const Eigen::VectorXd& v) {
  return Eigen::VectorXd::Zero(v.size());
}

template <class Vec>
std::vector<Vec> derivative_impl(const GeneratingFunction& g, double dt,
                                 const std::vector<Vec>& x, int power) {
  if (power != 1 && power != -1)
    throw std::invalid_argument("discrete_derivative: power must be +-1");
  std::vector<Vec> y(x.size());
  if (x.empty()) return y;
  if (g.kind == MethodKind::TR) {
    if (power == 1) {
      // dt (y_n + y_{n-1}) = 2 (x_n - x_{n-1})
      y[0] = (2.0 / dt) * x[0];
      for (std::size_t n = 1; n < x.size(); ++n)
        y[n] = (2.0 / dt) * (x[n] - x[n - 1]) - y[n - 1];
    } else {
      // 2 (y_n - y_{n-1}) = dt (x_n + x_{n-1})
      y[0] = (0.5 * dt) * x[0];
      for (std::size_t n = 1; n < x.size(); ++n)
        y[n] = y[n - 1] + (0.5 * dt) * (x[n] + x[n - 1]);
    }
    return y;
  }
  const std::vector<double> d = delta_poly_coeffs(g);
  if (power == 1) {
    for (std::size_t n = 0; n < x.size(); ++n) {
      Vec acc = zero_like(x[0]);
      for (std::size_t j = 0; j < d.size() && j <= n; ++j)
        acc += d[j] * x[n - j];
      y[n] = (1.0 / dt) * acc;
    }
  } else {
    // d_0 y_n = dt x_n - sum_{j>=1} d_j y_{n-j}
    for (std::size_t n = 0; n < x.size(); ++n) {
      Vec acc = dt * x[n];
      for (std::size_t j = 1; j < d.size() && j <= n; ++j)
        acc -= d[j] * y[n - j];
      y[n] = acc / d[0];
    }
  }
  return y;
}

}  // namespace

std::vector<Eigen::VectorXd> discrete_derivative(
    const GeneratingFunction& g, double dt,
    const std::vector<Eigen::VectorXd>& x, int power) {
  return derivative_impl(g, dt, x, power);
}

std::vector<double> discrete_derivative(const GeneratingFunction& g, double dt,
                                        const std::vector<double>& x,
                                        int power) {
  return derivative_impl(g, dt, x, power);
}

}  // namespace cqwave
