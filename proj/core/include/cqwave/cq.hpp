#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "cqwave/genfun.hpp"

namespace cqwave {

/// Contour parameters of the convolution-quadrature weight approximation
///   omega_j(K) ~= (lambda^{-j}/(N+1)) sum_l K(delta(lambda zeta^{-l})/dt) zeta^{lj}.
struct ContourParams {
  int N = 0;        // weights omega_0..omega_N
  double dt = 1.0;  // time step
  double lambda = 0.5;  // contour radius, >= u^{1/(2N+1)} for unit roundoff u
};

/// lambda = u^{1/(2N+1)} exactly, u = 2^{-53}.
ContourParams default_contour(int N, double dt);

struct HerglotzTestParams {
  double sigma = 1.0;
  double rho = 0.5;  // e^{-sigma dt}, in (0, 1)
};
HerglotzTestParams herglotz_params(double sigma, double dt);

/// Scalar CQ weights. For conjugate-symmetric kernels (K(conj s) = conj K(s))
/// the inverse-FFT output is real up to contour error; the imaginary residue
/// is recorded and discarded. diagnostic is set when the residue exceeds
/// 1e3 * lambda^{N+1} * max_l |K(s_l)|.
struct ScalarWeights {
  std::vector<Complex> weights;
  std::string kernel_tag;
  bool real_valued = false;
  double imag_residue = 0.0;
  bool diagnostic = false;
};

/// Block-matrix CQ weights of a conjugate-symmetric matrix kernel; stored
/// real after residue extraction.
struct BlockWeights {
  std::vector<Eigen::MatrixXd> weights;
  std::string kernel_tag;
  double imag_residue = 0.0;
  bool diagnostic = false;
};

/// s_l = delta(lambda zeta_{N+1}^{-l})/dt, l = 0..N; Re s_l > 0.
std::vector<Complex> contour_frequencies(const GeneratingFunction& g,
                                         const ContourParams& p);

/// One length-(N+1) inverse FFT of the kernel samples. Throws on non-finite
/// kernel values.
ScalarWeights scalar_weights(const std::function<Complex(Complex)>& kernel,
                             const GeneratingFunction& g,
                             const ContourParams& p,
                             std::string kernel_tag = {});

/// Entrywise contour quadrature of a matrix-valued kernel. The assembler is
/// invoked exactly once per distinct frequency (conjugate symmetry
/// s_{N+1-l} = conj(s_l) halves the work) and may run on num_threads
/// concurrent workers; the result does not depend on num_threads. Throws on
/// shape mismatch across frequencies.
BlockWeights block_weights(
    const std::function<Eigen::MatrixXcd(Complex)>& assembler,
    const GeneratingFunction& g, const ContourParams& p, int num_threads = 1,
    std::string kernel_tag = {});

/// sum_{j=0}^{n-1} omega_{n-j} x_j (the history part of the convolution;
/// the j = n term is excluded). Requires n <= N.
Eigen::VectorXd apply_history(const BlockWeights& w,
                              const std::vector<Eigen::VectorXd>& x, int n);
double apply_history(const ScalarWeights& w, const std::vector<double>& x,
                     int n);

/// (partial_t^{dt})^{power} of a sequence, power in {-1, +1}; exact stencil
/// convolution (power +1) or forward substitution (power -1). TR uses its
/// one-step rational recurrences.
std::vector<Eigen::VectorXd> discrete_derivative(
    const GeneratingFunction& g, double dt,
    const std::vector<Eigen::VectorXd>& x, int power);
std::vector<double> discrete_derivative(const GeneratingFunction& g, double dt,
                                        const std::vector<double>& x,
                                        int power);

/// Coefficients d_0..d_{J+1} of the polynomial delta(zeta) (BDF2 and TTR);
/// throws for TR, whose symbol is rational.
std::vector<double> delta_poly_coeffs(const GeneratingFunction& g);

}  // namespace cqwave
