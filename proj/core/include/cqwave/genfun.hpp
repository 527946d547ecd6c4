#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "cqwave/specfun.hpp"

namespace cqwave {

enum class MethodKind { BDF2, TR, TTR };

/// Multistep symbol delta(zeta) of an A-stable second-order method.
/// BDF2: (1-z) + (1-z)^2/2.  TR: 2(1-z)/(1+z).
/// TTR:  (1-z) + (1-z)^2/2 + sum_{j=2}^J 2^{-j} c_j (1-z)^{j+1}, c_j in [0,1].
struct GeneratingFunction {
  MethodKind kind = MethodKind::BDF2;
  std::vector<double> ttr_coeffs;  // c_2..c_J; empty unless kind == TTR
  int order = 2;
};

GeneratingFunction bdf2();
GeneratingFunction trapezoidal();
/// Throws std::invalid_argument if any coefficient is outside [0, 1].
GeneratingFunction ttr(std::vector<double> coeffs);
/// The published J = 4 coefficients.
GeneratingFunction paper_ttr();

/// Coefficients of delta(e^{-z}) = a1 z + a2 z^2 + e3 z^3 + e4 z^4 + ...
/// a1 = 1 and a2 = 0 for every second-order symbol.
struct ExpansionReport {
  double a1 = 0.0;
  double a2 = 0.0;
  double e3 = 0.0;
  double e4 = 0.0;
  double error_constant = 0.0;  // |e3|
};

/// Throws std::domain_error at the TR pole zeta = -1.
Complex eval_delta(const GeneratingFunction& g, Complex zeta);

/// Fourier-coefficient extraction of the expansion on the circle |z| = 0.1;
/// relative accuracy ~1e-8 or better on e3, e4.
ExpansionReport consistency_expansion(const GeneratingFunction& g);

/// min over x_k = k pi/(n_samples-1), k = 0..n_samples-1, of
/// Re delta(e^{-i x_k}). TR is evaluated as 2 i tan(x/2), which makes the
/// minimum exactly 0 and needs no pole exclusion.
double check_a_stability(const GeneratingFunction& g, int n_samples);

/// Constrained maximization of the error-constant quality |1/e3| over
/// c_2..c_J in [0,1]^{J-1} subject to check_a_stability >= -1e-15.
/// Deterministic: fixed all-ones start, fixed grid diversification, fixed
/// iteration budget. A caller-supplied feasible start joins the candidate
/// set, so the result is never worse than it. Throws std::runtime_error if
/// the returned point fails the stability check.
GeneratingFunction design_ttr(
    int J, int n_samples,
    const std::optional<std::vector<double>>& start = std::nullopt);

/// delta(e^{i theta_k}), theta_k = 2 pi k / n ascending; for TR the sample
/// at theta = pi (the pole) is skipped.
std::vector<Complex> stability_region_boundary(const GeneratingFunction& g,
                                               int n);

}  // namespace cqwave
