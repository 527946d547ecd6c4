#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cqwave/bem.hpp"
#include "cqwave/cq.hpp"
#include "cqwave/fem.hpp"
#include "cqwave/genfun.hpp"
#include "cqwave/mesh.hpp"

namespace cqwave {

/// Initial datum together with its gradient. A null value means identically
/// zero; a non-null value requires a non-null gradient (the elliptic
/// projection load needs both).
struct InitialData {
  std::function<double(Point2)> value;
  std::function<Eigen::Vector2d(Point2)> grad;
};

/// Data of the transmission problem. Null functions mean identically zero.
/// beta1 receives the evaluation point, the outward panel normal, and the
/// time. When dt_beta0 is null but beta0 is present, the sampled beta0 loads
/// are differentiated by the CQ discrete derivative. lap_u0 is
/// div(kappa grad u0); the u_1 Taylor load freezes c and f spatially when
/// forming its gradient term.
struct ProblemData {
  std::function<double(Point2, double)> f;
  std::function<double(Point2, double)> beta0;
  std::function<double(Point2, double)> dt_beta0;
  std::function<double(Point2, Point2, double)> beta1;
  InitialData u0, v0, lap_u0;
};

/// Assembled coupled solver: interior operators, Calderon-block CQ weights
/// omega_0..omega_N, and the factorized Schur matrix
///   [[(dt/2) C M^{-1} C^T, 1/2 Ibd], [-1/2 Ibd^T, 0]] + omega_0,
/// which agrees with eliminating u_{n+1} from the per-step block system.
/// The implicit block is the contour-computed omega_0, so the per-step
/// energy identity holds exactly in the discrete algebra.
struct CoupledSystem {
  std::shared_ptr<const TriangleMesh> mesh;
  BoundarySpaces spaces;
  InteriorOperators ops;
  GeneratingFunction genfun;
  BemQuadrature quad;
  BlockWeights weights;
  double T = 0.0;
  double dt = 0.0;
  int n_steps = 0;  // trajectory u_0..u_{n_steps}
  CflEstimate cfl;
  bool cfl_violated = false;
  Eigen::MatrixXd minv_ct;  // dense M^{-1} C^T, reused by every step
  Eigen::MatrixXd schur_matrix;
  Eigen::PartialPivLU<Eigen::MatrixXd> schur;
  std::vector<Eigen::VectorXd> dbeta0_loads;  // P0-tested d/dt beta0 per grid time
  int n_vertices() const { return static_cast<int>(mesh->vertices.size()); }
  int n_panels() const { return spaces.panels(); }
};

/// Trajectory. u holds u_0..u_n; densities[j] stacks (phi_j; psi_j) for
/// j = 0..n-1 with densities[0] = 0; energies holds E_1..E_n.
struct TimeState {
  std::vector<Eigen::VectorXd> u;
  std::vector<Eigen::VectorXd> densities;
  std::vector<double> energies;
  int n = 1;
  Eigen::VectorXd phi(int j) const;
  Eigen::VectorXd psi(int j) const;
};

/// Builds operators, CQ weights for N = ceil(T/dt) steps, the factorized
/// Schur matrix, and the initial pair u_0 = R_h u0,
/// u_1 = u_0 + dt R_h v0 + dt^2/2 R_h(c^2 (div(kappa grad u0) + f(0))).
/// dt_override = 0 takes the CFL step dt = 2/sqrt(lambda_max); a larger
/// override is accepted with a warning on stderr and cfl_violated set.
/// quad_override replaces the method's default boundary quadrature.
std::pair<CoupledSystem, TimeState> initialize(
    const TriangleMesh& mesh, const CoefficientField& coeffs,
    const ProblemData& data, const GeneratingFunction& g, double T,
    double dt_override = 0.0, int num_threads = 1,
    std::optional<BemQuadrature> quad_override = std::nullopt);

/// One step n -> n+1 (requires 1 <= n <= n_steps-1): assembles the known
/// terms, solves the Schur system for (phi_n, psi_n), recovers
/// u_{n+1} = dt^2 M^{-1}(interior known - C^T phi_n), appends E_{n+1}.
/// Throws std::runtime_error on non-finite results.
void step(const CoupledSystem& sys, TimeState& state, const ProblemData& data);

struct RunResult {
  bool blew_up = false;
  double max_energy = 0.0;  // largest |E_n| seen
};

/// Steps until n = n_steps. blow_up_factor > 0 stops early once
/// |E_n| > blow_up_factor * E_1 and reports blew_up; past the CFL bound the
/// discrete energy loses positivity, so the explosion is tracked in
/// magnitude.
RunResult run(const CoupledSystem& sys, TimeState& state,
              const ProblemData& data, double blow_up_factor = 0.0);

/// Direct solve of the full (interior + z + w) linear system at the current
/// step, without advancing the state. Oracle for the Schur elimination.
struct MonolithicResult {
  Eigen::VectorXd u_next, phi, psi;
};
MonolithicResult monolithic_step(const CoupledSystem& sys,
                                 const TimeState& state,
                                 const ProblemData& data);

/// max_n |(E_{n+1}-E_n)/dt + <dens_n, sum_{j<=n} omega_{n-j} dens_j>|
/// over the completed steps, relative to the largest term magnitude.
/// Zero sources assumed (the identity drops the load terms).
double energy_identity_residual(const CoupledSystem& sys,
                                const TimeState& state);

}  // namespace cqwave
