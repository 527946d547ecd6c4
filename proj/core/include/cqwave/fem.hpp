#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>

#include "cqwave/mesh.hpp"

namespace cqwave {

/// Wave speed c (0 < c <= c1) and diffusion tensor kappa (SPD, eigenvalues
/// in [kappa0, kappa1]), evaluated pointwise.
struct CoefficientField {
  std::function<double(Point2)> c = [](Point2) { return 1.0; };
  std::function<Eigen::Matrix2d(Point2)> kappa = [](Point2) {
    return Eigen::Matrix2d::Identity();
  };
};

using SparseMat = Eigen::SparseMatrix<double>;

/// P1 interior operators. M is the c^{-2}-weighted mass, M1 the unweighted
/// mass, K the kappa-stiffness. C pairs boundary P0 edge functions with
/// interior P1 traces (rows follow boundary_edges order); Ibd pairs boundary
/// P0 with boundary P1 (columns follow boundary_vertices order).
struct InteriorOperators {
  SparseMat M, M1, K;
  SparseMat C;    // n_edges x n_vertices
  SparseMat Ibd;  // n_edges x n_boundary_vertices
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMat>> M_factor;
  const TriangleMesh* mesh = nullptr;
  CoefficientField coeffs;
};

/// Element integration by the 3-point edge-midpoint rule (degree-2 exact;
/// exact for affine kappa). Throws on degenerate triangles.
InteriorOperators assemble_interior(const TriangleMesh& mesh,
                                    const CoefficientField& coeffs);

/// Elliptic projector R_h: solves (K + M1) x = load with the load assembled
/// by a degree-4 (6-point) rule from u and grad_u.
Eigen::VectorXd elliptic_projection(
    const InteriorOperators& ops, const std::function<double(Point2)>& u,
    const std::function<Eigen::Vector2d(Point2)>& grad_u);

/// Largest eigenvalue of the pencil (K, M) by power iteration (relative
/// change < 1e-8) and the leapfrog step bound dt = 2/sqrt(lambda_max).
struct CflEstimate {
  double lambda_max = 0.0;
  double dt = 0.0;
};
CflEstimate cfl_timestep(const InteriorOperators& ops);

/// E_n = 1/2 d^T M d / dt^2 + 1/2 u_n^T K u_prev, d = u_n - u_prev.
double discrete_energy(const InteriorOperators& ops,
                       const Eigen::VectorXd& u_n,
                       const Eigen::VectorXd& u_prev, double dt);

}  // namespace cqwave
