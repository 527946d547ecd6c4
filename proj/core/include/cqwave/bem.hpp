#pragma once

#include <Eigen/Dense>

#include "cqwave/mesh.hpp"
#include "cqwave/specfun.hpp"

namespace cqwave {

/// Closed polygonal boundary carrying the two trace spaces: P0 (one DOF per
/// panel) and P1 (one DOF per loop vertex). Panel j runs from loop vertex j
/// to loop vertex (j+1) mod n; the loop is counter-clockwise, so the outward
/// normal is the panel tangent rotated by -pi/2.
struct BoundarySpaces {
  std::vector<Point2> loop;
  std::vector<Point2> tangent;  // unit, per panel
  std::vector<Point2> normal;   // outward unit, per panel
  std::vector<double> length;   // per panel
  int panels() const { return static_cast<int>(loop.size()); }
};

/// Boundary loop of a mesh; P0/P1 DOF order matches the C and Ibd matrices
/// of assemble_interior.
BoundarySpaces make_boundary_spaces(const TriangleMesh& mesh);

/// Counter-clockwise polygon given by its vertices (first one not repeated).
/// Throws std::invalid_argument on fewer than 3 vertices, a zero-length
/// panel, or clockwise orientation.
BoundarySpaces make_polygon_spaces(std::vector<Point2> loop);

/// Regular n-gon inscribed in the circle |x| = R.
BoundarySpaces make_circle_spaces(int n, double R);

/// Panel-pair quadrature: regular pairs use n_gauss points per panel;
/// self/adjacent/close pairs split off the -log r and 1/r^2 kernel parts
/// (integrated analytically on the inner panel) and use n_near points per
/// dyadically graded cell, `levels` grading levels toward the near point,
/// for the smooth remainder.
struct BemQuadrature {
  int n_gauss = 8;
  int n_near = 16;
  int levels = 4;
};

/// Escalated rule for trapezoidal-rule contours, whose frequencies reach
/// O(dt^{-2}): 24 points on regular and near panels alike.
BemQuadrature tr_quadrature();

/// Galerkin matrices of the four boundary operators at one frequency,
/// Re s > 0:
///   V : P0xP0  <z_i, V z_j>,    kernel (1/2pi) K0(s r)
///   K : P0xP1  <z_i, K psi_j>,  kernel (s/2pi) K1(s r) (x-y).nu_y / r
///   Kt: P1xP0  <psi_i, Kt z_j>, same kernel with the roles of x and y
///                               exchanged (normal at the test point)
///   W : P1xP1  Maue form <V psi', w'> + s^2 <V (psi nu), (w nu)>
struct BoundaryOperators {
  Complex s;
  Eigen::MatrixXcd V, K, Kt, W;
};

/// Fused assembly: one kernel evaluation per quadrature node pair feeds all
/// four matrices. K and Kt use independent quadrature roles, so Kt matches
/// K^T only to quadrature accuracy.
BoundaryOperators assemble_operators(Complex s, const BoundarySpaces& sp,
                                     const BemQuadrature& q = {});

Eigen::MatrixXcd assemble_V(Complex s, const BoundarySpaces& sp,
                            const BemQuadrature& q = {});
Eigen::MatrixXcd assemble_K(Complex s, const BoundarySpaces& sp,
                            const BemQuadrature& q = {});
Eigen::MatrixXcd assemble_Kt(Complex s, const BoundarySpaces& sp,
                             const BemQuadrature& q = {});
Eigen::MatrixXcd assemble_W(Complex s, const BoundarySpaces& sp,
                            const BemQuadrature& q = {});

/// B_h(s) = [[s V, K], [-Kt, s^{-1} W]]; P0 DOFs first, then P1 DOFs.
struct CalderonBlock {
  Complex s;
  Eigen::MatrixXcd blocks;
};
CalderonBlock assemble_calderon(Complex s, const BoundarySpaces& sp,
                                const BemQuadrature& q = {});

/// P0xP1 pairing <z_i, psi_j>; equals the Ibd matrix of assemble_interior
/// when the spaces come from the same mesh.
Eigen::MatrixXd boundary_pairing(const BoundarySpaces& sp);

/// Arclength derivative P1 -> P0: (D psi)_j = (psi_{j+1} - psi_j) / len_j.
Eigen::MatrixXd arclength_derivative(const BoundarySpaces& sp);

}  // namespace cqwave
