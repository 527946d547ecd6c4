#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "cqwave/bem.hpp"
#include "cqwave/coupled.hpp"
#include "cqwave/fem.hpp"
#include "cqwave/mesh.hpp"

namespace cqwave {

/// Free-space radial wave with u(x,0) = exp(-2|x|^2), u_t(x,0) = 0:
///   u(r,t) = 1/4 int_0^inf e^{-k^2/8} J_0(kr) k cos(kt) dk.
/// The integral is truncated at k = 20 and evaluated panel-wise with
/// Gauss-Legendre, panel width <= pi/(2(r+t+1)); absolute accuracy ~1e-10.
double exact_disk_solution(double r, double t);

/// du/dr = -1/4 int_0^inf e^{-k^2/8} J_1(kr) k^2 cos(kt) dk, same
/// quadrature contract; returns 0 at r = 0.
double exact_disk_gradient(double r, double t);

/// Exterior incident field. PlaneWavePulse: u = g(t - delay - d.x) with the
/// Gaussian window g(tau) = exp(-pulse_a (tau - pulse_tc)^2). PointSourceSet:
/// a sum of causal 2D point sources
///   u_i(x,t) = int_0^{t-r_i} g(tau - t_i) / (2 pi sqrt((t-tau)^2 - r_i^2)) dtau,
/// r_i = |x - x_i|, evaluated after the substitution tau = (t-r_i) - sigma^2
/// which removes the endpoint singularity. firing[i] holds t_i.
struct IncidentField {
  enum class Kind { None, PlaneWavePulse, PointSourceSet };
  Kind kind = Kind::None;
  double pulse_a = 16.0;
  double pulse_tc = 2.0;
  Eigen::Vector2d direction{1.0, 0.0};
  double delay = 0.0;
  std::vector<Point2> sources;
  std::vector<double> firing;
};

double incident_value(const IncidentField& f, Point2 x, double t);
double incident_dt(const IncidentField& f, Point2 x, double t);
/// Normal derivative d u / d nu; for point sources this is
/// (du_i/dr) (x - x_i).nu / r_i summed over sources.
double incident_normal_derivative(const IncidentField& f, Point2 x, Point2 nu,
                                  double t);

/// Traces sampled at the panel midpoints: beta0 = trace of u, beta1 = normal
/// derivative, dt_beta0 = time derivative of the trace.
struct TraceSamples {
  Eigen::VectorXd beta0, beta1, dt_beta0;
};
TraceSamples incident_traces(const IncidentField& f, const BoundarySpaces& sp,
                             double t);

/// Installs beta0, dt_beta0, beta1 closures for the field on the problem
/// data (None leaves them untouched). Throws std::invalid_argument when a
/// point source lies inside or on the boundary loop.
void attach_incident_field(ProblemData& data, const IncidentField& field,
                           const BoundarySpaces& spaces);

/// Energy error against the nodal interpolant of the exact solution:
///   max_n [ |(e_n - e_{n-1})/dt|_{L2} + |grad (e_n + e_{n-1})/2|_{L2} ]
/// with e_n = u_n - I_h u(., n dt). The L2 norm uses ops.M1; the gradient
/// seminorm uses a unit-coefficient stiffness assembled on the mesh.
double energy_error(const std::vector<Eigen::VectorXd>& u, double dt,
                    const std::function<double(Point2, double)>& exact,
                    const TriangleMesh& mesh, const InteriorOperators& ops);

}  // namespace cqwave
