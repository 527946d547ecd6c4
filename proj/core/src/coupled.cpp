#include "cqwave/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "cqwave/quadrature.hpp"

namespace cqwave {

namespace {

// 8-point Gauss rule mapped to the unit interval, shared by boundary loads.
const QuadratureRule& panel_rule() {
  static const QuadratureRule rule = [] {
    QuadratureRule r = gauss_legendre(8);
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      r.nodes[k] = 0.5 * (r.nodes[k] + 1.0);
      r.weights[k] *= 0.5;
    }
    return r;
  }();
  return rule;
}

// <fn(., t), z_i> over each panel.
Eigen::VectorXd p0_load(const BoundarySpaces& sp,
                        const std::function<double(Point2, double)>& fn,
                        double t) {
  const QuadratureRule& q = panel_rule();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(sp.panels());
  for (int i = 0; i < sp.panels(); ++i) {
    const double len = sp.length[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const double u = q.nodes[k] * len;
      const Point2 x{sp.loop[i][0] + u * sp.tangent[i][0],
                     sp.loop[i][1] + u * sp.tangent[i][1]};
      acc += q.weights[k] * len * fn(x, t);
    }
    load[i] = acc;
  }
  return load;
}

// <beta1(., t), trace of v_j> accumulated on the interior hat functions.
Eigen::VectorXd beta1_load(const CoupledSystem& sys, const ProblemData& data,
                           double t) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(sys.n_vertices());
  const QuadratureRule& q = panel_rule();
  const BoundarySpaces& sp = sys.spaces;
  const std::vector<int>& bv = sys.mesh->boundary_vertices;
  const int ne = sp.panels();
  for (int i = 0; i < ne; ++i) {
    const double len = sp.length[i];
    const Point2 nu = sp.normal[i];
    double la = 0.0, lb = 0.0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const double u = q.nodes[k];
      const Point2 x{sp.loop[i][0] + u * len * sp.tangent[i][0],
                     sp.loop[i][1] + u * len * sp.tangent[i][1]};
      const double v = q.weights[k] * len * data.beta1(x, nu, t);
      la += v * (1.0 - u);
      lb += v * u;
    }
    load[bv[i]] += la;
    load[bv[(i + 1) % ne]] += lb;
  }
  return load;
}

// <f(., t), v_j> by the 3-point edge-midpoint rule (matches assemble_interior).
Eigen::VectorXd f_load(const CoupledSystem& sys, const ProblemData& data,
                       double t) {
  const TriangleMesh& mesh = *sys.mesh;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(sys.n_vertices());
  for (const auto& tri : mesh.triangles) {
    const Point2& a = mesh.vertices[tri[0]];
    const Point2& b = mesh.vertices[tri[1]];
    const Point2& c = mesh.vertices[tri[2]];
    const double area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) -
                               (b[1] - a[1]) * (c[0] - a[0]));
    const Point2 mab{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    const Point2 mbc{0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])};
    const Point2 mca{0.5 * (c[0] + a[0]), 0.5 * (c[1] + a[1])};
    const double fab = data.f(mab, t), fbc = data.f(mbc, t),
                 fca = data.f(mca, t);
    const double w = area / 6.0;
    load[tri[0]] += w * (fab + fca);
    load[tri[1]] += w * (fab + fbc);
    load[tri[2]] += w * (fbc + fca);
  }
  return load;
}

struct StepLoads {
  Eigen::VectorXd rhs_int;  // interior known terms
  Eigen::VectorXd known_z;  // boundary z-row known terms
  Eigen::VectorXd known_w;  // boundary w-row known terms
};

StepLoads assemble_known(const CoupledSystem& sys, const TimeState& state,
                         const ProblemData& data) {
  const int n = state.n;
  const double t_n = n * sys.dt;
  const Eigen::VectorXd& u_n = state.u[n];
  const Eigen::VectorXd& u_prev = state.u[n - 1];

  StepLoads out;
  out.rhs_int = (sys.ops.M * (2.0 * u_n - u_prev)) / (sys.dt * sys.dt) -
                sys.ops.K * u_n;
  if (data.f) out.rhs_int += f_load(sys, data, t_n);
  if (data.beta1) out.rhs_int += beta1_load(sys, data, t_n);

  const int ne = sys.n_panels();
  const Eigen::VectorXd hist = apply_history(sys.weights, state.densities, n);
  out.known_z = -sys.dbeta0_loads[n] - hist.head(ne) -
                (0.5 / sys.dt) * (sys.ops.C * u_prev);
  out.known_w = -hist.tail(ne);
  return out;
}

}  // namespace

Eigen::VectorXd TimeState::phi(int j) const {
  return densities[j].head(densities[j].size() / 2);
}

Eigen::VectorXd TimeState::psi(int j) const {
  return densities[j].tail(densities[j].size() / 2);
}

std::pair<CoupledSystem, TimeState> initialize(
    const TriangleMesh& mesh_in, const CoefficientField& coeffs,
    const ProblemData& data, const GeneratingFunction& g, double T,
    double dt_override, int num_threads,
    std::optional<BemQuadrature> quad_override) {
  check_mesh(mesh_in);
  if (T < 0.0) throw std::invalid_argument("initialize: negative final time");

  CoupledSystem sys;
  sys.mesh = std::make_shared<TriangleMesh>(mesh_in);
  sys.ops = assemble_interior(*sys.mesh, coeffs);
  sys.spaces = make_boundary_spaces(*sys.mesh);
  sys.genfun = g;
  sys.quad = quad_override.value_or(
      g.kind == MethodKind::TR ? tr_quadrature() : BemQuadrature{});
  sys.cfl = cfl_timestep(sys.ops);
  sys.dt = dt_override > 0.0 ? dt_override : sys.cfl.dt;
  sys.cfl_violated = sys.dt > sys.cfl.dt * (1.0 + 1e-12);
  if (sys.cfl_violated)
    std::fprintf(stderr, "warning: dt = %.6g exceeds the CFL bound %.6g\n",
                 sys.dt, sys.cfl.dt);
  sys.T = T;
  sys.n_steps = std::max(1, static_cast<int>(std::ceil(T / sys.dt - 1e-12)));

  const int ne = sys.n_panels();
  const BoundarySpaces& sp = sys.spaces;
  const BemQuadrature quad = sys.quad;
  sys.weights = block_weights(
      [&sp, quad](Complex s) { return assemble_calderon(s, sp, quad).blocks; },
      g, default_contour(sys.n_steps, sys.dt), num_threads, "calderon");
  if (sys.weights.diagnostic)
    std::fprintf(stderr,
                 "warning: calderon weights imaginary residue %.3g (tag %s)\n",
                 sys.weights.imag_residue, sys.weights.kernel_tag.c_str());

  const Eigen::MatrixXd ct =
      Eigen::MatrixXd(SparseMat(sys.ops.C.transpose()));
  sys.minv_ct = sys.ops.M_factor->solve(ct);
  const Eigen::MatrixXd ibd = Eigen::MatrixXd(sys.ops.Ibd);
  sys.schur_matrix = sys.weights.weights[0];
  sys.schur_matrix.topLeftCorner(ne, ne) +=
      0.5 * sys.dt * (sys.ops.C * sys.minv_ct);
  sys.schur_matrix.topRightCorner(ne, ne) += 0.5 * ibd;
  sys.schur_matrix.bottomLeftCorner(ne, ne) -= 0.5 * ibd.transpose();
  sys.schur.compute(sys.schur_matrix);
  {
    const Eigen::VectorXd probe = Eigen::VectorXd::Ones(2 * ne);
    const Eigen::VectorXd sol = sys.schur.solve(probe);
    if (!sol.allFinite() ||
        (sys.schur_matrix * sol - probe).norm() > 1e-8 * probe.norm())
      throw std::runtime_error("initialize: Schur factorization failed");
  }

  const int nv = sys.n_vertices();
  Eigen::VectorXd u0h = Eigen::VectorXd::Zero(nv);
  if (data.u0.value) {
    if (!data.u0.grad)
      throw std::invalid_argument("initialize: u0 gradient missing");
    u0h = elliptic_projection(sys.ops, data.u0.value, data.u0.grad);
  }
  Eigen::VectorXd u1h = u0h;
  if (data.v0.value) {
    if (!data.v0.grad)
      throw std::invalid_argument("initialize: v0 gradient missing");
    u1h += sys.dt * elliptic_projection(sys.ops, data.v0.value, data.v0.grad);
  }
  if (data.lap_u0.value || data.f) {
    if (data.lap_u0.value && !data.lap_u0.grad)
      throw std::invalid_argument("initialize: lap_u0 gradient missing");
    auto wval = [&data, &coeffs](Point2 x) {
      const double c = coeffs.c(x);
      double v = data.lap_u0.value ? data.lap_u0.value(x) : 0.0;
      if (data.f) v += data.f(x, 0.0);
      return c * c * v;
    };
    auto wgrad = [&data, &coeffs](Point2 x) {
      const double c = coeffs.c(x);
      Eigen::Vector2d gv = Eigen::Vector2d::Zero();
      if (data.lap_u0.grad) gv = data.lap_u0.grad(x);
      return Eigen::Vector2d(c * c * gv);
    };
    u1h += 0.5 * sys.dt * sys.dt * elliptic_projection(sys.ops, wval, wgrad);
  }

  sys.dbeta0_loads.assign(sys.n_steps + 1, Eigen::VectorXd::Zero(ne));
  if (data.dt_beta0) {
    for (int m = 0; m <= sys.n_steps; ++m)
      sys.dbeta0_loads[m] = p0_load(sp, data.dt_beta0, m * sys.dt);
  } else if (data.beta0) {
    std::vector<Eigen::VectorXd> samples(sys.n_steps + 1);
    for (int m = 0; m <= sys.n_steps; ++m)
      samples[m] = p0_load(sp, data.beta0, m * sys.dt);
    sys.dbeta0_loads = discrete_derivative(g, sys.dt, samples, +1);
  }

  TimeState state;
  state.u = {u0h, u1h};
  state.densities = {Eigen::VectorXd::Zero(2 * ne)};
  state.energies = {discrete_energy(sys.ops, u1h, u0h, sys.dt)};
  state.n = 1;
  return {std::move(sys), std::move(state)};
}

void step(const CoupledSystem& sys, TimeState& state,
          const ProblemData& data) {
  if (state.n < 1 || state.n >= sys.n_steps)
    throw std::logic_error("step: index " + std::to_string(state.n) +
                           " out of range");
  const int ne = sys.n_panels();
  const StepLoads loads = assemble_known(sys, state, data);
  const Eigen::VectorXd minv_rhs = sys.ops.M_factor->solve(loads.rhs_int);
  Eigen::VectorXd rhs(2 * ne);
  rhs.head(ne) = loads.known_z + 0.5 * sys.dt * (sys.ops.C * minv_rhs);
  rhs.tail(ne) = loads.known_w;
  const Eigen::VectorXd dens = sys.schur.solve(rhs);
  const Eigen::VectorXd u_next =
      sys.dt * sys.dt * (minv_rhs - sys.minv_ct * dens.head(ne));
  if (!dens.allFinite() || !u_next.allFinite())
    throw std::runtime_error("step: non-finite state at n = " +
                             std::to_string(state.n));
  state.densities.push_back(dens);
  state.u.push_back(u_next);
  state.energies.push_back(
      discrete_energy(sys.ops, u_next, state.u[state.n], sys.dt));
  ++state.n;
}

RunResult run(const CoupledSystem& sys, TimeState& state,
              const ProblemData& data, double blow_up_factor) {
  RunResult res;
  const double e1 = state.energies.empty() ? 0.0 : state.energies.front();
  res.max_energy = std::abs(e1);
  while (state.n < sys.n_steps) {
    step(sys, state, data);
    // Past the CFL bound the energy form loses positivity; blow-up shows up
    // as |E_n| exploding with E_n typically negative.
    res.max_energy = std::max(res.max_energy, std::abs(state.energies.back()));
    if (blow_up_factor > 0.0 && e1 > 0.0 &&
        std::abs(state.energies.back()) > blow_up_factor * e1) {
      res.blew_up = true;
      break;
    }
  }
  return res;
}

MonolithicResult monolithic_step(const CoupledSystem& sys,
                                 const TimeState& state,
                                 const ProblemData& data) {
  const int nv = sys.n_vertices();
  const int ne = sys.n_panels();
  const StepLoads loads = assemble_known(sys, state, data);

  const int dim = nv + 2 * ne;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  a.topLeftCorner(nv, nv) =
      Eigen::MatrixXd(sys.ops.M) / (sys.dt * sys.dt);
  a.block(0, nv, nv, ne) = Eigen::MatrixXd(SparseMat(sys.ops.C.transpose()));
  a.block(nv, 0, ne, nv) = -(0.5 / sys.dt) * Eigen::MatrixXd(sys.ops.C);
  a.block(nv, nv, 2 * ne, 2 * ne) = sys.weights.weights[0];
  const Eigen::MatrixXd ibd = Eigen::MatrixXd(sys.ops.Ibd);
  a.block(nv, nv + ne, ne, ne) += 0.5 * ibd;
  a.block(nv + ne, nv, ne, ne) -= 0.5 * ibd.transpose();

  Eigen::VectorXd rhs(dim);
  rhs.head(nv) = loads.rhs_int;
  rhs.segment(nv, ne) = loads.known_z;
  rhs.tail(ne) = loads.known_w;

  const Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(rhs);
  if (!x.allFinite())
    throw std::runtime_error("monolithic_step: non-finite solution");
  return {x.head(nv), x.segment(nv, ne), x.tail(ne)};
}

double energy_identity_residual(const CoupledSystem& sys,
                                const TimeState& state) {
  double worst = 0.0;
  double scale = 0.0;
  for (int n = 1; n < state.n; ++n) {
    const Eigen::VectorXd conv =
        apply_history(sys.weights, state.densities, n) +
        sys.weights.weights[0] * state.densities[n];
    const double form = state.densities[n].dot(conv);
    const double ediff = (state.energies[n] - state.energies[n - 1]) / sys.dt;
    worst = std::max(worst, std::abs(ediff + form));
    scale = std::max({scale, std::abs(ediff), std::abs(form)});
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace cqwave
