#include "cqwave/fem.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cqwave {
namespace {

struct Element {
  Eigen::Matrix<double, 2, 3> grad;  // gradients of the three hat functions
  double area = 0.0;
  Point2 p[3];
};

Element element_geometry(const TriangleMesh& mesh, const std::array<int, 3>& t) {
  Element e;
  for (int k = 0; k < 3; ++k) e.p[k] = mesh.vertices[t[k]];
  const double det = (e.p[1][0] - e.p[0][0]) * (e.p[2][1] - e.p[0][1]) -
                     (e.p[1][1] - e.p[0][1]) * (e.p[2][0] - e.p[0][0]);
  if (!(det > 0.0)) throw std::runtime_error("assemble: degenerate triangle");
  e.area = 0.5 * det;
  for (int k = 0; k < 3; ++k) {
    const auto& pj = e.p[(k + 1) % 3];
    const auto& pk = e.p[(k + 2) % 3];
    e.grad.col(k) << (pj[1] - pk[1]) / det, (pk[0] - pj[0]) / det;
  }
  return e;
}

Point2 edge_midpoint(const Point2& a, const Point2& b) {
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

// degree-4 (6-point) Dunavant rule in barycentric coordinates
struct Deg4Rule {
  double w;
  double l[3];
};
constexpr Deg4Rule kDeg4[6] = {
    {0.223381589678011, {0.445948490915965, 0.445948490915965, 0.108103018168070}},
    {0.223381589678011, {0.445948490915965, 0.108103018168070, 0.445948490915965}},
    {0.223381589678011, {0.108103018168070, 0.445948490915965, 0.445948490915965}},
    {0.109951743655322, {0.091576213509771, 0.091576213509771, 0.816847572980459}},
    {0.109951743655322, {0.091576213509771, 0.816847572980459, 0.091576213509771}},
    {0.109951743655322, {0.816847572980459, 0.091576213509771, 0.091576213509771}}};

}  // namespace

InteriorOperators assemble_interior(const TriangleMesh& mesh,
                                    const CoefficientField& coeffs) {
  const int nv = int(mesh.vertices.size());
  const int ne = int(mesh.boundary_edges.size());
  std::vector<Eigen::Triplet<double>> tm, tm1, tk;
  for (const auto& t : mesh.triangles) {
    const Element e = element_geometry(mesh, t);
    // 3-point edge-midpoint rule; hat values there are (1/2, 1/2, 0) patterns
    Point2 mid[3] = {edge_midpoint(e.p[0], e.p[1]), edge_midpoint(e.p[1], e.p[2]),
                     edge_midpoint(e.p[2], e.p[0])};
    double winv2[3];  // c^{-2} at midpoints
    Eigen::Matrix2d kappa_bar = Eigen::Matrix2d::Zero();
    for (int q = 0; q < 3; ++q) {
      const double c = coeffs.c(mid[q]);
      winv2[q] = 1.0 / (c * c);
      kappa_bar += coeffs.kappa(mid[q]);
    }
    kappa_bar *= e.area / 3.0;
    // hat i is 1/2 on the two midpoints of edges adjacent to vertex i
    auto hat = [](int i, int q) {
      return (q == i || q == (i + 2) % 3) ? 0.5 : 0.0;
    };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double mw = 0.0, m1 = 0.0;
        for (int q = 0; q < 3; ++q) {
          const double hij = hat(i, q) * hat(j, q);
          mw += winv2[q] * hij;
          m1 += hij;
        }
        tm.emplace_back(t[i], t[j], mw * e.area / 3.0);
        tm1.emplace_back(t[i], t[j], m1 * e.area / 3.0);
        tk.emplace_back(t[i], t[j], e.grad.col(i).dot(kappa_bar * e.grad.col(j)));
      }
  }
  InteriorOperators ops;
  ops.mesh = &mesh;
  ops.coeffs = coeffs;
  ops.M.resize(nv, nv);
  ops.M1.resize(nv, nv);
  ops.K.resize(nv, nv);
  ops.M.setFromTriplets(tm.begin(), tm.end());
  ops.M1.setFromTriplets(tm1.begin(), tm1.end());
  ops.K.setFromTriplets(tk.begin(), tk.end());

  std::vector<Eigen::Triplet<double>> tc, ti;
  std::vector<int> bindex(nv, -1);
  for (int i = 0; i < ne; ++i) bindex[mesh.boundary_vertices[i]] = i;
  for (int i = 0; i < ne; ++i) {
    const auto& e = mesh.boundary_edges[i];
    const auto& a = mesh.vertices[e[0]];
    const auto& b = mesh.vertices[e[1]];
    const double half = 0.5 * std::hypot(b[0] - a[0], b[1] - a[1]);
    tc.emplace_back(i, e[0], half);
    tc.emplace_back(i, e[1], half);
    ti.emplace_back(i, bindex[e[0]], half);
    ti.emplace_back(i, bindex[e[1]], half);
  }
  ops.C.resize(ne, nv);
  ops.Ibd.resize(ne, ne);  // boundary P1 count equals edge count on one loop
  ops.C.setFromTriplets(tc.begin(), tc.end());
  ops.Ibd.setFromTriplets(ti.begin(), ti.end());

  ops.M_factor = std::make_shared<Eigen::SimplicialLDLT<SparseMat>>();
  ops.M_factor->compute(ops.M);
  if (ops.M_factor->info() != Eigen::Success)
    throw std::runtime_error("assemble_interior: mass factorization failed");
  return ops;
}

Eigen::VectorXd elliptic_projection(
    const InteriorOperators& ops, const std::function<double(Point2)>& u,
    const std::function<Eigen::Vector2d(Point2)>& grad_u) {
  const TriangleMesh& mesh = *ops.mesh;
  // load_i = <kappa grad u, grad v_i> + <u, v_i>, degree-4 rule
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.vertices.size());
  for (const auto& t : mesh.triangles) {
    const Element e = element_geometry(mesh, t);
    for (const auto& q : kDeg4) {
      Point2 x = {q.l[0] * e.p[0][0] + q.l[1] * e.p[1][0] + q.l[2] * e.p[2][0],
                  q.l[0] * e.p[0][1] + q.l[1] * e.p[1][1] + q.l[2] * e.p[2][1]};
      const double wq = q.w * e.area;
      const double uq = u(x);
      const Eigen::Vector2d kg = ops.coeffs.kappa(x) * grad_u(x);
      for (int i = 0; i < 3; ++i)
        load[t[i]] += wq * (kg.dot(e.grad.col(i)) + uq * q.l[i]);
    }
  }
  SparseMat A = ops.K + ops.M1;
  Eigen::SimplicialLDLT<SparseMat> solver(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("elliptic_projection: factorization failed");
  Eigen::VectorXd x = solver.solve(load);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("elliptic_projection: solve failed");
  return x;
}

CflEstimate cfl_timestep(const InteriorOperators& ops) {
  const long n = ops.M.rows();
  Eigen::VectorXd x(n);
  for (long i = 0; i < n; ++i) x[i] = std::sin(double(i) + 1.0);
  x /= std::sqrt(x.dot(ops.M * x));
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd y = ops.M_factor->solve(ops.K * x);
    const double raw = std::sqrt(y.dot(ops.M * y));
    if (raw == 0.0) throw std::runtime_error("cfl_timestep: zero iterate");
    y /= raw;
    const double next = y.dot(ops.K * y) / y.dot(ops.M * y);
    const bool done = std::abs(next - lambda) <= 1e-8 * std::abs(next);
    lambda = next;
    x.swap(y);
    if (done && it > 2) {
      return {lambda, 2.0 / std::sqrt(lambda)};
    }
  }
  throw std::runtime_error("cfl_timestep: power iteration did not converge");
}

double discrete_energy(const InteriorOperators& ops,
                       const Eigen::VectorXd& u_n,
                       const Eigen::VectorXd& u_prev, double dt) {
  const Eigen::VectorXd d = u_n - u_prev;
  return 0.5 * d.dot(ops.M * d) / (dt * dt) + 0.5 * u_n.dot(ops.K * u_prev);
}

}  // namespace cqwave
