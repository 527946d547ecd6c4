#include "cqwave/bem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "cqwave/quadrature.hpp"

namespace cqwave {
namespace {

constexpr double kInv2Pi = 0.15915494309189533576888376337251;
constexpr double kEulerGamma = 0.57721566490153286060651209008240;

double dot(Point2 a, Point2 b) { return a[0] * b[0] + a[1] * b[1]; }
Point2 sub(Point2 a, Point2 b) { return {a[0] - b[0], a[1] - b[1]}; }
double norm2(Point2 a) { return std::sqrt(dot(a, a)); }

struct Panel {
  Point2 a;
  Point2 t;
  Point2 nu;
  double len;
  Point2 at(double u) const { return {a[0] + u * t[0], a[1] + u * t[1]}; }
};

Panel panel_of(const BoundarySpaces& sp, int j) {
  return {sp.loop[j], sp.tangent[j], sp.normal[j], sp.length[j]};
}

QuadratureRule unit_rule(int n) {
  QuadratureRule g = gauss_legendre(n);
  for (auto& x : g.nodes) x = 0.5 * (x + 1.0);
  for (auto& w : g.weights) w *= 0.5;
  return g;
}

// K0(s r) + log r; finite as r -> 0 with limit -log(s/2) - gamma.
Complex smooth_sl(Complex s, Complex log_s_half, double r) {
  const Complex z = s * r;
  if (std::abs(z) < 0.5) {
    const Complex q = 0.25 * z * z;
    Complex i0(1.0, 0.0);
    Complex i0m1(0.0, 0.0);
    Complex hsum(0.0, 0.0);
    Complex term(1.0, 0.0);
    double hk = 0.0;
    for (int k = 1; k <= 26; ++k) {
      term *= q / double(k * k);
      hk += 1.0 / k;
      i0 += term;
      i0m1 += term;
      hsum += hk * term;
      if (std::abs(term) < 1e-18) break;
    }
    return -(log_s_half + kEulerGamma) * i0 - std::log(r) * i0m1 + hsum;
  }
  return bessel_K0(z) + std::log(r);
}

// (K1(z) - 1/z)/z - log(r)/2 at z = s r; finite as r -> 0. Together with
// s K1(s r)/r = 1/r^2 + s^2 ((1/2) log r + this) it splits the double-layer
// kernel into analytically integrable and smooth parts.
Complex smooth_dl(Complex s, Complex log_s_half, double r) {
  const Complex z = s * r;
  if (std::abs(z) < 0.5) {
    const Complex q = 0.25 * z * z;
    Complex t(1.0, 0.0);
    Complex tm1(0.0, 0.0);
    Complex term(1.0, 0.0);
    double psi1 = -kEulerGamma;
    double psi2 = 1.0 - kEulerGamma;
    Complex ssum(psi1 + psi2, 0.0);
    for (int k = 1; k <= 26; ++k) {
      term *= q / double(k * (k + 1));
      psi1 += 1.0 / k;
      psi2 += 1.0 / (k + 1);
      t += term;
      tm1 += term;
      ssum += (psi1 + psi2) * term;
      if (std::abs(term) < 1e-18) break;
    }
    return 0.5 * log_s_half * t + 0.5 * std::log(r) * tm1 - 0.25 * ssum;
  }
  return (bessel_K1(z) - 1.0 / z) / z - 0.5 * std::log(r);
}

// Antiderivative of log(v^2 + d^2).
double log_anti(double v, double d) {
  const double r2 = v * v + d * d;
  if (r2 == 0.0) return 0.0;
  double out = v * std::log(r2) - 2.0 * v;
  if (d != 0.0) out += 2.0 * d * std::atan(v / d);
  return out;
}

// Antiderivative of v log(v^2 + d^2).
double vlog_anti(double v, double d) {
  const double r2 = v * v + d * d;
  if (r2 == 0.0) return 0.0;
  return 0.5 * r2 * (std::log(r2) - 1.0);
}

// Integral of (b0 + b1 v)/(v^2 + d^2) over [v0, v1]. With d = 0 the b0 part
// is only reachable when [v0, v1] does not straddle 0 (the straddling case
// has b0 = 0 exactly on straight panels).
double rational_int(double b0, double b1, double v0, double v1, double d) {
  double out = 0.0;
  const double q0 = v0 * v0 + d * d;
  const double q1 = v1 * v1 + d * d;
  if (b1 != 0.0) out += 0.5 * b1 * std::log(q1 / q0);
  if (b0 != 0.0) {
    if (d != 0.0)
      out += (b0 / d) * (std::atan(v1 / d) - std::atan(v0 / d));
    else if (v0 * v1 > 0.0)
      out += b0 * (1.0 / v0 - 1.0 / v1);
  }
  return out;
}

using Cells = std::vector<std::array<double, 2>>;

// Dyadic cells of [from, to] (either order) accumulating toward `from`.
void graded_side(double from, double to, int levels, Cells& cells) {
  double far = to;
  for (int k = 0; k < levels; ++k) {
    const double mid = from + 0.5 * (far - from);
    cells.push_back({std::min(mid, far), std::max(mid, far)});
    far = mid;
  }
  cells.push_back({std::min(from, far), std::max(from, far)});
}

Cells graded_cells(double len, double target, int levels, bool both_ends) {
  Cells cells;
  if (both_ends) {
    graded_side(0.0, 0.5 * len, levels, cells);
    graded_side(len, 0.5 * len, levels, cells);
    return cells;
  }
  const double margin = 1e-12 * len;
  if (target <= margin) {
    graded_side(0.0, len, levels, cells);
  } else if (target >= len - margin) {
    graded_side(len, 0.0, levels, cells);
  } else {
    graded_side(target, 0.0, levels, cells);
    graded_side(target, len, levels, cells);
  }
  return cells;
}

// Closest parameter pair between two panels (Ericson's segment-segment
// closest point).
std::pair<double, double> seg_closest(const Panel& pi, const Panel& pj) {
  const Point2 d1{pi.t[0] * pi.len, pi.t[1] * pi.len};
  const Point2 d2{pj.t[0] * pj.len, pj.t[1] * pj.len};
  const Point2 r = sub(pi.a, pj.a);
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  const double c = dot(d1, r);
  const double b = dot(d1, d2);
  const double denom = a * e - b * b;
  double u = (denom != 0.0) ? std::clamp((b * f - c * e) / denom, 0.0, 1.0)
                            : 0.0;
  double v = (b * u + f) / e;
  if (v < 0.0) {
    v = 0.0;
    u = std::clamp(-c / a, 0.0, 1.0);
  } else if (v > 1.0) {
    v = 1.0;
    u = std::clamp((b - c) / a, 0.0, 1.0);
  }
  return {u * pi.len, v * pj.len};
}

double pair_distance(const Panel& pi, const Panel& pj) {
  const auto [ui, uj] = seg_closest(pi, pj);
  return norm2(sub(pi.at(ui), pj.at(uj)));
}

struct InnerMoments {
  Complex s0{0.0, 0.0}, s1{0.0, 0.0};  // single layer against (1, u)
  Complex d0{0.0, 0.0}, d1{0.0, 0.0};  // double layer, inner-panel normal
  Complex t0{0.0, 0.0};                // double layer, outer-point normal
};

// Exact-log/rational split of the inner integral over panel pj for a fixed
// outer point x. want_dl = false on the self pair, where both double-layer
// kernels vanish identically.
InnerMoments near_inner(Complex s, Complex log_s_half, const Panel& pj,
                        Point2 x, Point2 nu_x, bool want_dl,
                        const QuadratureRule& g01, int levels) {
  const Point2 w = sub(x, pj.a);
  const double a = dot(w, pj.t);
  const double scale = pj.len + std::abs(a);
  double ds = dot(w, pj.nu);
  if (std::abs(ds) < 1e-13 * scale) ds = 0.0;
  const double d = std::abs(ds);
  const double v0 = -a;
  const double v1 = pj.len - a;

  // (y - x).nu_x = b0 + b1 (u - a) along the panel.
  double b1 = dot(pj.t, nu_x);
  double b0 = -dot(w, nu_x) + a * b1;
  if (std::abs(b1) < 1e-15) b1 = 0.0;
  if (std::abs(b0) < 1e-13 * scale) b0 = 0.0;

  const double f0 = log_anti(v1, d) - log_anti(v0, d);
  const double f1 = vlog_anti(v1, d) - vlog_anti(v0, d);

  const bool dl = want_dl && (ds != 0.0 || b0 != 0.0 || b1 != 0.0);
  Complex sum_f(0.0, 0.0), sum_fu(0.0, 0.0);
  Complex sum_g(0.0, 0.0), sum_gu(0.0, 0.0);
  const double ustar = std::clamp(a, 0.0, pj.len);
  for (const auto& cell : graded_cells(pj.len, ustar, levels, false)) {
    const double h = cell[1] - cell[0];
    for (size_t k = 0; k < g01.nodes.size(); ++k) {
      const double u = cell[0] + h * g01.nodes[k];
      const double wq = h * g01.weights[k];
      const double vv = u - a;
      const double r = std::sqrt(vv * vv + d * d);
      const Complex fs = smooth_sl(s, log_s_half, r);
      sum_f += wq * fs;
      sum_fu += wq * u * fs;
      if (dl) {
        const Complex gs = smooth_dl(s, log_s_half, r);
        sum_g += wq * gs;
        sum_gu += wq * u * gs;
      }
    }
  }

  InnerMoments m;
  m.s0 = kInv2Pi * (sum_f - 0.5 * f0);
  m.s1 = kInv2Pi * (sum_fu - 0.5 * (f1 + a * f0));
  if (!dl) return m;
  const Complex s2 = s * s;
  if (ds != 0.0) {
    const double g0 = rational_int(1.0, 0.0, v0, v1, d);
    const double g1 = rational_int(0.0, 1.0, v0, v1, d);
    m.d0 = (ds * kInv2Pi) * (g0 + s2 * (0.25 * f0 + sum_g));
    m.d1 = (ds * kInv2Pi) *
           ((g1 + a * g0) + s2 * (0.25 * (f1 + a * f0) + sum_gu));
  }
  if (b0 != 0.0 || b1 != 0.0) {
    const double rat = rational_int(b0, b1, v0, v1, d);
    m.t0 = kInv2Pi * (rat + s2 * (0.25 * (b0 * f0 + b1 * f1) + b0 * sum_g +
                                  b1 * (sum_gu - a * sum_g)));
  }
  return m;
}

}  // namespace

BoundarySpaces make_polygon_spaces(std::vector<Point2> loop) {
  const int n = static_cast<int>(loop.size());
  if (n < 3)
    throw std::invalid_argument("make_polygon_spaces: need >= 3 vertices");
  BoundarySpaces sp;
  sp.loop = std::move(loop);
  sp.tangent.reserve(n);
  sp.normal.reserve(n);
  sp.length.reserve(n);
  double area2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point2 a = sp.loop[i];
    const Point2 b = sp.loop[(i + 1) % n];
    const double len = norm2(sub(b, a));
    if (!(len > 0.0))
      throw std::invalid_argument("make_polygon_spaces: zero-length panel");
    sp.tangent.push_back({(b[0] - a[0]) / len, (b[1] - a[1]) / len});
    sp.normal.push_back({sp.tangent.back()[1], -sp.tangent.back()[0]});
    sp.length.push_back(len);
    area2 += a[0] * b[1] - b[0] * a[1];
  }
  if (!(area2 > 0.0))
    throw std::invalid_argument(
        "make_polygon_spaces: loop must be counter-clockwise");
  return sp;
}

BoundarySpaces make_boundary_spaces(const TriangleMesh& mesh) {
  std::vector<Point2> loop;
  loop.reserve(mesh.boundary_vertices.size());
  for (int v : mesh.boundary_vertices) loop.push_back(mesh.vertices[v]);
  return make_polygon_spaces(std::move(loop));
}

BoundarySpaces make_circle_spaces(int n, double R) {
  if (n < 3) throw std::invalid_argument("make_circle_spaces: need n >= 3");
  if (!(R > 0.0)) throw std::invalid_argument("make_circle_spaces: R <= 0");
  std::vector<Point2> loop(n);
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * i / n;
    loop[i] = {R * std::cos(th), R * std::sin(th)};
  }
  return make_polygon_spaces(std::move(loop));
}

BemQuadrature tr_quadrature() { return {24, 24, 4}; }

BoundaryOperators assemble_operators(Complex s, const BoundarySpaces& sp,
                                     const BemQuadrature& q) {
  if (!(s.real() > 0.0))
    throw std::domain_error("assemble_operators: Re s must be positive");
  const int n = sp.panels();
  const QuadratureRule gfar = unit_rule(q.n_gauss);
  const QuadratureRule gnear = unit_rule(q.n_near);
  const Complex log_s_half = std::log(0.5 * s);

  BoundaryOperators out;
  out.s = s;
  out.V = Eigen::MatrixXcd::Zero(n, n);
  out.K = Eigen::MatrixXcd::Zero(n, n);
  out.Kt = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd w2 = Eigen::MatrixXcd::Zero(n, n);

  std::vector<Panel> panels(n);
  for (int i = 0; i < n; ++i) panels[i] = panel_of(sp, i);

  for (int i = 0; i < n; ++i) {
    const Panel& pi = panels[i];
    const int id = i, ia = (i + 1) % n;
    for (int j = 0; j < n; ++j) {
      const Panel& pj = panels[j];
      const int jd = j, ja = (j + 1) % n;
      const double nudot = dot(pi.nu, pj.nu);

      const bool self = (i == j);
      const bool next = (j == (i + 1) % n);
      const bool prev = (i == (j + 1) % n);
      bool near = self || next || prev;
      double target = 0.0;
      if (self) {
        // handled below
      } else if (next) {
        target = pi.len;
      } else if (prev) {
        target = 0.0;
      } else {
        const auto [ui, uj] = seg_closest(pi, pj);
        const double dist = norm2(sub(pi.at(ui), pj.at(uj)));
        if (dist < 0.5 * std::max(pi.len, pj.len)) {
          near = true;
          target = ui;
        }
      }

      if (near) {
        for (const auto& cell : graded_cells(pi.len, target, q.levels, self)) {
          const double h = cell[1] - cell[0];
          for (size_t k = 0; k < gnear.nodes.size(); ++k) {
            const double ux = cell[0] + h * gnear.nodes[k];
            const double wx = h * gnear.weights[k];
            const Point2 x = pi.at(ux);
            const InnerMoments m = near_inner(s, log_s_half, pj, x, pi.nu,
                                              !self, gnear, q.levels);
            const double hx0 = 1.0 - ux / pi.len;
            const double hx1 = ux / pi.len;
            out.V(i, j) += wx * m.s0;
            out.K(i, jd) += wx * (m.d0 - m.d1 / pj.len);
            out.K(i, ja) += wx * (m.d1 / pj.len);
            out.Kt(id, j) += wx * hx0 * m.t0;
            out.Kt(ia, j) += wx * hx1 * m.t0;
            const Complex w2d = nudot * (m.s0 - m.s1 / pj.len);
            const Complex w2a = nudot * (m.s1 / pj.len);
            w2(id, jd) += wx * hx0 * w2d;
            w2(id, ja) += wx * hx0 * w2a;
            w2(ia, jd) += wx * hx1 * w2d;
            w2(ia, ja) += wx * hx1 * w2a;
          }
        }
      } else {
        for (size_t kx = 0; kx < gfar.nodes.size(); ++kx) {
          const double ux = pi.len * gfar.nodes[kx];
          const double wx = pi.len * gfar.weights[kx];
          const Point2 x = pi.at(ux);
          const double hx0 = 1.0 - gfar.nodes[kx];
          const double hx1 = gfar.nodes[kx];
          for (size_t ky = 0; ky < gfar.nodes.size(); ++ky) {
            const double uy = pj.len * gfar.nodes[ky];
            const double wy = pj.len * gfar.weights[ky];
            const Point2 y = pj.at(uy);
            const Point2 rv = sub(x, y);
            const double r = norm2(rv);
            const Complex z = s * r;
            const double ww = wx * wy;
            const Complex k0 = kInv2Pi * bessel_K0(z);
            const Complex k1fac = (s * kInv2Pi / r) * bessel_K1(z);
            const double hy0 = 1.0 - gfar.nodes[ky];
            const double hy1 = gfar.nodes[ky];
            out.V(i, j) += ww * k0;
            const Complex dl = k1fac * dot(rv, pj.nu);
            out.K(i, jd) += ww * dl * hy0;
            out.K(i, ja) += ww * dl * hy1;
            const Complex tl = -k1fac * dot(rv, pi.nu);
            out.Kt(id, j) += ww * tl * hx0;
            out.Kt(ia, j) += ww * tl * hx1;
            const Complex w2k = nudot * k0;
            w2(id, jd) += ww * w2k * hx0 * hy0;
            w2(id, ja) += ww * w2k * hx0 * hy1;
            w2(ia, jd) += ww * w2k * hx1 * hy0;
            w2(ia, ja) += ww * w2k * hx1 * hy1;
          }
        }
      }
    }
  }

  const Eigen::MatrixXcd dmap = arclength_derivative(sp).cast<Complex>();
  out.W = dmap.transpose() * out.V * dmap + (s * s) * w2;
  return out;
}

// Dedicated single-layer sweep: only the K0 moment, and only the upper
// triangle of the symmetric form, mirrored. Quadrature subdivisions follow
// the (i, j) ordering, so entries agree with the fused assembly to
// quadrature-reordering level, not bitwise.
Eigen::MatrixXcd assemble_V(Complex s, const BoundarySpaces& sp,
                            const BemQuadrature& q) {
  if (!(s.real() > 0.0))
    throw std::domain_error("assemble_V: Re s must be positive");
  const int n = sp.panels();
  const QuadratureRule gfar = unit_rule(q.n_gauss);
  const QuadratureRule gnear = unit_rule(q.n_near);
  const Complex log_s_half = std::log(0.5 * s);
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, n);

  std::vector<Panel> panels(n);
  for (int i = 0; i < n; ++i) panels[i] = panel_of(sp, i);

  for (int i = 0; i < n; ++i) {
    const Panel& pi = panels[i];
    for (int j = i; j < n; ++j) {
      const Panel& pj = panels[j];
      const bool self = (i == j);
      const bool next = (j == (i + 1) % n);
      const bool prev = (i == (j + 1) % n);
      bool near = self || next || prev;
      double target = 0.0;
      if (self) {
        // graded toward both ends below
      } else if (next) {
        target = pi.len;
      } else if (prev) {
        target = 0.0;
      } else {
        const auto [ui, uj] = seg_closest(pi, pj);
        const double dist = norm2(sub(pi.at(ui), pj.at(uj)));
        if (dist < 0.5 * std::max(pi.len, pj.len)) {
          near = true;
          target = ui;
        }
      }

      Complex acc(0.0, 0.0);
      if (near) {
        for (const auto& cell : graded_cells(pi.len, target, q.levels, self)) {
          const double h = cell[1] - cell[0];
          for (size_t k = 0; k < gnear.nodes.size(); ++k) {
            const double ux = cell[0] + h * gnear.nodes[k];
            const double wx = h * gnear.weights[k];
            const InnerMoments m = near_inner(s, log_s_half, pj, pi.at(ux),
                                              pi.nu, false, gnear, q.levels);
            acc += wx * m.s0;
          }
        }
      } else {
        for (size_t kx = 0; kx < gfar.nodes.size(); ++kx) {
          const double ux = pi.len * gfar.nodes[kx];
          const double wx = pi.len * gfar.weights[kx];
          const Point2 x = pi.at(ux);
          for (size_t ky = 0; ky < gfar.nodes.size(); ++ky) {
            const double uy = pj.len * gfar.nodes[ky];
            const double wy = pj.len * gfar.weights[ky];
            const double r = norm2(sub(x, pj.at(uy)));
            acc += (wx * wy * kInv2Pi) * bessel_K0(s * r);
          }
        }
      }
      v(i, j) = acc;
      if (!self) v(j, i) = acc;
    }
  }
  return v;
}
Eigen::MatrixXcd assemble_K(Complex s, const BoundarySpaces& sp,
                            const BemQuadrature& q) {
  return assemble_operators(s, sp, q).K;
}
Eigen::MatrixXcd assemble_Kt(Complex s, const BoundarySpaces& sp,
                             const BemQuadrature& q) {
  return assemble_operators(s, sp, q).Kt;
}
Eigen::MatrixXcd assemble_W(Complex s, const BoundarySpaces& sp,
                            const BemQuadrature& q) {
  return assemble_operators(s, sp, q).W;
}

CalderonBlock assemble_calderon(Complex s, const BoundarySpaces& sp,
                                const BemQuadrature& q) {
  const BoundaryOperators op = assemble_operators(s, sp, q);
  const int n = sp.panels();
  CalderonBlock out;
  out.s = s;
  out.blocks.resize(2 * n, 2 * n);
  out.blocks.topLeftCorner(n, n) = s * op.V;
  out.blocks.topRightCorner(n, n) = op.K;
  out.blocks.bottomLeftCorner(n, n) = -op.Kt;
  out.blocks.bottomRightCorner(n, n) = op.W / s;
  return out;
}

Eigen::MatrixXd boundary_pairing(const BoundarySpaces& sp) {
  const int n = sp.panels();
  Eigen::MatrixXd ibd = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    ibd(i, i) += 0.5 * sp.length[i];
    ibd(i, (i + 1) % n) += 0.5 * sp.length[i];
  }
  return ibd;
}

Eigen::MatrixXd arclength_derivative(const BoundarySpaces& sp) {
  const int n = sp.panels();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    d(j, j) -= 1.0 / sp.length[j];
    d(j, (j + 1) % n) += 1.0 / sp.length[j];
  }
  return d;
}

}  // namespace cqwave
