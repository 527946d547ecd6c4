#include "cqwave/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cqwave/quadrature.hpp"
#include "cqwave/specfun.hpp"

namespace cqwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 12-point Gauss rule mapped to the unit interval.
const QuadratureRule& unit_rule() {
  static const QuadratureRule rule = [] {
    QuadratureRule r = gauss_legendre(12);
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      r.nodes[k] = 0.5 * (r.nodes[k] + 1.0);
      r.weights[k] *= 0.5;
    }
    return r;
  }();
  return rule;
}

double pulse(const IncidentField& f, double tau) {
  const double arg = tau - f.pulse_tc;
  return std::exp(-f.pulse_a * arg * arg);
}

double pulse_deriv(const IncidentField& f, double tau) {
  const double arg = tau - f.pulse_tc;
  return -2.0 * f.pulse_a * arg * std::exp(-f.pulse_a * arg * arg);
}

struct SourceEval {
  double value = 0.0, dt = 0.0, dr = 0.0;
};

// One causal point source with window g(tau) = exp(-a (tau - tc)^2) fired at
// time ti, seen at distance r > 0. After tau = (t-r) - sigma^2 the density is
//   u = (1/pi) int_0^sqrt(t-r) g(t - r - sigma^2 - ti) / sqrt(sigma^2 + 2r).
// The time and radial derivatives pick up a boundary term g(-ti) from the
// moving limit. Panels uniform in tau keep the Gaussian resolved.
SourceEval eval_point_source(double a, double tc, double ti, double r,
                             double t) {
  SourceEval out;
  const double b2 = t - r;
  if (b2 <= 0.0) return out;
  if (b2 - ti - tc <= -8.0 / std::sqrt(a)) return out;
  const double b = std::sqrt(b2);

  const double gb = std::exp(-a * (ti + tc) * (ti + tc));
  const double bnd = gb / (2.0 * b * std::sqrt(t + r));
  out.dt = bnd;
  out.dr = -bnd;

  const int npanel = static_cast<int>(std::ceil(2.0 * b2 * std::sqrt(a))) + 4;
  const QuadratureRule& q = unit_rule();
  for (int p = 0; p < npanel; ++p) {
    const double s_lo =
        std::sqrt(b2 * (1.0 - static_cast<double>(p + 1) / npanel));
    const double s_hi = std::sqrt(b2 * (1.0 - static_cast<double>(p) / npanel));
    const double len = s_hi - s_lo;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const double sg = s_lo + q.nodes[k] * len;
      const double w = q.weights[k] * len;
      const double arg = b2 - sg * sg - ti - tc;
      const double g = std::exp(-a * arg * arg);
      const double gp = -2.0 * a * arg * g;
      const double root = std::sqrt(sg * sg + 2.0 * r);
      out.value += w * g / root;
      out.dt += w * gp / root;
      out.dr += w * (-gp / root - g / (root * root * root));
    }
  }
  out.value /= kPi;
  out.dt /= kPi;
  out.dr /= kPi;
  return out;
}

double distance(Point2 x, Point2 y) {
  return std::hypot(x[0] - y[0], x[1] - y[1]);
}

bool inside_polygon(const std::vector<Point2>& loop, Point2 p) {
  bool in = false;
  const int n = static_cast<int>(loop.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    if ((loop[i][1] > p[1]) != (loop[j][1] > p[1])) {
      const double xint = loop[j][0] + (loop[i][0] - loop[j][0]) *
                                           (p[1] - loop[j][1]) /
                                           (loop[i][1] - loop[j][1]);
      if (p[0] < xint) in = !in;
    }
  }
  return in;
}

double boundary_distance(const BoundarySpaces& sp, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sp.panels(); ++i) {
    const Point2& a = sp.loop[i];
    const double dx = sp.length[i] * sp.tangent[i][0];
    const double dy = sp.length[i] * sp.tangent[i][1];
    double s = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) /
               (dx * dx + dy * dy);
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::hypot(p[0] - a[0] - s * dx,
                                     p[1] - a[1] - s * dy));
  }
  return best;
}

}  // namespace

double exact_disk_solution(double r, double t) {
  const double kmax = 20.0;
  const int np = static_cast<int>(
      std::ceil(kmax * 2.0 * (r + t + 1.0) / kPi));
  const double h = kmax / np;
  const QuadratureRule& q = unit_rule();
  double acc = 0.0;
  for (int p = 0; p < np; ++p) {
    const double k_lo = h * p;
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
      const double k = k_lo + q.nodes[j] * h;
      acc += q.weights[j] * h * std::exp(-k * k / 8.0) * bessel_J0(k * r) * k *
             std::cos(k * t);
    }
  }
  return 0.25 * acc;
}

double exact_disk_gradient(double r, double t) {
  if (r == 0.0) return 0.0;
  const double kmax = 20.0;
  const int np = static_cast<int>(
      std::ceil(kmax * 2.0 * (r + t + 1.0) / kPi));
  const double h = kmax / np;
  const QuadratureRule& q = unit_rule();
  double acc = 0.0;
  for (int p = 0; p < np; ++p) {
    const double k_lo = h * p;
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
      const double k = k_lo + q.nodes[j] * h;
      acc += q.weights[j] * h * std::exp(-k * k / 8.0) * bessel_J1(k * r) * k *
             k * std::cos(k * t);
    }
  }
  return -0.25 * acc;
}

double incident_value(const IncidentField& f, Point2 x, double t) {
  switch (f.kind) {
    case IncidentField::Kind::None:
      return 0.0;
    case IncidentField::Kind::PlaneWavePulse:
      return pulse(f, t - f.delay - f.direction[0] * x[0] -
                          f.direction[1] * x[1]);
    case IncidentField::Kind::PointSourceSet: {
      double acc = 0.0;
      for (std::size_t i = 0; i < f.sources.size(); ++i)
        acc += eval_point_source(f.pulse_a, f.pulse_tc, f.firing[i],
                                 distance(x, f.sources[i]), t)
                   .value;
      return acc;
    }
  }
  return 0.0;
}

double incident_dt(const IncidentField& f, Point2 x, double t) {
  switch (f.kind) {
    case IncidentField::Kind::None:
      return 0.0;
    case IncidentField::Kind::PlaneWavePulse:
      return pulse_deriv(f, t - f.delay - f.direction[0] * x[0] -
                                f.direction[1] * x[1]);
    case IncidentField::Kind::PointSourceSet: {
      double acc = 0.0;
      for (std::size_t i = 0; i < f.sources.size(); ++i)
        acc += eval_point_source(f.pulse_a, f.pulse_tc, f.firing[i],
                                 distance(x, f.sources[i]), t)
                   .dt;
      return acc;
    }
  }
  return 0.0;
}

double incident_normal_derivative(const IncidentField& f, Point2 x, Point2 nu,
                                  double t) {
  switch (f.kind) {
    case IncidentField::Kind::None:
      return 0.0;
    case IncidentField::Kind::PlaneWavePulse: {
      const double dn = f.direction[0] * nu[0] + f.direction[1] * nu[1];
      return -dn * pulse_deriv(f, t - f.delay - f.direction[0] * x[0] -
                                      f.direction[1] * x[1]);
    }
    case IncidentField::Kind::PointSourceSet: {
      double acc = 0.0;
      for (std::size_t i = 0; i < f.sources.size(); ++i) {
        const double r = distance(x, f.sources[i]);
        const SourceEval e =
            eval_point_source(f.pulse_a, f.pulse_tc, f.firing[i], r, t);
        const double proj = ((x[0] - f.sources[i][0]) * nu[0] +
                             (x[1] - f.sources[i][1]) * nu[1]) /
                            r;
        acc += e.dr * proj;
      }
      return acc;
    }
  }
  return 0.0;
}

TraceSamples incident_traces(const IncidentField& f, const BoundarySpaces& sp,
                             double t) {
  const int ne = sp.panels();
  TraceSamples out{Eigen::VectorXd::Zero(ne), Eigen::VectorXd::Zero(ne),
                   Eigen::VectorXd::Zero(ne)};
  for (int i = 0; i < ne; ++i) {
    const Point2 mid{sp.loop[i][0] + 0.5 * sp.length[i] * sp.tangent[i][0],
                     sp.loop[i][1] + 0.5 * sp.length[i] * sp.tangent[i][1]};
    const Point2 nu = sp.normal[i];
    switch (f.kind) {
      case IncidentField::Kind::None:
        break;
      case IncidentField::Kind::PlaneWavePulse: {
        const double tau =
            t - f.delay - f.direction[0] * mid[0] - f.direction[1] * mid[1];
        const double dn = f.direction[0] * nu[0] + f.direction[1] * nu[1];
        out.beta0[i] = pulse(f, tau);
        out.dt_beta0[i] = pulse_deriv(f, tau);
        out.beta1[i] = -dn * pulse_deriv(f, tau);
        break;
      }
      case IncidentField::Kind::PointSourceSet: {
        for (std::size_t s = 0; s < f.sources.size(); ++s) {
          const double r = distance(mid, f.sources[s]);
          const SourceEval e =
              eval_point_source(f.pulse_a, f.pulse_tc, f.firing[s], r, t);
          const double proj = ((mid[0] - f.sources[s][0]) * nu[0] +
                               (mid[1] - f.sources[s][1]) * nu[1]) /
                              r;
          out.beta0[i] += e.value;
          out.dt_beta0[i] += e.dt;
          out.beta1[i] += e.dr * proj;
        }
        break;
      }
    }
  }
  return out;
}

void attach_incident_field(ProblemData& data, const IncidentField& field,
                           const BoundarySpaces& spaces) {
  if (field.kind == IncidentField::Kind::None) return;
  if (field.kind == IncidentField::Kind::PointSourceSet) {
    if (field.sources.size() != field.firing.size())
      throw std::invalid_argument(
          "attach_incident_field: sources and firing times differ in count");
    double perimeter = 0.0;
    for (int i = 0; i < spaces.panels(); ++i) perimeter += spaces.length[i];
    for (const Point2& s : field.sources) {
      if (inside_polygon(spaces.loop, s) ||
          boundary_distance(spaces, s) <= 1e-9 * perimeter)
        throw std::invalid_argument(
            "attach_incident_field: source inside the domain");
    }
  }
  const IncidentField f = field;
  data.beta0 = [f](Point2 x, double t) { return incident_value(f, x, t); };
  data.dt_beta0 = [f](Point2 x, double t) { return incident_dt(f, x, t); };
  data.beta1 = [f](Point2 x, Point2 nu, double t) {
    return incident_normal_derivative(f, x, nu, t);
  };
}

double energy_error(const std::vector<Eigen::VectorXd>& u, double dt,
                    const std::function<double(Point2, double)>& exact,
                    const TriangleMesh& mesh, const InteriorOperators& ops) {
  if (u.size() < 2)
    throw std::invalid_argument("energy_error: trajectory too short");
  const InteriorOperators unit = assemble_interior(mesh, CoefficientField{});
  const int nv = static_cast<int>(mesh.vertices.size());

  Eigen::VectorXd prev(nv), cur(nv);
  for (int j = 0; j < nv; ++j) prev[j] = u[0][j] - exact(mesh.vertices[j], 0.0);
  double worst = 0.0;
  for (std::size_t n = 1; n < u.size(); ++n) {
    for (int j = 0; j < nv; ++j)
      cur[j] = u[n][j] - exact(mesh.vertices[j], n * dt);
    const Eigen::VectorXd dq = (cur - prev) / dt;
    const Eigen::VectorXd mid = 0.5 * (cur + prev);
    const double err = std::sqrt(dq.dot(ops.M1 * dq)) +
                       std::sqrt(mid.dot(unit.K * mid));
    worst = std::max(worst, err);
    prev.swap(cur);
  }
  return worst;
}

}  // namespace cqwave
