#include "cqwave/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cqwave {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  QuadratureRule r;
  r.kind = RuleKind::GaussLegendre;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one polishing step after convergence
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        x -= p1 / pp;
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.nodes[i] = -x;
    r.weights[i] = w;
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

QuadratureRule log_weighted_rule(int n) {
  if (n < 1) throw std::invalid_argument("log_weighted_rule: n >= 1 required");
  const int m = (n + 1) / 2;
  const QuadratureRule g = gauss_legendre(m);
  // map to (0,1)
  std::vector<double> t(m), w(m);
  for (int i = 0; i < m; ++i) {
    t[i] = 0.5 * (g.nodes[i] + 1.0);
    w[i] = 0.5 * g.weights[i];
  }
  QuadratureRule r;
  r.kind = RuleKind::LogWeighted;
  r.nodes.reserve(m * m);
  r.weights.reserve(m * m);
  // int_0^1 f(x)(-log x) dx = int_0^1 int_0^1 f(t s) ds dt
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      r.nodes.push_back(t[i] * t[j]);
      r.weights.push_back(w[i] * w[j]);
    }
  return r;
}

}  // namespace cqwave
