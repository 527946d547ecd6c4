#pragma once

#include <vector>

namespace cqwave {

enum class RuleKind { GaussLegendre, LogWeighted };

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  RuleKind kind;
};

/// n-point Gauss-Legendre rule on (-1, 1); exact on polynomials of
/// degree <= 2n - 1, all weights positive.
QuadratureRule gauss_legendre(int n);

/// Rule on (0, 1) integrating p(x) * (-log x) exactly for polynomials p of
/// degree <= n - 1 (in fact 2m - 1 with m = ceil(n/2)). Product-Gauss
/// construction from -log x = integral of 1/t over [x, 1]; m^2 nodes,
/// all weights positive.
QuadratureRule log_weighted_rule(int n);

}  // namespace cqwave
