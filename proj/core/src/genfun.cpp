#include "cqwave/genfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cqwave {
namespace {

constexpr double kStabilityTol = -1e-15;

Complex delta_poly(const std::vector<double>& c, Complex w) {
  // (1-z) + (1-z)^2/2 + sum_j 2^{-j} c_j (1-z)^{j+1}, w = 1-z
  Complex acc = w + 0.5 * w * w;
  Complex wp = w * w;
  double scale = 0.25;
  for (std::size_t j = 0; j < c.size(); ++j) {
    wp *= w;
    acc += scale * c[j] * wp;
    scale *= 0.5;
  }
  return acc;
}

// delta(e^{-ix}) through the half-angle form; for TR this is 2 i tan(x/2)
// with exactly zero real part.
Complex delta_on_circle(const GeneratingFunction& g, double x) {
  if (g.kind == MethodKind::TR) return Complex(0.0, 2.0 * std::tan(0.5 * x));
  const Complex w(1.0 - std::cos(x), std::sin(x));
  if (g.kind == MethodKind::BDF2) return w + 0.5 * w * w;
  return delta_poly(g.ttr_coeffs, w);
}

// Sampled-stability machinery for design_ttr: powers of w = 1 - e^{-ix}
// precomputed once per sample count.
struct CirclePowers {
  int n = 0;
  // pw[p][k] = Re and Im of w(x_k)^{p+1}, p = 0..J
  std::vector<std::vector<Complex>> pw;
};

CirclePowers make_powers(int n, int J) {
  CirclePowers t;
  t.n = n;
  t.pw.assign(J + 1, std::vector<Complex>(n));
  for (int k = 0; k < n; ++k) {
    const double x = std::numbers::pi * k / (n - 1);
    const Complex w(1.0 - std::cos(x), std::sin(x));
    Complex wp = w;
    for (int p = 0; p <= J; ++p) {
      t.pw[p][k] = wp;
      wp *= w;
    }
  }
  return t;
}

// coeffs = (c2..cJ); min_k Re delta_TTR(e^{-i x_k})
double min_re(const CirclePowers& t, const std::vector<double>& c) {
  const int J = int(c.size()) + 1;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < t.n; ++k) {
    double re = t.pw[0][k].real() + 0.5 * t.pw[1][k].real();
    double scale = 0.25;
    for (int j = 2; j <= J; ++j) {
      re += scale * c[j - 2] * t.pw[j][k].real();
      scale *= 0.5;
    }
    best = std::min(best, re);
  }
  return best;
}

bool feasible(const CirclePowers& t, double c2, const std::vector<double>& rest) {
  std::vector<double> c(rest.size() + 1);
  c[0] = c2;
  std::copy(rest.begin(), rest.end(), c.begin() + 1);
  return min_re(t, c) >= kStabilityTol;
}

// Largest feasible c2 in [lb, 1] for fixed higher coefficients; the feasible
// c2 set is treated as an interval anchored at 0 (BDF2). Returns -inf when
// even lb is infeasible.
double max_feasible_c2(const CirclePowers& t, const std::vector<double>& rest,
                       double lb) {
  if (!feasible(t, lb, rest)) return -std::numeric_limits<double>::infinity();
  if (feasible(t, 1.0, rest)) return 1.0;
  double lo = lb, hi = 1.0;
  for (int it = 0; it < 52; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(t, mid, rest) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<double> clamp01(std::vector<double> v) {
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  return v;
}

}  // namespace

GeneratingFunction bdf2() { return {MethodKind::BDF2, {}, 2}; }

GeneratingFunction trapezoidal() { return {MethodKind::TR, {}, 2}; }

GeneratingFunction ttr(std::vector<double> coeffs) {
  for (double c : coeffs)
    if (!(c >= 0.0 && c <= 1.0))
      throw std::invalid_argument("ttr: coefficients must lie in [0, 1]");
  return {MethodKind::TTR, std::move(coeffs), 2};
}

GeneratingFunction paper_ttr() {
  return ttr({0.893817850529318, 0.684154908023834, 0.629642997466429});
}

Complex eval_delta(const GeneratingFunction& g, Complex zeta) {
  switch (g.kind) {
    case MethodKind::BDF2: {
      const Complex w = 1.0 - zeta;
      return w + 0.5 * w * w;
    }
    case MethodKind::TR: {
      if (zeta == Complex(-1.0, 0.0))
        throw std::domain_error("eval_delta: TR pole at zeta = -1");
      return 2.0 * (1.0 - zeta) / (1.0 + zeta);
    }
    case MethodKind::TTR:
      return delta_poly(g.ttr_coeffs, 1.0 - zeta);
  }
  throw std::logic_error("eval_delta: unknown kind");
}

ExpansionReport consistency_expansion(const GeneratingFunction& g) {
  // a_k = (1/(n r^k)) sum_j delta(e^{-z_j}) e^{-2 pi i j k/n}, z_j on |z| = r.
  constexpr int n = 256;
  constexpr double r = 0.1;
  std::vector<Complex> f(n);
  for (int j = 0; j < n; ++j) {
    const double ang = 2.0 * std::numbers::pi * j / n;
    const Complex z = r * Complex(std::cos(ang), std::sin(ang));
    f[j] = eval_delta(g, std::exp(-z));
  }
  auto coeff = [&](int k) {
    Complex s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ang = -2.0 * std::numbers::pi * j * k / n;
      s += f[j] * Complex(std::cos(ang), std::sin(ang));
    }
    return (s / double(n)).real() / std::pow(r, k);
  };
  ExpansionReport rep;
  rep.a1 = coeff(1);
  rep.a2 = coeff(2);
  rep.e3 = coeff(3);
  rep.e4 = coeff(4);
  rep.error_constant = std::abs(rep.e3);
  return rep;
}

double check_a_stability(const GeneratingFunction& g, int n_samples) {
  if (n_samples < 2)
    throw std::invalid_argument("check_a_stability: n_samples >= 2 required");
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const double x = std::numbers::pi * k / (n_samples - 1);
    best = std::min(best, delta_on_circle(g, x).real());
  }
  return best;
}

GeneratingFunction design_ttr(int J, int n_samples,
                              const std::optional<std::vector<double>>& start) {
  if (J < 2) throw std::invalid_argument("design_ttr: J >= 2 required");
  if (n_samples < 2)
    throw std::invalid_argument("design_ttr: n_samples >= 2 required");
  const int dims = J - 2;
  const CirclePowers full = make_powers(n_samples, J);
  const CirclePowers cheap = make_powers(std::max(512, n_samples / 25), J);

  // candidate rest-vectors (c3..cJ)
  std::vector<std::vector<double>> cands;
  cands.emplace_back(dims, 1.0);
  if (start) {
    if (int(start->size()) != J - 1)
      throw std::invalid_argument("design_ttr: start must supply c_2..c_J");
    cands.emplace_back(start->begin() + 1, start->end());
  }
  if (dims > 0) {
    // coarse deterministic diversification; keep the 3 best grid points
    std::vector<std::pair<double, std::vector<double>>> scored;
    std::vector<int> idx(dims, 0);
    const int npts = 11;
    while (true) {
      std::vector<double> rest(dims);
      for (int d = 0; d < dims; ++d) rest[d] = idx[d] / double(npts - 1);
      scored.emplace_back(max_feasible_c2(cheap, rest, 0.0), rest);
      int d = 0;
      while (d < dims && ++idx[d] == npts) idx[d++] = 0;
      if (d == dims) break;
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int i = 0; i < 3 && i < int(scored.size()); ++i)
      cands.push_back(scored[i].second);
  }

  double best_c2 = -std::numeric_limits<double>::infinity();
  std::vector<double> best_rest(dims, 0.0);
  for (const auto& cand : cands) {
    std::vector<double> rest = clamp01(cand);
    double f = max_feasible_c2(full, rest, 0.0);
    if (!std::isfinite(f)) continue;
    // coordinate pattern refinement, fixed budget
    double step = 0.1;
    int moves = 0;
    while (step > 1e-9 && moves < 400) {
      bool improved = false;
      for (int d = 0; d < dims; ++d) {
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> trial = rest;
          trial[d] = std::clamp(trial[d] + sgn * step, 0.0, 1.0);
          const double ft = max_feasible_c2(full, trial, std::min(f, 1.0));
          ++moves;
          if (ft > f + 1e-14) {
            rest = trial;
            f = ft;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (f > best_c2) {
      best_c2 = f;
      best_rest = rest;
    }
  }

  if (!std::isfinite(best_c2)) {
    if (start) return ttr(*start);  // degenerate: keep the caller's point
    throw std::runtime_error("design_ttr: no feasible point found");
  }
  std::vector<double> coeffs(1, best_c2);
  coeffs.insert(coeffs.end(), best_rest.begin(), best_rest.end());
  // never return something worse than a feasible caller start
  if (start && (*start)[0] > best_c2 &&
      min_re(full, *start) >= kStabilityTol)
    coeffs = *start;
  GeneratingFunction g = ttr(coeffs);
  if (check_a_stability(g, n_samples) < kStabilityTol)
    throw std::runtime_error("design_ttr: result fails the stability check");
  return g;
}

std::vector<Complex> stability_region_boundary(const GeneratingFunction& g,
                                               int n) {
  if (n < 3)
    throw std::invalid_argument("stability_region_boundary: n >= 3 required");
  std::vector<Complex> pts;
  pts.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    if (g.kind == MethodKind::TR && theta == std::numbers::pi) continue;
    // delta(e^{i theta}) = conj(delta(e^{-i theta})) for real coefficients
    pts.push_back(std::conj(delta_on_circle(g, theta)));
  }
  return pts;
}

}  // namespace cqwave
