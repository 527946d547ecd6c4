// Acceptance gate: ten numbered criteria, one PASS/FAIL line each.
// Exit status 0 when every criterion holds, 1 otherwise.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cqwave/bem.hpp"
#include "cqwave/coupled.hpp"
#include "cqwave/cq.hpp"
#include "cqwave/fem.hpp"
#include "cqwave/genfun.hpp"
#include "cqwave/mesh.hpp"
#include "cqwave/reference.hpp"
#include "cqwave/specfun.hpp"
#include "harness.hpp"

namespace {

using namespace cqwave;
using Clock = std::chrono::steady_clock;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kTau = 2.0 * std::numbers::pi;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

struct Gate {
  int failures = 0;
  void report(int idx, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", idx,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

// ---- circle Fourier oracles --------------------------------------------

Complex circle_V_symbol(Complex s, int m, double R) {
  return R * bessel_I(m, s * R) * bessel_K(m, s * R);
}

Complex circle_W_symbol(Complex s, int m, double R) {
  const Complex vm1 = circle_V_symbol(s, std::abs(m - 1), R);
  const Complex vp1 = circle_V_symbol(s, m + 1, R);
  return double(m) * double(m) / (R * R) * circle_V_symbol(s, m, R) +
         s * s * 0.5 * (vp1 + vm1);
}

VectorXcd fourier_p0(const BoundarySpaces& sp, int m) {
  VectorXcd z(sp.panels());
  for (int j = 0; j < sp.panels(); ++j) {
    const int jn = (j + 1) % sp.panels();
    const double x = 0.5 * (sp.loop[j][0] + sp.loop[jn][0]);
    const double y = 0.5 * (sp.loop[j][1] + sp.loop[jn][1]);
    const double th = std::atan2(y, x);
    z[j] = std::polar(1.0, m * th);
  }
  return z;
}

VectorXcd fourier_p1(const BoundarySpaces& sp, int m) {
  VectorXcd z(sp.panels());
  for (int j = 0; j < sp.panels(); ++j) {
    const double th = std::atan2(sp.loop[j][1], sp.loop[j][0]);
    z[j] = std::polar(1.0, m * th);
  }
  return z;
}

Complex rayleigh(const MatrixXcd& A, const VectorXcd& z, double R) {
  return (z.adjoint() * A * z)(0, 0) / (kTau * R);
}

// projector residual of 1/2 I + A on resolved Fourier data in the mass
// norm; a full-matrix norm stays O(1) from near-Nyquist modes at any n
double calderon_residual(int n_panels, Complex s) {
  const BoundarySpaces sp = make_circle_spaces(n_panels, 1.0);
  const BoundaryOperators op = assemble_operators(s, sp);
  const MatrixXd pair = boundary_pairing(sp);
  const int n = n_panels;
  MatrixXcd cmat(2 * n, 2 * n);
  MatrixXcd rhs(2 * n, 2 * n);
  rhs.topLeftCorner(n, n) = -op.K + 0.5 * pair.cast<Complex>();
  rhs.topRightCorner(n, n) = op.V;
  rhs.bottomLeftCorner(n, n) = op.W;
  rhs.bottomRightCorner(n, n) =
      op.Kt + 0.5 * pair.transpose().cast<Complex>();
  Eigen::PartialPivLU<MatrixXcd> top(pair.cast<Complex>().eval());
  Eigen::PartialPivLU<MatrixXcd> bot(pair.transpose().cast<Complex>().eval());
  cmat.topRows(n) = top.solve(rhs.topRows(n).eval());
  cmat.bottomRows(n) = bot.solve(rhs.bottomRows(n).eval());

  VectorXd len(n);
  for (int j = 0; j < n; ++j) {
    const double dx = sp.loop[(j + 1) % n][0] - sp.loop[j][0];
    const double dy = sp.loop[(j + 1) % n][1] - sp.loop[j][1];
    len[j] = std::hypot(dx, dy);
  }
  MatrixXd m1 = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const int jn = (j + 1) % n;
    m1(j, j) += len[j] / 3.0;
    m1(jn, jn) += len[j] / 3.0;
    m1(j, jn) += len[j] / 6.0;
    m1(jn, j) += len[j] / 6.0;
  }
  auto mass_norm = [&](const VectorXcd& z) {
    const VectorXcd u = z.head(n), q = z.tail(n);
    const double a = std::real((u.adjoint() * (m1 * u))(0));
    const double b =
        std::real((q.adjoint() * (len.cast<Complex>().asDiagonal() * q))(0));
    return std::sqrt(a + b);
  };

  double res = 0.0;
  for (int m : {0, 1, 2, 3, 4, 8}) {
    VectorXcd zu = VectorXcd::Zero(2 * n), zq = VectorXcd::Zero(2 * n);
    zu.head(n) = fourier_p1(sp, m);
    zq.tail(n) = fourier_p0(sp, m);
    for (const VectorXcd* z : {&zu, &zq}) {
      const VectorXcd cz = cmat * (*z);
      res = std::max(res, mass_norm(cmat * cz - cz) / mass_norm(*z));
    }
  }
  return res;
}

// ---- shared disk problem data ------------------------------------------

ProblemData disk_data() {
  ProblemData d;
  d.u0.value = [](Point2 x) {
    return std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1]));
  };
  d.u0.grad = [](Point2 x) {
    const double e = std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1]));
    return Vector2d(-4.0 * x[0] * e, -4.0 * x[1] * e);
  };
  d.lap_u0.value = [](Point2 x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return (16.0 * r2 - 8.0) * std::exp(-2.0 * r2);
  };
  d.lap_u0.grad = [](Point2 x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double e = std::exp(-2.0 * r2);
    return Vector2d((64.0 - 64.0 * r2) * e * x[0],
                    (64.0 - 64.0 * r2) * e * x[1]);
  };
  return d;
}

// ---- criteria ------------------------------------------------------------

void criterion_1(Gate& gate) {
  const auto t0 = Clock::now();
  const GeneratingFunction g = paper_ttr();
  const ExpansionReport rep = consistency_expansion(g);
  const double inv_e3 = 1.0 / std::abs(rep.e3);
  const double smin = check_a_stability(g, 50000);
  const double dt = seconds_since(t0);
  const bool ok = std::abs(inv_e3 - 9.10) <= 0.01 &&
                  std::abs(rep.e4 - 3.37e-4) <= 0.05e-4 && smin >= -1e-15 &&
                  dt < 1.0;
  gate.report(1, ok,
              strf("published TTR coefficients: 1/|e3| = %.6f, e4 = %.4e, "
                   "min Re delta = %.2e (%.2f s)",
                   inv_e3, rep.e4, smin, dt));
}

void criterion_2(Gate& gate) {
  const auto t0 = Clock::now();
  const ExpansionReport rb = consistency_expansion(bdf2());
  const ExpansionReport rt = consistency_expansion(trapezoidal());
  const double dt = seconds_since(t0);
  const bool ok = std::abs(rb.e3 + 1.0 / 3.0) <= 1e-7 &&
                  std::abs(rb.e4 - 0.25) <= 1e-7 &&
                  std::abs(rt.e3 + 1.0 / 12.0) <= 1e-7 &&
                  std::abs(rt.e4) <= 1e-7 && dt < 1.0;
  gate.report(2, ok,
              strf("expansion constants: bdf2 (%.8f, %.8f), tr (%.8f, %.2e) "
                   "(%.2f s)",
                   rb.e3, rb.e4, rt.e3, rt.e4, dt));
}

void criterion_3(Gate& gate) {
  const auto t0 = Clock::now();
  const double step = 0.05;
  const int N = 128;
  const ContourParams p = default_contour(N, step);
  const double tol = 10.0 * std::pow(p.lambda, N + 1);
  const GeneratingFunction g = bdf2();

  const ScalarWeights wd =
      scalar_weights([](Complex s) { return s; }, g, p, "s");
  double resid_d = 0.0;
  for (int j = 0; j <= N; ++j) {
    const double e = j == 0 ? 1.5 : j == 1 ? -2.0 : j == 2 ? 0.5 : 0.0;
    resid_d = std::max(resid_d, std::abs(wd.weights[j] - e / step) * step);
  }

  const ScalarWeights wi =
      scalar_weights([](Complex s) { return 1.0 / s; }, g, p, "1/s");
  double resid_c = 0.0;
  for (int j = 0; j <= N; ++j) {
    Complex conv = 0.0;
    for (int k = 0; k <= j; ++k) conv += wd.weights[k] * wi.weights[j - k];
    resid_c = std::max(resid_c, std::abs(conv - (j == 0 ? 1.0 : 0.0)));
  }
  const double dt = seconds_since(t0);
  const bool ok = resid_d <= tol && resid_c <= tol && dt < 1.0;
  gate.report(3, ok,
              strf("CQ weight exactness: derivative residual %.2e, "
                   "composition residual %.2e, tol %.2e (%.2f s)",
                   resid_d, resid_c, tol, dt));
}

void criterion_4(Gate& gate) {
  const auto t0 = Clock::now();
  const double R = 1.0;
  const std::vector<Complex> freqs{Complex(1.0, 0.0), Complex(1.0, 2.0)};
  const std::vector<int> modes{0, 1, 4};
  const std::vector<int> counts{64, 128, 256};

  bool ok = true;
  std::string worst;

  // the anchor the oracle itself must hit
  const double anchor = std::abs(circle_V_symbol(1.0, 0, R));
  if (std::abs(anchor - 0.5330) > 1e-3) {
    ok = false;
    worst = strf("; oracle anchor %.4f != 0.5330", anchor);
  }

  double ratio_lo = 1e30, ratio_hi = 0.0, final_v = 0.0, final_w = 0.0;
  for (const Complex s : freqs) {
    std::vector<BoundaryOperators> ops;
    std::vector<BoundarySpaces> sps;
    for (int n : counts) {
      sps.push_back(make_circle_spaces(n, R));
      ops.push_back(assemble_operators(s, sps.back()));
    }
    for (int m : modes) {
      const Complex vhat = circle_V_symbol(s, m, R);
      const Complex what = circle_W_symbol(s, m, R);
      std::vector<double> ev, ew;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        ev.push_back(
            std::abs(rayleigh(ops[i].V, fourier_p0(sps[i], m), R) - vhat));
        ew.push_back(
            std::abs(rayleigh(ops[i].W, fourier_p1(sps[i], m), R) - what));
      }
      for (int i = 0; i < 2; ++i) {
        const double ratio = ev[i] / ev[i + 1];
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
        if (ratio < 2.5 || ratio > 6.5) {
          ok = false;
          worst += strf("; V ratio %.2f at s=(%g,%g) m=%d", ratio, s.real(),
                        s.imag(), m);
        }
      }
      final_v = std::max(final_v, ev[2] / std::abs(vhat));
      if (ev[2] > 2e-3 * std::abs(vhat)) {
        ok = false;
        worst += strf("; V error %.2e at 256 panels", ev[2]);
      }
      if (!(ew[0] > ew[1] && ew[1] > ew[2])) {
        ok = false;
        worst += strf("; W errors not decreasing at m=%d", m);
      }
      final_w = std::max(final_w, ew[2] / std::abs(what));
      if (ew[2] > 2e-2 * std::abs(what)) {
        ok = false;
        worst += strf("; W error %.2e at 256 panels", ew[2]);
      }
    }
  }

  // projector property of the Calderon block, odd panel counts so the
  // P0/P1 pairing stays invertible
  const double c33 = calderon_residual(33, 1.0);
  const double c65 = calderon_residual(65, 1.0);
  const double c129 = calderon_residual(129, 1.0);
  if (!(c33 > c65 && c65 > c129)) {
    ok = false;
    worst += strf("; Calderon residuals %.2e/%.2e/%.2e not decreasing", c33,
                  c65, c129);
  }
  const double dt = seconds_since(t0);
  if (dt >= 60.0) ok = false;
  gate.report(
      4, ok,
      strf("circle operator oracle: V ratios in [%.2f, %.2f], V err <= "
           "%.1e, W err <= %.1e, Calderon %.1e/%.1e/%.1e%s (%.1f s)",
           ratio_lo, ratio_hi, final_v, final_w, c33, c65, c129,
           worst.c_str(), dt));
}

void criterion_5(Gate& gate) {
  const auto t0 = Clock::now();
  const double step = 0.1;
  const int N = 63;
  const int npan = 32;
  const BoundarySpaces sp = make_circle_spaces(npan, 1.0);
  const ContourParams p = default_contour(N, step);
  const HerglotzTestParams hp = herglotz_params(1.0, step);

  std::mt19937 rng(7777u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<VectorXd>> seqs(20);
  for (auto& seq : seqs) {
    seq.resize(N + 1);
    for (auto& x : seq) {
      x.resize(npan);
      for (int k = 0; k < npan; ++k) x[k] = unif(rng);
    }
  }

  bool ok = true;
  double worst = 0.0;
  std::string fail;
  for (const char* name : {"bdf2", "tr", "ttr"}) {
    const GeneratingFunction g = method_by_name(name);
    const BemQuadrature quad =
        g.kind == MethodKind::TR ? tr_quadrature() : BemQuadrature{};
    const auto assembler = [&](Complex s) -> MatrixXcd {
      return s * assemble_V(s, sp, quad);
    };
    const BlockWeights w = block_weights(assembler, g, p, 1, "sV");
    for (std::size_t trial = 0; trial < seqs.size(); ++trial) {
      const auto& x = seqs[trial];
      double q = 0.0, norm = 0.0;
      for (int n = 0; n <= N; ++n) {
        const VectorXd conv = apply_history(w, x, n) + w.weights[0] * x[n];
        q += std::pow(hp.rho, 2.0 * n) * x[n].dot(conv);
        norm += x[n].squaredNorm();
      }
      worst = std::min(worst, q / norm);
      if (q < -1e-10 * norm) {
        ok = false;
        fail = strf("; %s trial %zu form %.3e < -1e-10 * %.3e", name, trial,
                    q, norm);
      }
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 60.0) ok = false;
  gate.report(5, ok,
              strf("discrete Herglotz positivity of sV(s): min form/norm = "
                   "%.3e over 3 methods x 20 sequences%s (%.1f s)",
                   worst, fail.c_str(), dt));
}

void criterion_6_7(Gate& gate) {
  const auto t0 = Clock::now();
  const TriangleMesh mesh = generate_disk(3.0, 2);
  const ProblemData data = disk_data();

  auto [sys, st] = initialize(mesh, {}, data, bdf2(), 4.0);
  const RunResult stable = run(sys, st, data, 1e6);
  const double e1 = st.energies.front();
  const bool ok_stable = !stable.blew_up && stable.max_energy <= 10.0 * e1;

  const double resid = energy_identity_residual(sys, st);
  const bool ok_identity = resid <= 1e-9;

  auto [sys2, st2] = initialize(mesh, {}, data, bdf2(), 4.0, 1.5 * sys.dt);
  const RunResult broken = run(sys2, st2, data, 1e6);
  const double e1b = st2.energies.front();
  const bool ok_blow = broken.blew_up && broken.max_energy > 1e6 * e1b;

  const double dt = seconds_since(t0);
  gate.report(6, ok_stable && ok_blow && dt < 300.0,
              strf("CFL stability pair: max E/E1 = %.6f at dt = 2/sqrt("
                   "lambda_max); |E|/E1 = %.3e after x1.5 (blew_up = %d) "
                   "(%.1f s)",
                   stable.max_energy / e1, broken.max_energy / e1b,
                   int(broken.blew_up), dt));
  gate.report(7, ok_identity,
              strf("per-step energy identity: relative residual %.3e over "
                   "the stable run",
                   resid));
}

void criterion_8(Gate& gate) {
  const auto t0 = Clock::now();
  // Mesh levels 2..5 of the fan family are the study's levels 1..4: the
  // family's level-1 mesh (7 vertices) is far outside the asymptotic range
  // for this initial datum, so the ladder starts one refinement up. The
  // first pair order is reported but sits below the asymptotic window.
  const std::vector<int> mesh_levels{2, 3, 4, 5};
  const std::vector<std::string> methods{"bdf2", "tr", "ttr"};
  std::vector<std::vector<ConvergenceRow>> all;

  for (const std::string& m : methods) {
    ExperimentConfig cfg;
    cfg.method = m;
    cfg.levels = mesh_levels;
    cfg.T = 2.0;
    all.push_back(run_convergence_disk(cfg));
  }

  bool ok = true;
  std::string why;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const auto& rows = all[mi];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::printf("  %4s  study level %zu (mesh level %d)  h %.4f  error "
                  "%.6e%s\n",
                  methods[mi].c_str(), i + 1, rows[i].level, rows[i].h,
                  rows[i].energy_error,
                  i == 0 ? ""
                         : strf("  order %.2f%s", rows[i].observed_order,
                                i == 1 ? " (preasymptotic)" : "")
                               .c_str());
    }
    const double o23 = rows[2].observed_order;
    const double o34 = rows[3].observed_order;
    if (!(o23 >= 1.5 && o23 <= 2.5 && o34 >= 1.5 && o34 <= 2.5)) {
      ok = false;
      why += strf("; %s orders %.2f/%.2f outside [1.5, 2.5]",
                  methods[mi].c_str(), o23, o34);
    }
    if (o34 < 1.8) {
      ok = false;
      why += strf("; %s finest order %.2f < 1.8", methods[mi].c_str(), o34);
    }
  }

  double spread = 0.0;
  for (std::size_t i = 0; i < mesh_levels.size(); ++i) {
    double lo = 1e300, hi = 0.0;
    for (const auto& rows : all) {
      lo = std::min(lo, rows[i].energy_error);
      hi = std::max(hi, rows[i].energy_error);
    }
    spread = std::max(spread, hi / lo - 1.0);
  }
  if (spread > 0.05) {
    ok = false;
    why += strf("; method spread %.2f%% > 5%%", 100.0 * spread);
  }

  const double dt = seconds_since(t0);
  if (dt >= 1800.0) ok = false;
  gate.report(8, ok,
              strf("disk convergence: orders %.2f/%.2f (bdf2, asymptotic "
                   "pairs), finest %.2f, method spread %.3f%%%s (%.0f s)",
                   all[0][2].observed_order, all[0][3].observed_order,
                   all[0][3].observed_order, 100.0 * spread, why.c_str(),
                   dt));
}

void criterion_9(Gate& gate) {
  const auto t0 = Clock::now();
  const TriangleMesh mesh = generate_disk(3.0, 2);
  const ProblemData data = disk_data();
  auto [sys, st] = initialize(mesh, {}, data, bdf2(), 4.0);

  std::vector<int> steps(sys.n_steps - 1);
  for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = int(i) + 1;
  std::mt19937 rng(424242u);
  std::shuffle(steps.begin(), steps.end(), rng);
  steps.resize(std::min<std::size_t>(5, steps.size()));
  std::sort(steps.begin(), steps.end());

  double worst = 0.0;
  std::size_t pick = 0;
  while (st.n < sys.n_steps) {
    const bool chosen = pick < steps.size() && st.n == steps[pick];
    MonolithicResult mono;
    if (chosen) mono = monolithic_step(sys, st, data);
    const int n = st.n;
    step(sys, st, data);
    if (chosen) {
      ++pick;
      const double denom = st.u[n + 1].norm() + st.phi(n).norm() +
                           st.psi(n).norm();
      const double diff = (mono.u_next - st.u[n + 1]).norm() +
                          (mono.phi - st.phi(n)).norm() +
                          (mono.psi - st.psi(n)).norm();
      worst = std::max(worst, diff / denom);
    }
  }
  const double dt = seconds_since(t0);
  const bool ok = pick == steps.size() && worst <= 1e-10 && dt < 60.0;
  gate.report(9, ok,
              strf("Schur vs monolithic: %zu sampled steps, worst relative "
                   "gap %.3e (%.1f s)",
                   pick, worst, dt));
}

void criterion_10(Gate& gate) {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst0 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = 3.0 * i / 99.0;
    const double err =
        std::abs(exact_disk_solution(r, 0.0) - std::exp(-2.0 * r * r));
    worst0 = std::max(worst0, err);
  }
  if (worst0 > 1e-10) ok = false;

  double worstg = 0.0;
  const double h = 1e-4;
  for (double r : {0.3, 0.8, 1.4, 2.2}) {
    for (double t : {0.2, 1.0, 1.9}) {
      const double fd =
          (exact_disk_solution(r + h, t) - exact_disk_solution(r - h, t)) /
          (2.0 * h);
      worstg = std::max(worstg, std::abs(exact_disk_gradient(r, t) - fd));
    }
  }
  if (worstg > 1e-6) ok = false;
  const double dt = seconds_since(t0);
  if (dt >= 10.0) ok = false;
  gate.report(10, ok,
              strf("reference solution self-test: max |u(r,0) - exp(-2r^2)| "
                   "= %.2e, max gradient-FD gap = %.2e (%.1f s)",
                   worst0, worstg, dt));
}

}  // namespace

int main() {
  Gate gate;
  const auto t0 = Clock::now();
  criterion_1(gate);
  criterion_2(gate);
  criterion_3(gate);
  criterion_4(gate);
  criterion_5(gate);
  criterion_6_7(gate);
  criterion_8(gate);
  criterion_9(gate);
  criterion_10(gate);
  std::printf("%d of 10 criteria passed (%.0f s total)\n", 10 - gate.failures,
              seconds_since(t0));
  return gate.failures == 0 ? 0 : 1;
}
