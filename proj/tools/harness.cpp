#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "cqwave/cq.hpp"
#include "cqwave/reference.hpp"

namespace cqwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number '" + v + "' for key " + key);
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer '" + v + "' for key " + key);
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& p : split_list(v)) out.push_back(parse_int(key, p));
  return out;
}

std::vector<double> parse_real_list(const std::string& key,
                                    const std::string& v) {
  std::vector<double> out;
  for (const std::string& p : split_list(v)) out.push_back(parse_real(key, p));
  return out;
}

void validate_enums(const ExperimentConfig& cfg) {
  static const std::set<std::string> experiments{
      "convergence-disk", "lshape", "cq-selftest", "design-ttr",
      "stability-region"};
  if (!experiments.count(cfg.experiment))
    throw ConfigError("config: unknown experiment '" + cfg.experiment + "'");
  if (cfg.method != "bdf2" && cfg.method != "tr" && cfg.method != "ttr")
    throw ConfigError("config: unknown method '" + cfg.method + "'");
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt17(v[i]);
  }
  return out;
}

std::optional<BemQuadrature> quad_override(const ExperimentConfig& cfg,
                                           const GeneratingFunction& g) {
  if (cfg.n_gauss == 0 && cfg.n_near == 0 && cfg.near_levels == 0)
    return std::nullopt;
  BemQuadrature q =
      g.kind == MethodKind::TR ? tr_quadrature() : BemQuadrature{};
  if (cfg.n_gauss > 0) q.n_gauss = cfg.n_gauss;
  if (cfg.n_near > 0) q.n_near = cfg.n_near;
  if (cfg.near_levels > 0) q.levels = cfg.near_levels;
  return q;
}

ProblemData disk_problem_data() {
  ProblemData d;
  d.u0.value = [](Point2 x) {
    return std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1]));
  };
  d.u0.grad = [](Point2 x) {
    const double e = std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1]));
    return Eigen::Vector2d(-4.0 * x[0] * e, -4.0 * x[1] * e);
  };
  d.lap_u0.value = [](Point2 x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return (16.0 * r2 - 8.0) * std::exp(-2.0 * r2);
  };
  d.lap_u0.grad = [](Point2 x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double f = (64.0 - 64.0 * r2) * std::exp(-2.0 * r2);
    return Eigen::Vector2d(f * x[0], f * x[1]);
  };
  return d;
}

double segment_distance(const BoundarySpaces& sp, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sp.panels(); ++i) {
    const Point2& a = sp.loop[i];
    const double dx = sp.length[i] * sp.tangent[i][0];
    const double dy = sp.length[i] * sp.tangent[i][1];
    double s =
        ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy);
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(
        best, std::hypot(p[0] - a[0] - s * dx, p[1] - a[1] - s * dy));
  }
  return best;
}

}  // namespace

void apply_config_text(const std::string& text, ExperimentConfig& cfg) {
  std::istringstream in(text);
  std::string line;
  std::string section = "run";
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "quadrature" && section != "disk" &&
          section != "lshape")
        throw ConfigError("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key in '" + line + "'");

    if (section == "run") {
      if (key == "experiment")
        cfg.experiment = value;
      else if (key == "method")
        cfg.method = value;
      else if (key == "levels")
        cfg.levels = parse_int_list(key, value);
      else if (key == "T")
        cfg.T = parse_real(key, value);
      else if (key == "out_dir")
        cfg.out_dir = value;
      else if (key == "dt_override")
        cfg.dt_override = parse_real(key, value);
      else if (key == "threads")
        cfg.threads = parse_int(key, value);
      else if (key == "snapshot_times")
        cfg.snapshot_times = parse_real_list(key, value);
      else
        throw ConfigError("config: unknown key '" + key + "' in [run]");
    } else if (section == "quadrature") {
      if (key == "n_gauss")
        cfg.n_gauss = parse_int(key, value);
      else if (key == "n_near")
        cfg.n_near = parse_int(key, value);
      else if (key == "near_levels")
        cfg.near_levels = parse_int(key, value);
      else
        throw ConfigError("config: unknown key '" + key + "' in [quadrature]");
    } else if (section == "disk") {
      if (key == "radius")
        cfg.disk_radius = parse_real(key, value);
      else
        throw ConfigError("config: unknown key '" + key + "' in [disk]");
    } else {
      if (key == "level")
        cfg.lshape_level = parse_int(key, value);
      else if (key == "t_focus")
        cfg.t_focus = parse_real(key, value);
      else if (key == "pulse_a")
        cfg.pulse_a = parse_real(key, value);
      else if (key == "pulse_tc")
        cfg.pulse_tc = parse_real(key, value);
      else if (key == "arc_radius")
        cfg.arc_radius = parse_real(key, value);
      else
        throw ConfigError("config: unknown key '" + key + "' in [lshape]");
    }
  }
  validate_enums(cfg);
}

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(buf.str(), cfg);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  apply_config_text(text, cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  ExperimentConfig cfg;
  apply_config_file(path, cfg);
  return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  out += "[run]\n";
  out += "experiment = " + cfg.experiment + "\n";
  out += "method = " + cfg.method + "\n";
  out += "levels = " + join_ints(cfg.levels) + "\n";
  out += "T = " + fmt17(cfg.T) + "\n";
  out += "out_dir = " + cfg.out_dir + "\n";
  out += "dt_override = " + fmt17(cfg.dt_override) + "\n";
  out += "threads = " + std::to_string(cfg.threads) + "\n";
  out += "snapshot_times = " + join_reals(cfg.snapshot_times) + "\n";
  out += "[quadrature]\n";
  out += "n_gauss = " + std::to_string(cfg.n_gauss) + "\n";
  out += "n_near = " + std::to_string(cfg.n_near) + "\n";
  out += "near_levels = " + std::to_string(cfg.near_levels) + "\n";
  out += "[disk]\n";
  out += "radius = " + fmt17(cfg.disk_radius) + "\n";
  out += "[lshape]\n";
  out += "level = " + std::to_string(cfg.lshape_level) + "\n";
  out += "t_focus = " + fmt17(cfg.t_focus) + "\n";
  out += "pulse_a = " + fmt17(cfg.pulse_a) + "\n";
  out += "pulse_tc = " + fmt17(cfg.pulse_tc) + "\n";
  out += "arc_radius = " + fmt17(cfg.arc_radius) + "\n";
  return out;
}

GeneratingFunction method_by_name(const std::string& name) {
  if (name == "bdf2") return bdf2();
  if (name == "tr") return trapezoidal();
  if (name == "ttr") return paper_ttr();
  throw ConfigError("config: unknown method '" + name + "'");
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<ConvergenceRow> run_convergence_disk(const ExperimentConfig& cfg) {
  if (cfg.levels.size() < 2)
    throw ConfigError("convergence-disk: need at least two levels");
  const GeneratingFunction g = method_by_name(cfg.method);
  const ProblemData data = disk_problem_data();
  const auto exact = [](Point2 x, double t) {
    return exact_disk_solution(std::hypot(x[0], x[1]), t);
  };
  std::vector<ConvergenceRow> rows;
  for (int level : cfg.levels) {
    const TriangleMesh mesh = generate_disk(cfg.disk_radius, level);
    auto [sys, state] = initialize(mesh, CoefficientField{}, data, g, cfg.T,
                                   cfg.dt_override, cfg.threads,
                                   quad_override(cfg, g));
    run(sys, state, data);
    const double err =
        energy_error(state.u, sys.dt, exact, *sys.mesh, sys.ops);
    ConvergenceRow row;
    row.level = level;
    row.h = mesh_h(mesh);
    row.dt = sys.dt;
    row.energy_error = err;
    row.cfl_warned = sys.cfl_violated;
    if (!rows.empty())
      row.observed_order = std::log2(rows.back().energy_error / err);
    rows.push_back(row);
  }
  return rows;
}

LshapeResult run_lshape_focus(const ExperimentConfig& cfg) {
  const GeneratingFunction g = method_by_name(cfg.method);
  const TriangleMesh mesh = generate_lshape(cfg.lshape_level);
  CoefficientField coeffs;
  coeffs.c = [](Point2 x) {
    return (x[0] > -2.5 && x[0] < 1.0 && x[1] > 1.5 && x[1] < 2.5) ? 2.0
                                                                   : 1.0;
  };
  const Point2 focus{-1.5, 2.0};

  IncidentField field;
  field.kind = IncidentField::Kind::PointSourceSet;
  field.pulse_a = cfg.pulse_a;
  field.pulse_tc = cfg.pulse_tc;
  for (int k = 0; k < 9; ++k) {
    const double ang = (60.0 + 20.0 * k) * kPi / 180.0;
    field.sources.push_back({focus[0] + cfg.arc_radius * std::cos(ang),
                             focus[1] + cfg.arc_radius * std::sin(ang)});
    field.firing.push_back(cfg.t_focus - cfg.arc_radius);
  }

  ProblemData data;
  const BoundarySpaces probe = make_boundary_spaces(mesh);
  attach_incident_field(data, field, probe);

  auto [sys, state] = initialize(mesh, coeffs, data, g, cfg.T,
                                 cfg.dt_override, cfg.threads,
                                 quad_override(cfg, g));

  LshapeResult out;
  out.mesh = sys.mesh;
  out.dt = sys.dt;
  out.n_steps = sys.n_steps;

  double clearance = std::numeric_limits<double>::infinity();
  for (const Point2& s : field.sources)
    clearance = std::min(clearance, segment_distance(probe, s));
  const double visible = std::sqrt(std::log(1e12) / cfg.pulse_a);
  out.t_quiet =
      (cfg.t_focus - cfg.arc_radius) + cfg.pulse_tc - visible + clearance;

  const auto scan = [&](int n) {
    const double t = n * sys.dt;
    int idx = 0;
    const double m = state.u[n].size() > 0
                         ? state.u[n].cwiseAbs().maxCoeff(&idx)
                         : 0.0;
    if (m > out.max_field) {
      out.max_field = m;
      out.max_time = t;
      out.max_vertex = sys.mesh->vertices[idx];
    }
    if (t <= out.t_quiet)
      out.pre_arrival_max = std::max(out.pre_arrival_max, m);
  };
  scan(0);
  scan(1);
  while (state.n < sys.n_steps) {
    step(sys, state, data);
    scan(state.n);
  }
  out.energies = state.energies;
  out.focus_distance = std::hypot(out.max_vertex[0] - focus[0],
                                  out.max_vertex[1] - focus[1]);

  std::vector<double> times = cfg.snapshot_times;
  if (times.empty())
    times = {0.5 * cfg.t_focus, cfg.t_focus, 1.5 * cfg.t_focus};
  for (double ts : times) {
    const int idx = std::clamp(static_cast<int>(std::llround(ts / sys.dt)), 0,
                               sys.n_steps);
    out.snapshots.emplace_back(idx * sys.dt, state.u[idx]);
  }
  return out;
}

SelftestResult run_cq_selftest() {
  SelftestResult res;
  const auto record = [&res](bool ok, const std::string& name,
                             const std::string& detail) {
    res.lines.push_back(ok ? "PASS " + name
                           : "FAIL " + name + " (" + detail + ")");
    res.ok = res.ok && ok;
  };
  const double dt = 0.05;
  const int N = 128;
  const ContourParams p = default_contour(N, dt);
  const double lam_pow = std::pow(p.lambda, N + 1);
  const auto kid = [](Complex s) { return s; };
  const auto kinv = [](Complex s) { return 1.0 / s; };
  const auto max_abs = [](const std::vector<Complex>& v) {
    double m = 0.0;
    for (const Complex& z : v) m = std::max(m, std::abs(z));
    return m;
  };

  {
    const GeneratingFunction g = bdf2();
    const ScalarWeights w = scalar_weights(kid, g, p, "s");
    std::vector<double> expect(N + 1, 0.0);
    expect[0] = 1.5 / dt;
    expect[1] = -2.0 / dt;
    expect[2] = 0.5 / dt;
    double resid = 0.0;
    for (int j = 0; j <= N; ++j)
      resid = std::max(resid, std::abs(w.weights[j] - expect[j]) * dt);
    record(resid <= 10.0 * lam_pow, "bdf2 differentiation weights",
           "residual " + fmt17(resid));
  }
  {
    const GeneratingFunction g = bdf2();
    const ScalarWeights wa = scalar_weights(kid, g, p, "s");
    const ScalarWeights wb = scalar_weights(kinv, g, p, "1/s");
    double resid = 0.0;
    for (int j = 0; j <= N; ++j) {
      Complex conv = 0.0;
      for (int k = 0; k <= j; ++k) conv += wa.weights[k] * wb.weights[j - k];
      resid = std::max(resid, std::abs(conv - (j == 0 ? 1.0 : 0.0)));
    }
    record(resid <= 10.0 * lam_pow, "composition s * (1/s) = identity",
           "residual " + fmt17(resid));
  }
  {
    const GeneratingFunction g = paper_ttr();
    const ScalarWeights w = scalar_weights(kid, g, p, "s");
    const std::vector<double> poly = delta_poly_coeffs(g);
    double resid = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double e = j < static_cast<int>(poly.size()) ? poly[j] / dt : 0.0;
      resid = std::max(resid, std::abs(w.weights[j] - e) * dt);
    }
    const double scale =
        std::max(1.0, dt * max_abs(contour_frequencies(g, p)));
    record(resid <= 10.0 * lam_pow * scale, "ttr differentiation weights",
           "residual " + fmt17(resid));
  }
  {
    const GeneratingFunction g = trapezoidal();
    const ScalarWeights w = scalar_weights(kid, g, p, "s");
    double resid = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double e = (j == 0 ? 2.0 : 4.0 * (j % 2 ? -1.0 : 1.0)) / dt;
      resid = std::max(resid, std::abs(w.weights[j] - e) * dt);
    }
    const double scale =
        std::max(1.0, dt * max_abs(contour_frequencies(g, p)));
    record(resid <= 10.0 * lam_pow * scale, "tr differentiation weights",
           "residual " + fmt17(resid));
  }
  {
    // Herglotz smoke test: K = s, rho-weighted quadratic form stays
    // nonnegative up to the contour defect.
    bool ok = true;
    std::string detail;
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const HerglotzTestParams hp = herglotz_params(1.0, dt);
    for (const char* name : {"bdf2", "tr", "ttr"}) {
      const GeneratingFunction g = method_by_name(name);
      const int len = 32;
      const ContourParams ps = default_contour(len, dt);
      const ScalarWeights w = scalar_weights(kid, g, ps, "s");
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x(len + 1);
        for (double& v : x) v = unif(rng);
        double q = 0.0, norm = 0.0;
        for (int n = 0; n <= len; ++n) {
          const double conv = apply_history(w, x, n) +
                              w.weights[0].real() * x[n];
          const double rw = std::pow(hp.rho, 2.0 * n);
          q += rw * x[n] * conv;
          norm += rw * x[n] * x[n];
        }
        if (q < -1e-8 * norm / dt) {
          ok = false;
          detail = std::string(name) + " trial " + std::to_string(trial) +
                   " form " + fmt17(q);
        }
      }
    }
    record(ok, "herglotz positivity smoke", detail);
  }
  return res;
}

std::vector<TtrDesignRow> run_design_ttr(const std::vector<int>& js,
                                         int n_samples) {
  std::vector<TtrDesignRow> rows;
  for (int J : js) {
    const GeneratingFunction g = design_ttr(J, n_samples);
    const ExpansionReport rep = consistency_expansion(g);
    TtrDesignRow row;
    row.J = J;
    row.coeffs = g.ttr_coeffs;
    row.inv_e3 = 1.0 / std::abs(rep.e3);
    row.e4 = rep.e4;
    row.stability_min = check_a_stability(g, n_samples);
    rows.push_back(row);
  }
  return rows;
}

std::vector<StabilityCurve> run_stability_region(int n) {
  std::vector<StabilityCurve> curves;
  for (const char* name : {"bdf2", "tr", "ttr"}) {
    const GeneratingFunction g = method_by_name(name);
    StabilityCurve c;
    c.method = name;
    for (int k = 0; k < n; ++k) {
      const double theta = 2.0 * kPi * k / n;
      if (g.kind == MethodKind::TR && std::abs(theta - kPi) < 1e-9) continue;
      const Complex zeta{std::cos(theta), std::sin(theta)};
      c.theta.push_back(theta);
      c.boundary.push_back(eval_delta(g, zeta));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::string csv_convergence(const std::vector<ConvergenceRow>& rows) {
  std::string out;
  for (const ConvergenceRow& r : rows)
    if (r.cfl_warned)
      out += "# level " + std::to_string(r.level) +
             ": dt above the CFL bound\n";
  out += "level,h,dt,energy_error,observed_order\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ConvergenceRow& r = rows[i];
    out += std::to_string(r.level) + "," + fmt17(r.h) + "," + fmt17(r.dt) +
           "," + fmt17(r.energy_error) + ",";
    if (i > 0) out += fmt17(r.observed_order);
    out += "\n";
  }
  return out;
}

std::string csv_energy_log(const LshapeResult& r) {
  std::string out = "n,t,energy\n";
  for (std::size_t i = 0; i < r.energies.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    out += std::to_string(n) + "," + fmt17(n * r.dt) + "," +
           fmt17(r.energies[i]) + "\n";
  }
  return out;
}

std::string csv_stability(const StabilityCurve& c) {
  std::string out = "theta,re,im\n";
  for (std::size_t i = 0; i < c.boundary.size(); ++i)
    out += fmt17(c.theta[i]) + "," + fmt17(c.boundary[i].real()) + "," +
           fmt17(c.boundary[i].imag()) + "\n";
  return out;
}

std::string csv_ttr_design(const std::vector<TtrDesignRow>& rows) {
  int jmax = 2;
  for (const TtrDesignRow& r : rows) jmax = std::max(jmax, r.J);
  std::string out = "J,inv_e3,e4,stability_min";
  for (int j = 2; j <= jmax; ++j) out += ",c" + std::to_string(j);
  out += "\n";
  for (const TtrDesignRow& r : rows) {
    out += std::to_string(r.J) + "," + fmt17(r.inv_e3) + "," + fmt17(r.e4) +
           "," + fmt17(r.stability_min);
    for (int j = 2; j <= jmax; ++j) {
      out += ",";
      const int idx = j - 2;
      if (idx < static_cast<int>(r.coeffs.size()))
        out += fmt17(r.coeffs[idx]);
    }
    out += "\n";
  }
  return out;
}

std::string snapshot_text(const TriangleMesh& mesh, const Eigen::VectorXd& u,
                          double t) {
  std::string out = "# t = " + fmt17(t) + "\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    out += std::to_string(i) + " " + fmt17(mesh.vertices[i][0]) + " " +
           fmt17(mesh.vertices[i][1]) + " " +
           fmt17(u[static_cast<int>(i)]) + "\n";
  return out;
}

}  // namespace cqwave
