#pragma once

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cqwave/coupled.hpp"
#include "cqwave/genfun.hpp"
#include "cqwave/mesh.hpp"

namespace cqwave {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key = value configuration with [run], [quadrature], [disk], [lshape]
/// sections; '#' starts a comment; keys before a header belong to [run].
/// Unknown sections, keys, or enum values are rejected.
struct ExperimentConfig {
  std::string experiment = "convergence-disk";
  std::string method = "bdf2";
  std::vector<int> levels{1, 2, 3, 4};
  double T = 2.0;
  std::string out_dir = ".";
  double dt_override = 0.0;  // 0 = CFL step
  int threads = 1;
  std::vector<double> snapshot_times;  // empty = lshape picks three defaults
  int n_gauss = 0;  // [quadrature]; 0 = method default
  int n_near = 0;
  int near_levels = 0;
  double disk_radius = 3.0;  // [disk] radius
  int lshape_level = 3;      // [lshape] level
  double t_focus = 2.8;
  double pulse_a = 16.0;
  double pulse_tc = 1.5;
  double arc_radius = 2.5;
};

void apply_config_text(const std::string& text, ExperimentConfig& cfg);
void apply_config_file(const std::string& path, ExperimentConfig& cfg);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);
/// Inverse of parse_config_text: parse(render(cfg)) reproduces cfg.
std::string render_config(const ExperimentConfig& cfg);

/// "bdf2" | "tr" | "ttr" (the published coefficients); else ConfigError.
GeneratingFunction method_by_name(const std::string& name);

/// 17-significant-digit decimal rendering (lossless for doubles).
std::string fmt17(double x);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double dt = 0.0;
  double energy_error = 0.0;
  double observed_order = 0.0;  // log2(err_prev / err); 0 for the first row
  bool cfl_warned = false;
};

/// Disk transmission runs at cfg.levels with u0 = exp(-2|x|^2), v0 = 0 and
/// no incident field, errors against the Hankel-integral solution.
std::vector<ConvergenceRow> run_convergence_disk(const ExperimentConfig& cfg);

struct LshapeResult {
  std::shared_ptr<const TriangleMesh> mesh;
  double dt = 0.0;
  int n_steps = 0;
  std::vector<double> energies;  // E_1..E_N
  double t_quiet = 0.0;          // last time provably before first arrival
  double pre_arrival_max = 0.0;  // max |u| over steps with t_n <= t_quiet
  double max_field = 0.0;        // max |u| over the whole run
  double max_time = 0.0;
  Point2 max_vertex{0.0, 0.0};
  double focus_distance = 0.0;  // |max_vertex - focus|
  std::vector<std::pair<double, Eigen::VectorXd>> snapshots;
};

/// L-shape run: piecewise speed c = 2 on (-2.5,1)x(1.5,2.5), else 1; nine
/// point sources on the arc of radius cfg.arc_radius around the focus
/// (-1.5, 2), fired so all arrivals align at t_focus.
LshapeResult run_lshape_focus(const ExperimentConfig& cfg);

struct SelftestResult {
  std::vector<std::string> lines;  // "PASS name" / "FAIL name (detail)"
  bool ok = true;
};

/// Scalar CQ checks: BDF2/TTR/TR differentiation weights, composition
/// s * (1/s) = identity, and a Herglotz positivity smoke test.
SelftestResult run_cq_selftest();

struct TtrDesignRow {
  int J = 0;
  std::vector<double> coeffs;  // c_2..c_J
  double inv_e3 = 0.0;
  double e4 = 0.0;
  double stability_min = 0.0;
};

std::vector<TtrDesignRow> run_design_ttr(const std::vector<int>& js,
                                         int n_samples);

struct StabilityCurve {
  std::string method;
  std::vector<double> theta;
  std::vector<Complex> boundary;  // delta(e^{i theta}); TR skips its pole
};

std::vector<StabilityCurve> run_stability_region(int n);

/// Writers; all throw ConfigError with the path on open failure and create
/// cfg.out_dir on demand. CSV cells use fmt17.
void write_text_file(const std::string& path, const std::string& content);
std::string csv_convergence(const std::vector<ConvergenceRow>& rows);
std::string csv_energy_log(const LshapeResult& r);
std::string csv_stability(const StabilityCurve& c);
std::string csv_ttr_design(const std::vector<TtrDesignRow>& rows);
/// Snapshot grid: "# t = <time>" then "i x y value" per vertex.
std::string snapshot_text(const TriangleMesh& mesh, const Eigen::VectorXd& u,
                          double t);

}  // namespace cqwave
