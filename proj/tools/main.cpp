#include <cstdio>
#include <exception>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "harness.hpp"

namespace {

using namespace cqwave;

int dispatch(const ExperimentConfig& cfg) {
  if (cfg.experiment == "convergence-disk") {
    const std::vector<ConvergenceRow> rows = run_convergence_disk(cfg);
    const std::string path =
        cfg.out_dir + "/convergence_" + cfg.method + ".csv";
    write_text_file(path, csv_convergence(rows));
    std::printf("level        h       dt  energy_error  order\n");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const ConvergenceRow& r = rows[i];
      std::printf("%5d  %7.4f  %7.5f  %12.6e", r.level, r.h, r.dt,
                  r.energy_error);
      if (i > 0)
        std::printf("  %5.2f\n", r.observed_order);
      else
        std::printf("      -\n");
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
  }
  if (cfg.experiment == "lshape") {
    const LshapeResult r = run_lshape_focus(cfg);
    const std::string log_path =
        cfg.out_dir + "/lshape_energy_" + cfg.method + ".csv";
    write_text_file(log_path, csv_energy_log(r));
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "/lshape_snapshot_%02zu.txt", k);
      write_text_file(cfg.out_dir + name,
                      snapshot_text(*r.mesh, r.snapshots[k].second,
                                    r.snapshots[k].first));
    }
    std::printf("steps %d, dt %.6g\n", r.n_steps, r.dt);
    std::printf("pre-arrival max |u| = %.3e (t <= %.3f)\n",
                r.pre_arrival_max, r.t_quiet);
    std::printf("peak |u| = %.6g at t = %.4f, x = (%.4f, %.4f), "
                "%.4f from the focus\n",
                r.max_field, r.max_time, r.max_vertex[0], r.max_vertex[1],
                r.focus_distance);
    std::printf("wrote %s and %zu snapshots\n", log_path.c_str(),
                r.snapshots.size());
    return 0;
  }
  if (cfg.experiment == "cq-selftest") {
    const SelftestResult r = run_cq_selftest();
    for (const std::string& line : r.lines) std::printf("%s\n", line.c_str());
    return r.ok ? 0 : 3;
  }
  if (cfg.experiment == "design-ttr") {
    const std::vector<TtrDesignRow> rows = run_design_ttr({2, 3, 4}, 50000);
    const std::string path = cfg.out_dir + "/ttr_design.csv";
    write_text_file(path, csv_ttr_design(rows));
    for (const TtrDesignRow& r : rows) {
      std::printf("J=%d  1/|e3| = %.6f  e4 = %.6e  stability min = %.3e  c =",
                  r.J, r.inv_e3, r.e4, r.stability_min);
      for (double c : r.coeffs) std::printf(" %.12f", c);
      std::printf("\n");
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
  }
  // stability-region
  const std::vector<StabilityCurve> curves = run_stability_region(2000);
  for (const StabilityCurve& c : curves) {
    const std::string path = cfg.out_dir + "/stability_" + c.method + ".csv";
    write_text_file(path, csv_stability(c));
    double min_re = std::numeric_limits<double>::infinity();
    for (const Complex& z : c.boundary) min_re = std::min(min_re, z.real());
    std::printf("%s: %zu samples, min Re delta = %.3e, wrote %s\n",
                c.method.c_str(), c.boundary.size(), min_re, path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acoustic wave scattering: coupled leapfrog/CQ experiments"};
  app.require_subcommand(1);

  std::string config_path, method, levels_str, out_dir;
  double final_time = 0.0;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--method", method, "bdf2 | tr | ttr");
    sub->add_option("--levels", levels_str, "comma-separated mesh levels");
    sub->add_option("--T", final_time, "final time");
    sub->add_option("--out", out_dir, "output directory");
  };
  add_common(app.add_subcommand("convergence-disk",
                                "disk convergence study vs the exact solution"));
  add_common(app.add_subcommand("lshape",
                                "L-shape focusing run with nine sources"));
  add_common(app.add_subcommand("cq-selftest",
                                "convolution-quadrature weight checks"));
  add_common(app.add_subcommand("design-ttr",
                                "optimize truncated-trapezoidal coefficients"));
  add_common(app.add_subcommand("stability-region",
                                "sample delta(e^{i theta}) per method"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cqwave::ExperimentConfig cfg;
    cfg.experiment = sub->get_name();
    if (cfg.experiment == "lshape") cfg.T = 6.0;
    if (sub->count("--config")) {
      cqwave::apply_config_file(config_path, cfg);
      cfg.experiment = sub->get_name();
    }
    if (sub->count("--method")) cfg.method = method;
    if (sub->count("--levels")) {
      cqwave::ExperimentConfig probe;
      cqwave::apply_config_text("levels = " + levels_str, probe);
      cfg.levels = probe.levels;
    }
    if (sub->count("--T")) cfg.T = final_time;
    if (sub->count("--out")) cfg.out_dir = out_dir;
    cqwave::method_by_name(cfg.method);
    return dispatch(cfg);
  } catch (const cqwave::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
