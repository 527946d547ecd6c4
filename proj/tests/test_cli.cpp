#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

// CQWAVE_CLI is the installed tool path, injected by the build.

namespace {

namespace fs = std::filesystem;

int exit_code(const std::string& args) {
  const std::string cmd = std::string(CQWAVE_CLI) + " " + args +
                          " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() /
                     ("cqwave_cli_" + std::to_string(::getpid()) + "_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE_MESSAGE(bool(in), "missing file ", p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("cq-selftest exits cleanly") {
  CHECK(exit_code("cq-selftest") == 0);
}

TEST_CASE("stability-region writes one curve per method") {
  const fs::path dir = fresh_dir("stab");
  REQUIRE(exit_code("stability-region --out " + dir.string()) == 0);

  for (const char* m : {"bdf2", "tr", "ttr"}) {
    CAPTURE(m);
    const auto rows = lines_of(slurp(dir / ("stability_" + std::string(m) +
                                            ".csv")));
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == "theta,re,im");
    double th = -1, re = -1, im = -1;
    REQUIRE(std::sscanf(rows[1].c_str(), "%lf,%lf,%lf", &th, &re, &im) == 3);
    CHECK(th == 0.0);  // curve starts at theta = 0 where delta(1) = 0
    CHECK(std::abs(re) < 1e-15);
    CHECK(std::abs(im) < 1e-15);
  }
  // the trapezoidal curve drops its pole at theta = pi
  CHECK(lines_of(slurp(dir / "stability_bdf2.csv")).size() == 2001);
  CHECK(lines_of(slurp(dir / "stability_tr.csv")).size() == 2000);
  fs::remove_all(dir);
}

TEST_CASE("design-ttr writes the coefficient table") {
  const fs::path dir = fresh_dir("ttr");
  REQUIRE(exit_code("design-ttr --out " + dir.string()) == 0);
  const auto rows = lines_of(slurp(dir / "ttr_design.csv"));
  REQUIRE(rows.size() == 4);  // header + J = 2, 3, 4
  CHECK(rows[0].rfind("J,inv_e3,e4,stability_min", 0) == 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    int j = 0;
    double inv_e3 = 0;
    REQUIRE(std::sscanf(rows[i].c_str(), "%d,%lf", &j, &inv_e3) == 2);
    CHECK(j == static_cast<int>(i) + 1);
    CHECK(inv_e3 > 5.0);  // every design beats plain BDF2 (1/|e3| = 3)
  }
  fs::remove_all(dir);
}

TEST_CASE("convergence-disk quick run is deterministic") {
  const fs::path d1 = fresh_dir("conv1");
  const fs::path d2 = fresh_dir("conv2");
  const std::string args = "convergence-disk --levels 2,3 --T 0.5 "
                           "--method bdf2 --out ";
  REQUIRE(exit_code(args + d1.string()) == 0);
  REQUIRE(exit_code(args + d2.string()) == 0);

  const std::string c1 = slurp(d1 / "convergence_bdf2.csv");
  CHECK(c1 == slurp(d2 / "convergence_bdf2.csv"));

  const auto rows = lines_of(c1);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "level,h,dt,energy_error,observed_order");
  int level = 0;
  double h = 0, dt = 0, err = 0;
  REQUIRE(std::sscanf(rows[1].c_str(), "%d,%lf,%lf,%lf", &level, &h, &dt,
                      &err) == 4);
  CHECK(level == 2);
  CHECK(h > 0.0);
  CHECK(dt > 0.0);
  CHECK(err > 0.0);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("bad invocations exit with the configuration code") {
  CHECK(exit_code("") == 2);  // a subcommand is required
  CHECK(exit_code("convergence-disk --bogus 1") == 2);
  CHECK(exit_code("convergence-disk --method foo") == 2);
  CHECK(exit_code("convergence-disk --config /nonexistent/cfg.ini") == 2);

  const fs::path dir = fresh_dir("cfg");
  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << "unknown_key = 3\n";
  CHECK(exit_code("convergence-disk --config " + bad.string()) == 2);
  const fs::path bad2 = dir / "bad2.ini";
  std::ofstream(bad2) << "[run]\nT = quick\n";
  CHECK(exit_code("convergence-disk --config " + bad2.string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("lshape run writes the energy log and snapshots") {
  const fs::path dir = fresh_dir("lshape");
  const fs::path cfg = dir / "run.ini";
  std::ofstream(cfg) << "[run]\nT = 2\n[lshape]\nlevel = 1\n";
  REQUIRE(exit_code("lshape --config " + cfg.string() + " --out " +
                    dir.string()) == 0);

  const auto energy = lines_of(slurp(dir / "lshape_energy_bdf2.csv"));
  REQUIRE(energy.size() >= 3);
  CHECK(energy[0] == "n,t,energy");

  for (const char* name : {"lshape_snapshot_00.txt", "lshape_snapshot_01.txt",
                           "lshape_snapshot_02.txt"}) {
    CAPTURE(name);
    const auto rows = lines_of(slurp(dir / name));
    REQUIRE(rows.size() > 10);
    CHECK(rows[0].rfind("# t = ", 0) == 0);
    int idx = -1;
    double x = 0, y = 0, v = 0;
    REQUIRE(std::sscanf(rows[1].c_str(), "%d %lf %lf %lf", &idx, &x, &y,
                        &v) == 4);
    CHECK(idx == 0);
  }
  fs::remove_all(dir);
}
