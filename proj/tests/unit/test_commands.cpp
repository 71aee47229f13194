#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ksrobin/commands.hpp"

using namespace ksr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ksrobin_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_cfg(const fs::path& dir, const std::string& text) {
  const auto p = dir / "case.cfg";
  std::ofstream(p) << text;
  return p;
}

const char* small_run =
    "params.chi = 1\nparams.h = 1\nparams.alpha = 0.5\nparams.tau = 1\n"
    "grid.cells = 32\ntime.t_end = 0.1\ntime.sample_interval = 0.02\n"
    "initial.u.amplitude = 2\ninitial.u.width = 0.5\noutput.snapshot_times = 0, 0.1\n"
    "output.snapshot_resolution = 16\n";

} // namespace

TEST_CASE("timeseries format") {
  const auto dir = scratch("dat");
  write_timeseries_dat({{0.0, 1.0}, {1.0, 2.0}}, (dir / "s.dat").string());
  CHECK(slurp(dir / "s.dat") == "a b\n0 1\n1 2\n");
  CHECK_THROWS_AS(write_timeseries_dat({}, (dir / "e.dat").string()), ValidationError);
  CHECK_THROWS_AS(write_timeseries_dat({{0.0, 1.0}}, "/nonexistent/dir/x.dat"), ComputeError);
}

TEST_CASE("snapshot format") {
  const auto dir = scratch("csv");
  Image2D img{2, -1, 1, -1, 1, {std::nan(""), 1.5, 2.0, 3.0}};
  write_snapshot_csv(img, (dir / "s.csv").string());
  CHECK(slurp(dir / "s.csv") ==
        "# x_min x_max y_min y_max resolution\n# -1 1 -1 1 2\nNaN,1.5\n2,3\n");
  img.values.pop_back();
  CHECK_THROWS_AS(write_snapshot_csv(img, (dir / "t.csv").string()), ValidationError);
}

TEST_CASE("worker count from the environment") {
  ::setenv(workers_env, "3", 1);
  CHECK(worker_count() == 3);
  ::setenv(workers_env, "0", 1);
  CHECK_THROWS_AS(worker_count(), ValidationError);
  ::setenv(workers_env, "two", 1);
  CHECK_THROWS_AS(worker_count(), ValidationError);
  ::unsetenv(workers_env);
  CHECK(worker_count() >= 1);
}

TEST_CASE("classify command") {
  ClassifyRequest r;
  try {
    cmd_classify(r);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "missing required parameters: --tau --chi --h --alpha --b --c");
  }
  r.tau = 0;
  r.chi = 1;
  r.h = 1;
  r.alpha = 1;
  r.b = 1;
  r.c = 1;
  r.trace_c = 1;
  const auto res = cmd_classify(r);
  CHECK(res.verdict.bounded);
  CHECK(res.text.find("verdict: bounded\n") == 0);
  CHECK(res.text.find("witness: eps1 = 2, eps2 = 0.6875") != std::string::npos);
  CHECK(res.text.find("user-supplied") != std::string::npos);

  r.trace_c.reset();
  r.cells = 256;
  const auto est = cmd_classify(r);
  CHECK(est.trace.kind == TraceConstantKind::EstimatedLowerBound);
  CHECK(est.trace.value >= 2.0 - 1e-12);

  r.tau = 2;
  CHECK_THROWS_AS(cmd_classify(r), ValidationError);
}

TEST_CASE("run command writes its files deterministically") {
  const auto dir = scratch("run");
  const auto cfg = write_cfg(dir, small_run);
  const auto a = cmd_run(cfg.string(), (dir / "a").string());
  const auto b = cmd_run(cfg.string(), (dir / "b").string());
  CHECK(a.run_id == b.run_id);
  CHECK(a.status == "completed");
  for (const char* f : {"plotMax.dat", "plotMass.dat", "diagnostics.tsv", "config.resolved",
                        "manifest.json", "snapshot_t0.csv", "snapshot_t0.1.csv"}) {
    INFO(f);
    REQUIRE(fs::exists(dir / "a" / f));
    if (std::string(f) != "manifest.json") CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  CHECK(slurp(dir / "a" / "plotMass.dat").rfind("a b\n0 ", 0) == 0);
  const auto echoed = to_run_spec(load_config((dir / "a" / "config.resolved").string()));
  CHECK(content_hash(echoed.canonical) == a.run_id);
}

TEST_CASE("run command errors") {
  const auto dir = scratch("runerr");
  CHECK_THROWS_AS(cmd_run((dir / "missing.cfg").string()), ComputeError);
  const auto cfg = write_cfg(dir, "domain.n = 3\noutput.snapshot_times = 0\n");
  CHECK_THROWS_AS(cmd_run(cfg.string(), (dir / "o").string()), ValidationError);
}

TEST_CASE("compare command") {
  const auto dir = scratch("compare");
  const auto cfg = write_cfg(dir, std::string(small_run) +
                                      "compare.variants = R, N\nvariant.N.params.alpha = 0\n");
  const auto m = cmd_compare(cfg.string(), (dir / "o").string());
  for (const char* f : {"plotMaxR.dat", "plotMassN.dat", "diagnostics_R.tsv", "comparison.tsv"})
    CHECK(fs::exists(dir / "o" / f));
}

TEST_CASE("classify-only sweep") {
  const auto dir = scratch("sweep");
  const auto cfg = write_cfg(dir,
                             "params.tau = 0\nparams.alpha = 1\nsweep.source.b = 0.5, 2\n"
                             "sweep.source.c = 0.1, 1\nsweep.classify_only = true\n"
                             "sweep.trace_c = 1\n");
  ::setenv(workers_env, "2", 1);
  const auto m = cmd_sweep(cfg.string(), (dir / "o").string());
  ::unsetenv(workers_env);
  const auto table = slurp(dir / "o" / "sweep.tsv");
  std::istringstream in(table);
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("source.b\tsource.c\tverdict", 0) == 0);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK(table.find("\tbounded\t") != std::string::npos);
}
