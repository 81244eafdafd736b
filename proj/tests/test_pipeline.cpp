#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "crackcell/config.hpp"
#include "crackcell/error.hpp"
#include "crackcell/io.hpp"
#include "crackcell/phantom.hpp"
#include "crackcell/pipeline.hpp"
#include "crackcell/postproc.hpp"
#include "test_helpers.hpp"

using namespace crackcell;
using crackcell::testing::scratch_dir;

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// small fully elastic bar pull: 6x6x12 phantom, 5 load steps
RunConfig bar_config(const std::string& dir) {
  PhantomSpec spec;
  spec.kind = "uniform-bar";
  spec.dims = {6, 6, 12};
  if (!fs::exists(dir + "/bar.json"))
    write_voxel_image(make_phantom(spec), dir + "/bar.json");

  RunConfig c;
  c.image = dir + "/bar.json";
  c.output_dir = dir + "/out";
  c.disc.h = 1.0;
  c.disc.p = 1;
  c.disc.depth = 0;
  c.material.nu = 0.0;
  c.solver.l0 = 2.0;
  c.solver.schedule.u_large = 0.004;
  c.solver.schedule.u_med = 0.002;
  c.solver.schedule.u_small = 0.001;
  c.solver.schedule.target = 0.02;

  BcConfig bottom;
  bottom.region = "z-";
  bottom.kind = "fixed";
  BcConfig top;
  top.region = "z+";
  top.kind = "prescribed";
  top.component = 2;
  top.driven = true;
  c.bcs = {bottom, top};

  ProbeConfig probe;
  probe.center = {3.0, 3.0, 6.0};
  probe.radius = 1.0;
  c.post.probes = {probe};
  return c;
}

}  // namespace

TEST_CASE("execute_run writes the full artifact set deterministically") {
  const std::string dir = scratch_dir("pipeline_run");
  const RunConfig config = bar_config(dir);
  validate_run_config(config, true);

  const RunArtifacts artifacts = execute_run(config);
  CHECK(artifacts.result.ok);
  CHECK(artifacts.result.termination == "target_reached");
  REQUIRE(artifacts.result.records.size() == 5);
  CHECK(artifacts.result.records.back().applied == doctest::Approx(0.02));

  for (const char* name : {"force_strain.csv", "state.cckp", "provenance.json",
                           "summary.json", "fields.vti", "crack.vtu"})
    CHECK(fs::exists(fs::path(config.output_dir) / name));

  // elastic pull: force grows monotonically, no peak yet
  double prev = 0.0;
  for (const auto& r : artifacts.result.records) {
    CHECK(r.force > prev);
    prev = r.force;
  }
  CHECK(!artifacts.peak.peak_detected);
  CHECK(artifacts.peak.force == artifacts.result.records.back().force);

  // provenance pins the exact config hash
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  CHECK(slurp(dir + "/out/provenance.json").find(hash_hex) !=
        std::string::npos);

  // a second identical run reproduces the CSV byte for byte
  RunConfig again = config;
  again.output_dir = dir + "/out2";
  execute_run(again);
  CHECK(slurp(dir + "/out/force_strain.csv") ==
        slurp(dir + "/out2/force_strain.csv"));
}

TEST_CASE("probe and postproc replay the checkpoint without resolving") {
  const std::string dir = scratch_dir("pipeline_replay");
  const RunConfig config = bar_config(dir);
  const RunArtifacts artifacts = execute_run(config);

  const std::vector<double> strains = execute_probe(config);
  REQUIRE(strains.size() == 1);
  CHECK(fs::exists(dir + "/out/probes.csv"));

  // the replayed probe sees the checkpointed displacement field bit for bit
  const Model model = build_from_config(config);
  ProbeSpec spec;
  spec.center = config.post.probes[0].center;
  spec.radius = config.post.probes[0].radius;
  CHECK(strains[0] == probe_strain(model, artifacts.result.state.u, spec));

  execute_postproc(config, dir + "/regen");
  CHECK(slurp(dir + "/out/force_strain.csv") ==
        slurp(dir + "/regen/force_strain.csv"));
  CHECK(fs::exists(dir + "/regen/report.json"));
  CHECK(fs::exists(dir + "/regen/fields.vti"));
  const std::string report = slurp(dir + "/regen/report.json");
  CHECK(report.find("failure_load_N") != std::string::npos);

  SUBCASE("a missing checkpoint is reported with its path") {
    RunConfig cold = config;
    cold.output_dir = dir + "/never_ran";
    CHECK_THROWS_AS(execute_probe(cold), Error);
  }
}

TEST_CASE("probe on a uniform compression run returns the axial strain") {
  const std::string dir = scratch_dir("pipeline_compress");
  RunConfig config = bar_config(dir);
  config.solver.schedule.target = -0.02;  // push down instead
  execute_run(config);

  const std::vector<double> strains = execute_probe(config);
  REQUIRE(strains.size() == 1);
  // nu = 0: the minimum principal strain is the axial one, -delta / L
  const double expected = -0.02 / 12.0 * 1e6;  // microstrain
  CHECK(strains[0] == doctest::Approx(expected).epsilon(5e-3));
}

TEST_CASE("execute_calibrate ranks the generating parameter first") {
  const std::string dir = scratch_dir("pipeline_calibrate");
  RunConfig config = bar_config(dir);
  execute_run(config);

  config.output_dir = dir + "/sweep_out";
  SweepConfig sweep;
  sweep.parameter = "l0";
  sweep.values = {2.0, 3.0};
  sweep.reference_csv = dir + "/out/force_strain.csv";
  sweep.metric = "failure_load";
  config.sweep = sweep;

  const SweepResult result = execute_calibrate(config);
  REQUIRE(result.ranked.size() == 2);
  CHECK(result.ranked[0].value == 2.0);
  CHECK(result.ranked[0].ok);
  // the reference is this very config's output: the match is exact
  CHECK(result.ranked[0].metric_value == 0.0);
  CHECK(result.ranked[1].value == 3.0);
  CHECK(result.ranked[1].metric_value > 0.0);

  CHECK(fs::exists(dir + "/sweep_out/sweep.csv"));
  CHECK(fs::exists(dir + "/sweep_out/sweep_summary.json"));
  const std::string csv = slurp(dir + "/sweep_out/sweep.csv");
  CHECK(csv.find("rank,parameter,value,status") == 0);

  SUBCASE("calibrate without a sweep block is an error") {
    RunConfig no_sweep = bar_config(dir);
    no_sweep.sweep.reset();
    CHECK_THROWS_AS(execute_calibrate(no_sweep), Error);
  }
}

TEST_CASE("scanner calibration follows sidecar unless the config overrides") {
  const std::string dir = scratch_dir("pipeline_hu");
  PhantomSpec spec;
  spec.kind = "uniform-bar";
  spec.dims = {4, 4, 8};
  VoxelImage img = make_phantom(spec);
  img.kind = ImageKind::Hu;
  std::fill(img.values.begin(), img.values.end(), 500.0);
  write_voxel_image(img, dir + "/scan.json", "int16", 0.0012, 0.05);

  RunConfig config = bar_config(dir);
  config.image = dir + "/scan.json";

  const Model from_sidecar = build_from_config(config);
  CHECK(from_sidecar.laws.hu_slope == 0.0012);
  CHECK(from_sidecar.laws.hu_intercept == 0.05);

  config.material.hu_slope = 0.002;
  config.material.hu_intercept = 0.0;
  const Model overridden = build_from_config(config);
  CHECK(overridden.laws.hu_slope == 0.002);
  CHECK(overridden.laws.hu_intercept == 0.0);
}
