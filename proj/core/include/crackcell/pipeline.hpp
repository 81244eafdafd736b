#pragma once

#include <string>
#include <vector>

#include "crackcell/calibrate.hpp"
#include "crackcell/config.hpp"
#include "crackcell/model.hpp"
#include "crackcell/solver.hpp"

namespace crackcell {

// Builds the model a config describes: loads the voxel image (folding any
// sidecar HU calibration into the material laws unless the config overrides
// it), reads STL boundary regions, and assembles the discretization.
Model build_from_config(const RunConfig& config);

StaggeredConfig make_staggered_config(const RunConfig& config);
LoadSchedule make_load_schedule(const RunConfig& config);

struct RunArtifacts {
  std::string output_dir;
  RunResult result;
  FailureLoad peak;
  double wall_seconds = 0.0;
};

// Full simulation per config. Writes into output_dir: force_strain.csv,
// state.cckp, provenance.json, summary.json and, when postproc.vtk is on,
// fields.vti + crack.vtu. The checkpoint and CSV are written even when the
// run ends fatally.
RunArtifacts execute_run(const RunConfig& config);

// Sweep per config.sweep (required): one run per candidate against the
// reference curve. Writes sweep.csv (ranked), per-candidate force-strain
// CSVs, and sweep_summary.json.
SweepResult execute_calibrate(const RunConfig& config);

// Evaluates every configured probe on the checkpointed state; returns the
// strains [microstrain] in config order and writes probes.csv. The
// checkpoint is read from the config's output_dir; out_dir redirects the
// written artifacts (empty = config's output_dir).
std::vector<double> execute_probe(const RunConfig& config,
                                  const std::string& out_dir = {});

// Regenerates CSV/VTK artifacts and report.json from the checkpoint without
// re-solving. The report carries the failure load, the relative error
// against the sweep reference curve when one is configured, and the
// regression table against measured data when configured. The checkpoint is
// read from the config's output_dir; out_dir redirects the written
// artifacts (empty = config's output_dir).
void execute_postproc(const RunConfig& config,
                      const std::string& out_dir = {});

}  // namespace crackcell
