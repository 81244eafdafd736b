#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace crackcell {

// Run configuration, one JSON file. Parsing is strict: unknown keys and
// wrong types are rejected with the full key path. Relative paths are
// resolved against the directory containing the config file.

struct BcConfig {
  std::string region;          // box face ("x-".."z+") or an .stl path
  std::string kind = "fixed";  // fixed | prescribed
  int component = 2;
  bool driven = false;
  double value = 0.0;
  double penalty_scale = 1e3;
  std::string label;
};

struct DiscretizationConfig {
  double h = 1.25;  // [mm]
  int p = 3;
  int depth = 2;
  std::string basis = "bspline";  // bspline | integrated_legendre
};

struct MaterialConfig {
  double E0 = 20000.0;
  double Gc0 = 7.0;
  double beta = 0.8;
  double nu = 0.3;
  double eta = 1e-5;
  double alpha_fcm = 1e-6;
  // unset: taken from the image sidecar when present, else 1e-3 / 0
  std::optional<double> hu_slope;
  std::optional<double> hu_intercept;
};

struct ScheduleConfig {
  double u_large = 0.04;  // [mm]
  double u_med = 0.002;
  double u_small = 0.001;
  double onset_switch = 0.5;
  double smin_switch = 0.9;
  double target = 1.0;
  double stop_force_fraction = 0.25;
};

struct SolverConfig {
  double eps_stag = 1e-5;
  int n_stag = 25;
  double l0 = 2.25;  // [mm]
  ScheduleConfig schedule;
};

struct ProbeConfig {
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  double radius = 0.5;  // [mm]
};

struct IsoConfig {
  double s_low = 0.0;
  double s_high = 0.03;
  double warp = 8.0;
  int samples_per_cell = 0;  // 0 picks twice the quadrature density
};

struct PostprocConfig {
  std::vector<ProbeConfig> probes;
  IsoConfig iso;
  bool vtk = true;
};

struct SweepConfig {
  std::string parameter = "l0";  // l0 | beta | Gc0
  std::vector<double> values;
  std::string reference_csv;             // force-strain CSV
  std::string metric = "failure_load";   // failure_load | curve_rmse
};

struct MeasuredConfig {
  std::string values_csv;
  std::string points_csv;
};

struct RunConfig {
  std::string image;  // voxel sidecar path
  std::string output_dir = "out";
  DiscretizationConfig disc;
  MaterialConfig material;
  SolverConfig solver;
  std::vector<BcConfig> bcs;
  PostprocConfig post;
  std::optional<SweepConfig> sweep;
  std::optional<MeasuredConfig> measured;
};

// Parses config text. anchor_dir, when non-empty, is prepended to every
// relative path. No filesystem checks happen here.
RunConfig parse_run_config(const std::string& text,
                           const std::string& anchor_dir = "");

// Reads the file, resolves paths against its directory, and validates
// including path existence. Throws Error naming the offending key.
RunConfig load_run_config(const std::string& path);

// Canonical serialization; parse(serialize(c)) reproduces c exactly.
std::string serialize_run_config(const RunConfig& config);

// Re-validates every invariant (ranges, orderings, bc shape) and, when
// check_paths is set, that referenced files exist.
void validate_run_config(const RunConfig& config, bool check_paths);

std::uint64_t config_hash(const RunConfig& config);

}  // namespace crackcell
