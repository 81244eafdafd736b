#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "crackcell/model.hpp"

namespace crackcell {

// One load step of the force-strain history. Strain is the probe value in
// microstrain; force is the reaction component along the driven direction.
struct ForceStrainRecord {
  int step = 0;
  double applied = 0.0;       // prescribed displacement [mm]
  double force = 0.0;         // [N]
  double strain_micro = 0.0;  // probe strain [microstrain], NaN without probe
  int stag_iterations = 0;
  bool converged = true;
};

struct ProbeSpec {
  Eigen::Vector3d center{0.0, 0.0, 0.0};
  double radius = 0.5;  // [mm]
};

// Minimum principal strain averaged over a sphere, in microstrain. The
// average runs over an antipodally symmetric sample set restricted to the
// ball and to physical material, so for linearly varying strain fields it
// reproduces the center value exactly. radius = 0 falls back to the value at
// the nearest physical quadrature point. Throws Error when the sphere
// contains no physical material.
double probe_strain(const Model& model, const Eigen::VectorXd& u,
                    const ProbeSpec& probe);

// Eigenvalues in descending order with matching eigenvector columns.
void principal_values(const Eigen::Matrix3d& tensor, Eigen::Vector3d& values,
                      Eigen::Matrix3d& directions);

struct FailureLoad {
  double force = 0.0;   // max |force|, signed as recorded
  int step = 0;
  bool peak_detected = false;  // a later record fell below the peak
};

FailureLoad failure_load(std::span<const ForceStrainRecord> records);

// Axis-aligned sample boxes whose phase-field value lies in [s_low, s_high]
// and whose center sits in physical material; corners are warped by
// warp_scale times the displacement. samples_per_cell <= 0 picks twice the
// quadrature density (2 (p+1) per axis).
struct IsoVolume {
  double s_low = 0.0, s_high = 1.0;
  Eigen::Vector3d box_size{0.0, 0.0, 0.0};
  std::vector<Eigen::Vector3d> centers;
  std::vector<double> s_values;
  std::vector<std::array<Eigen::Vector3d, 8>> corners;  // warped
};

IsoVolume crack_isovolume(const Model& model, const FieldState& state,
                          double s_low, double s_high, double warp_scale,
                          int samples_per_cell = 0);

struct RegressionStats {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rmse = 0.0;
  double mean_abs_rel_err_pct = 0.0;  // over |measured| >= 10 microstrain
  std::int64_t n = 0;
};

// Ordinary least squares of computed on measured. Throws Error for size
// mismatch or fewer than 3 pairs.
RegressionStats regression(std::span<const double> measured,
                           std::span<const double> computed);

}  // namespace crackcell
