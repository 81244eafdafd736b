#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "crackcell/postproc.hpp"
#include "crackcell/solver.hpp"

namespace crackcell {

// Length-scale (or beta / Gc0) sweep: run one simulation per candidate
// value, score each against a reference force-strain curve, rank ascending.
struct SweepSpec {
  std::string parameter = "l0";  // l0 | beta | Gc0
  std::vector<double> values;
  std::vector<ForceStrainRecord> reference;
  std::string metric = "failure_load";  // failure_load | curve_rmse
};

struct SweepEntry {
  double value = 0.0;
  bool ok = false;
  std::string error;  // failure reason for runs that did not finish
  double failure_load = std::numeric_limits<double>::quiet_NaN();
  int peak_step = 0;
  double metric_value = std::numeric_limits<double>::infinity();
  std::vector<ForceStrainRecord> records;
};

struct SweepResult {
  std::vector<SweepEntry> ranked;  // ascending metric; ties favor the
                                   // smaller parameter value
  double reference_failure_load = 0.0;
};

using CandidateRunner =
    std::function<RunResult(const std::string& parameter, double value)>;

// Runs every candidate through `runner`. A candidate that throws or returns
// a failed result is recorded with its error and ranked last; the sweep
// continues. Throws Error for an empty candidate list or a reference with
// fewer than 2 records.
SweepResult run_sweep(const SweepSpec& spec, const CandidateRunner& runner);

// Relative failure-load error of records against the reference peak.
double failure_load_error(std::span<const ForceStrainRecord> records,
                          std::span<const ForceStrainRecord> reference);

// Root-mean-square force deviation, candidate force linearly interpolated
// onto the reference applied-displacement samples within the overlap.
// Returns infinity when fewer than 2 reference samples overlap.
double curve_rmse(std::span<const ForceStrainRecord> records,
                  std::span<const ForceStrainRecord> reference);

}  // namespace crackcell
