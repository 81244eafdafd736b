#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crackcell/assembly.hpp"
#include "crackcell/linear_solver.hpp"
#include "crackcell/model.hpp"
#include "crackcell/postproc.hpp"

namespace crackcell {

// Adaptive displacement increments: the large step runs until a damage-onset
// proxy (max of 4 l0 (1-eta) H / Gc) crosses onset_switch, the medium step
// until min s drops below smin_switch, then the small step resolves failure.
struct LoadSchedule {
  double u_large = 0.04;   // [mm]
  double u_med = 0.002;
  double u_small = 0.001;
  double onset_switch = 0.5;
  double smin_switch = 0.9;
  double target = 1.0;     // signed total displacement [mm]
  double stop_force_fraction = 0.25;  // post-peak termination threshold
};

struct StaggeredConfig {
  double eps_stag = 1e-5;
  int n_stag = 25;
  double l0 = 2.25;  // [mm]
  LinearOptions linear;
};

struct StaggeredDiagnostics {
  int iterations = 0;
  double r_u = 0.0;  // normalized momentum residual after the last iteration
  double r_s = 0.0;  // normalized phase residual
  bool converged = false;
};

// Alternate-minimization sweep for one displacement increment. Each
// iteration solves momentum with s frozen, grows the history field, then
// solves the phase equation; the normalized true residuals of Eq-level
// balance drive the convergence test. Exceeding n_stag accepts the state
// with a warning (converged = false). Holds per-system solver instances so
// symbolic factorization is reused across steps.
class StaggeredSolver {
 public:
  StaggeredSolver(const Model& model, StaggeredConfig config);

  StaggeredDiagnostics advance(FieldState& state, double applied);
  const StaggeredConfig& config() const { return config_; }

 private:
  const Model& model_;
  StaggeredConfig config_;
  LinearSolver elastic_solver_;
  LinearSolver phase_solver_;
};

// Convenience single-shot wrapper around StaggeredSolver::advance.
StaggeredDiagnostics staggered_step(const Model& model, FieldState& state,
                                    double applied,
                                    const StaggeredConfig& config);

using StepObserver =
    std::function<void(const ForceStrainRecord&, const FieldState&)>;

struct RunResult {
  std::vector<ForceStrainRecord> records;
  FieldState state;
  std::string termination;  // target_reached | post_peak | fatal: ...
  bool ok = true;
};

// Quasi-static displacement-driven run. Requires a driven boundary
// condition. Probe strains are recorded when a probe is given (NaN on probe
// failure). A fatal solver error stops the run and is reported in
// termination; the partial state and records are returned.
RunResult run_simulation(const Model& model, const LoadSchedule& schedule,
                         const StaggeredConfig& config,
                         const std::optional<ProbeSpec>& probe = {},
                         const StepObserver& observer = {});

}  // namespace crackcell
