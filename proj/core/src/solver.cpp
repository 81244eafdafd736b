#include "crackcell/solver.hpp"

#include <cmath>
#include <limits>

#include "crackcell/error.hpp"
#include "crackcell/log.hpp"

namespace crackcell {

StaggeredSolver::StaggeredSolver(const Model& model, StaggeredConfig config)
    : model_(model), config_(std::move(config)) {
  if (config_.l0 <= 0.0) throw Error("staggered: l0 must be positive");
  if (config_.n_stag < 1) throw Error("staggered: n_stag must be >= 1");
}

StaggeredDiagnostics StaggeredSolver::advance(FieldState& state,
                                              double applied) {
  StaggeredDiagnostics diag;

  // Momentum reference: the step-start residual, where the new boundary
  // data enters. Phase reference: the inconsistency right after the first
  // momentum sweep of the step, where the fresh history lands - at the step
  // start the phase system is still consistent from the previous increment,
  // so its residual there is no scale. Absolute floors make a converged
  // zero increment terminate immediately.
  const double nu0 =
      elastic_residual(model_, state.u, state.s, applied).norm();
  double ns0 = 0.0;
  const double u_floor = 1e-10 * (1.0 + model_.max_modulus * model_.grid.h);
  const double s_floor = 1e-10 * (1.0 + model_.grid.cell_volume() *
                                            model_.grid.n_active());

  for (int it = 1; it <= config_.n_stag; ++it) {
    diag.iterations = it;

    // momentum sweep: iterate the tr(eps) sign pattern to the current u
    AssembledSystem esys =
        assemble_elastic(model_, state.s, state.u, applied);
    state.u = elastic_solver_.solve(esys.A, esys.b, config_.linear);

    // phase residual before the phase sweep, with the history grown by the
    // fresh displacement: measures cross-field inconsistency
    update_history(model_, state.u, state.H);
    const double ns =
        phasefield_residual(model_, state.s, state.H, config_.l0).norm();
    if (it == 1) ns0 = ns;

    AssembledSystem psys = assemble_phasefield(model_, state.H, config_.l0);
    state.s = phase_solver_.solve(psys.A, psys.b, config_.linear);

    // momentum residual with the fresh phase field (exact Macaulay terms,
    // so it also reflects any not-yet-converged sign pattern)
    const double nu =
        elastic_residual(model_, state.u, state.s, applied).norm();

    diag.r_u = nu <= u_floor ? 0.0 : nu / std::max(nu0, u_floor);
    diag.r_s = ns <= s_floor ? 0.0 : ns / std::max(ns0, s_floor);
    if (std::max(diag.r_u, diag.r_s) < config_.eps_stag) {
      diag.converged = true;
      return diag;
    }
  }
  log_warn("staggered: not converged after ", config_.n_stag,
           " iterations (r_u=", diag.r_u, ", r_s=", diag.r_s,
           "), accepting state");
  return diag;
}

StaggeredDiagnostics staggered_step(const Model& model, FieldState& state,
                                    double applied,
                                    const StaggeredConfig& config) {
  StaggeredSolver solver(model, config);
  return solver.advance(state, applied);
}

RunResult run_simulation(const Model& model, const LoadSchedule& schedule,
                         const StaggeredConfig& config,
                         const std::optional<ProbeSpec>& probe,
                         const StepObserver& observer) {
  const int driven = model.driven_bc();
  if (driven < 0)
    throw Error("run: the load schedule needs exactly one driven boundary condition");
  if (schedule.target == 0.0) throw Error("run: target displacement is zero");
  const double dir = schedule.target > 0.0 ? 1.0 : -1.0;
  for (double step : {schedule.u_large, schedule.u_med, schedule.u_small})
    if (step <= 0.0) throw Error("run: schedule step sizes must be positive");

  RunResult result;
  result.state = make_state(model);
  StaggeredSolver solver(model, config);
  const int comp = model.bcs[static_cast<std::size_t>(driven)].component;

  int phase = 0;  // 0 large, 1 medium, 2 small
  double max_abs_force = 0.0;
  bool probe_warned = false;
  result.termination = "target_reached";

  while (std::abs(result.state.applied) <
         std::abs(schedule.target) - 1e-12) {
    const double inc =
        phase == 0 ? schedule.u_large
                   : (phase == 1 ? schedule.u_med : schedule.u_small);
    double next = result.state.applied + dir * inc;
    if (std::abs(next) > std::abs(schedule.target))
      next = schedule.target;  // final partial step

    ForceStrainRecord rec;
    rec.step = result.state.step + 1;
    rec.applied = next;
    try {
      const StaggeredDiagnostics diag = solver.advance(result.state, next);
      rec.stag_iterations = diag.iterations;
      rec.converged = diag.converged;
    } catch (const Error& e) {
      result.termination = std::string("fatal: ") + e.what();
      result.ok = false;
      log_error("run: step ", rec.step, " failed: ", e.what());
      break;
    }
    result.state.applied = next;
    result.state.step = rec.step;

    rec.force = reaction_force(model, result.state,
                               static_cast<std::size_t>(driven))[comp];
    rec.strain_micro = std::numeric_limits<double>::quiet_NaN();
    if (probe) {
      try {
        rec.strain_micro = probe_strain(model, result.state.u, *probe);
      } catch (const Error& e) {
        if (!probe_warned) {
          log_warn("run: probe failed (", e.what(), "), recording NaN");
          probe_warned = true;
        }
      }
    }
    result.records.push_back(rec);
    if (observer) observer(rec, result.state);

    max_abs_force = std::max(max_abs_force, std::abs(rec.force));

    // schedule switches on damage-onset proxy and on the phase-field minimum
    if (phase == 0) {
      const double eta = model.laws.eta;
      double proxy = 0.0;
      for (std::int64_t q = 0; q < result.state.H.size(); ++q) {
        const double v = 4.0 * config.l0 * (1.0 - eta) * result.state.H[q] /
                         model.mat.Gc[q];
        proxy = std::max(proxy, v);
      }
      if (proxy > schedule.onset_switch) {
        phase = 1;
        log_info("run: step ", rec.step, " switching to medium increments");
      }
    }
    if (phase == 1 &&
        phase_at_points(model, result.state.s).minCoeff() <
            schedule.smin_switch) {
      phase = 2;
      log_info("run: step ", rec.step, " switching to small increments");
    }

    // post-peak stop: force collapsed below a fraction of the running peak
    if (result.state.step >= 2 && max_abs_force > 0.0 &&
        std::abs(rec.force) <
            schedule.stop_force_fraction * max_abs_force) {
      result.termination = "post_peak";
      log_info("run: step ", rec.step, " post-peak force ", rec.force,
               " below ", schedule.stop_force_fraction, " of peak ",
               max_abs_force, ", stopping");
      break;
    }
  }
  return result;
}

}  // namespace crackcell
