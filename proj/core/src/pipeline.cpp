#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "crackcell/error.hpp"
#include "crackcell/io.hpp"
#include "crackcell/log.hpp"
#include "crackcell/pipeline.hpp"
#include "crackcell/postproc.hpp"
#include "crackcell/runtime.hpp"
#include "crackcell/version.hpp"

namespace crackcell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string checkpoint_path(const RunConfig& config) {
  return (fs::path(config.output_dir) / "state.cckp").string();
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw Error("short write on '" + path + "'");
}

void write_provenance(const RunConfig& config, const std::string& path) {
  const std::string canonical = serialize_run_config(config);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  json j;
  j["tool"] = "crackcell";
  j["version"] = kVersion;
  j["config_hash"] = hash;
  j["config"] = json::parse(canonical);
  write_json_file(j, path);
}

json regression_json(const RegressionStats& r) {
  return {{"slope", r.slope},
          {"intercept", r.intercept},
          {"r2", r.r2},
          {"rmse", r.rmse},
          {"mean_abs_rel_err_pct", r.mean_abs_rel_err_pct},
          {"n", r.n}};
}

void write_vtk_outputs(const RunConfig& config, const Model& model,
                       const FieldState& state, const fs::path& dir) {
  write_vti(model, state, (dir / "fields.vti").string());
  const IsoVolume iso =
      crack_isovolume(model, state, config.post.iso.s_low,
                      config.post.iso.s_high, config.post.iso.warp,
                      config.post.iso.samples_per_cell);
  write_vtu(iso, (dir / "crack.vtu").string());
}

Checkpoint load_checkpoint_for(const RunConfig& config) {
  const std::string path = checkpoint_path(config);
  if (!fs::exists(path))
    throw Error("no checkpoint at '" + path +
                "' - run `crackcell run --config <config>` first");
  return read_checkpoint(path);
}

json report_json(const RunConfig& config, const Model& model,
                 std::span<const ForceStrainRecord> records,
                 const FieldState& state) {
  json report;
  const FailureLoad peak = failure_load(records);
  report["failure_load_N"] = peak.force;
  report["peak_step"] = peak.step;
  report["peak_detected"] = peak.peak_detected;
  report["records"] = records.size();

  if (config.sweep && !config.sweep->reference_csv.empty()) {
    const auto reference = read_force_strain_csv(config.sweep->reference_csv);
    const FailureLoad ref = failure_load(reference);
    const double rel =
        std::abs(std::abs(peak.force) - std::abs(ref.force)) /
        std::abs(ref.force);
    report["reference"] = {{"csv", config.sweep->reference_csv},
                           {"failure_load_N", ref.force},
                           {"rel_err_pct", 100.0 * rel}};
  }

  if (config.measured) {
    const auto points = read_measured_data(config.measured->values_csv,
                                           config.measured->points_csv);
    const double radius =
        config.post.probes.empty() ? 0.5 : config.post.probes[0].radius;
    std::vector<double> measured, computed;
    json rows = json::array();
    for (const auto& p : points) {
      ProbeSpec probe;
      probe.center = p.position;
      probe.radius = radius;
      const double eps3 = probe_strain(model, state.u, probe);
      measured.push_back(p.value);
      computed.push_back(eps3);
      rows.push_back({{"id", p.id},
                      {"measured_microstrain", p.value},
                      {"computed_microstrain", eps3}});
    }
    report["regression"] = regression_json(regression(measured, computed));
    report["points"] = std::move(rows);
  }
  return report;
}

}  // namespace

Model build_from_config(const RunConfig& config) {
  LoadedImage loaded = read_voxel_image(config.image);

  MaterialLaws laws;
  laws.E0 = config.material.E0;
  laws.Gc0 = config.material.Gc0;
  laws.beta = config.material.beta;
  laws.nu = config.material.nu;
  laws.eta = config.material.eta;
  laws.alpha_fcm = config.material.alpha_fcm;
  if (loaded.hu_slope) laws.hu_slope = *loaded.hu_slope;
  if (loaded.hu_intercept) laws.hu_intercept = *loaded.hu_intercept;
  if (config.material.hu_slope) laws.hu_slope = *config.material.hu_slope;
  if (config.material.hu_intercept)
    laws.hu_intercept = *config.material.hu_intercept;

  std::vector<BoundaryCondition> bcs;
  for (const auto& bc : config.bcs) {
    BoundaryCondition out;
    if (bc.region.size() == 2 &&
        (bc.region[1] == '-' || bc.region[1] == '+'))
      out.region = parse_box_face(bc.region);
    else
      out.region = read_stl(bc.region);
    out.kind = bc.kind == "fixed" ? BcKind::Fixed : BcKind::Prescribed;
    out.component = bc.component;
    out.driven = bc.driven;
    out.value = bc.value;
    out.penalty_scale = bc.penalty_scale;
    out.label = bc.label.empty() ? bc.region : bc.label;
    bcs.push_back(std::move(out));
  }

  const BasisFamily family = config.disc.basis == "bspline"
                                 ? BasisFamily::BSpline
                                 : BasisFamily::IntegratedLegendre;
  return build_model(std::move(loaded.image), config.disc.h, config.disc.p,
                     config.disc.depth, family, laws, std::move(bcs));
}

StaggeredConfig make_staggered_config(const RunConfig& config) {
  StaggeredConfig sc;
  sc.eps_stag = config.solver.eps_stag;
  sc.n_stag = config.solver.n_stag;
  sc.l0 = config.solver.l0;
  return sc;
}

LoadSchedule make_load_schedule(const RunConfig& config) {
  const ScheduleConfig& s = config.solver.schedule;
  LoadSchedule ls;
  ls.u_large = s.u_large;
  ls.u_med = s.u_med;
  ls.u_small = s.u_small;
  ls.onset_switch = s.onset_switch;
  ls.smin_switch = s.smin_switch;
  ls.target = s.target;
  ls.stop_force_fraction = s.stop_force_fraction;
  return ls;
}

RunArtifacts execute_run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);

  Model model = build_from_config(config);

  std::optional<ProbeSpec> probe;
  if (!config.post.probes.empty()) {
    probe.emplace();
    probe->center = config.post.probes[0].center;
    probe->radius = config.post.probes[0].radius;
  }

  RunArtifacts artifacts;
  artifacts.output_dir = config.output_dir;
  artifacts.result = run_simulation(model, make_load_schedule(config),
                                    make_staggered_config(config), probe);

  write_force_strain_csv(artifacts.result.records,
                         (dir / "force_strain.csv").string());
  Checkpoint cp;
  cp.state = artifacts.result.state;
  cp.records = artifacts.result.records;
  cp.termination = artifacts.result.termination;
  cp.config_hash = config_hash(config);
  write_checkpoint(cp, checkpoint_path(config));
  write_provenance(config, (dir / "provenance.json").string());
  if (config.post.vtk && artifacts.result.ok)
    write_vtk_outputs(config, model, artifacts.result.state, dir);

  if (!artifacts.result.records.empty())
    artifacts.peak = failure_load(artifacts.result.records);
  artifacts.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json summary;
  summary["ok"] = artifacts.result.ok;
  summary["termination"] = artifacts.result.termination;
  summary["steps"] = artifacts.result.records.size();
  summary["failure_load_N"] = artifacts.peak.force;
  summary["peak_step"] = artifacts.peak.step;
  summary["peak_detected"] = artifacts.peak.peak_detected;
  summary["wall_seconds"] = artifacts.wall_seconds;
  summary["cells"] = model.grid.n_active();
  summary["displacement_dofs"] = model.n_udofs();
  summary["phase_dofs"] = model.n_sdofs();
  summary["quadrature_points"] = model.quad.total_points();
  summary["threads"] = num_threads();
  write_json_file(summary, (dir / "summary.json").string());

  log_info("run: ", artifacts.result.termination, " after ",
           artifacts.result.records.size(), " steps, failure load ",
           artifacts.peak.force, " N (", artifacts.wall_seconds, " s)");
  return artifacts;
}

SweepResult execute_calibrate(const RunConfig& config) {
  if (!config.sweep)
    throw Error("config: 'sweep' block is required for calibrate");
  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);

  SweepSpec spec;
  spec.parameter = config.sweep->parameter;
  spec.values = config.sweep->values;
  spec.metric = config.sweep->metric;
  spec.reference = read_force_strain_csv(config.sweep->reference_csv);

  // l0 only scales the phase equation, so one model serves every candidate;
  // beta and Gc0 enter the per-point material field and force a rebuild.
  std::optional<Model> shared;
  if (spec.parameter == "l0") shared.emplace(build_from_config(config));

  std::optional<ProbeSpec> probe;
  if (!config.post.probes.empty()) {
    probe.emplace();
    probe->center = config.post.probes[0].center;
    probe->radius = config.post.probes[0].radius;
  }

  const CandidateRunner runner = [&](const std::string& parameter,
                                     double value) {
    RunConfig candidate = config;
    if (parameter == "l0")
      candidate.solver.l0 = value;
    else if (parameter == "beta")
      candidate.material.beta = value;
    else if (parameter == "Gc0")
      candidate.material.Gc0 = value;
    else
      throw Error("sweep: unknown parameter '" + parameter + "'");
    validate_run_config(candidate, false);

    std::optional<Model> local;
    if (!shared) local.emplace(build_from_config(candidate));
    const Model& model = shared ? *shared : *local;

    RunResult run =
        run_simulation(model, make_load_schedule(candidate),
                       make_staggered_config(candidate), probe);
    char name[64];
    std::snprintf(name, sizeof(name), "sweep_%s_%g.csv", parameter.c_str(),
                  value);
    write_force_strain_csv(run.records, (dir / name).string());
    return run;
  };

  SweepResult result = run_sweep(spec, runner);

  std::ofstream csv((dir / "sweep.csv").string(), std::ios::trunc);
  if (!csv) throw Error("cannot open sweep.csv for writing");
  csv << "rank,parameter,value,status,failure_load_N,metric_" << spec.metric
      << ",reference_failure_load_N\n";
  char line[256];
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const SweepEntry& e = result.ranked[i];
    std::snprintf(line, sizeof(line), "%zu,%s,%.17g,%s,%.17g,%.17g,%.17g\n",
                  i + 1, spec.parameter.c_str(), e.value,
                  e.ok ? "ok" : "failed", e.failure_load, e.metric_value,
                  result.reference_failure_load);
    csv << line;
  }
  if (!csv) throw Error("short write on sweep.csv");

  json summary;
  summary["parameter"] = spec.parameter;
  summary["metric"] = spec.metric;
  summary["reference_failure_load_N"] = result.reference_failure_load;
  summary["ranked"] = json::array();
  for (const auto& e : result.ranked) {
    json row = {{"value", e.value},
                {"ok", e.ok},
                {"failure_load_N", e.failure_load},
                {"metric", e.metric_value}};
    if (!e.ok) row["error"] = e.error;
    summary["ranked"].push_back(std::move(row));
  }
  write_json_file(summary, (dir / "sweep_summary.json").string());

  if (!result.ranked.empty() && result.ranked.front().ok)
    log_info("sweep: best ", spec.parameter, " = ",
             result.ranked.front().value, " (metric ",
             result.ranked.front().metric_value, ")");
  return result;
}

std::vector<double> execute_probe(const RunConfig& config,
                                  const std::string& out_dir) {
  if (config.post.probes.empty())
    throw Error("config: 'postproc.probes' is empty - nothing to probe");
  const Checkpoint cp = load_checkpoint_for(config);
  Model model = build_from_config(config);
  if (cp.state.u.size() != model.n_udofs() ||
      cp.state.s.size() != model.n_sdofs())
    throw Error("checkpoint does not match this config's discretization");

  const fs::path dir(out_dir.empty() ? config.output_dir : out_dir);
  fs::create_directories(dir);
  std::vector<double> strains;
  std::ofstream csv((dir / "probes.csv").string(), std::ios::trunc);
  if (!csv) throw Error("cannot open probes.csv for writing");
  csv << "probe,center_x,center_y,center_z,radius_mm,eps3_microstrain\n";
  char line[256];
  for (std::size_t i = 0; i < config.post.probes.size(); ++i) {
    const ProbeConfig& pc = config.post.probes[i];
    ProbeSpec probe;
    probe.center = pc.center;
    probe.radius = pc.radius;
    const double eps3 = probe_strain(model, cp.state.u, probe);
    strains.push_back(eps3);
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  i, pc.center[0], pc.center[1], pc.center[2], pc.radius,
                  eps3);
    csv << line;
    log_info("probe ", i, " at (", pc.center[0], ", ", pc.center[1], ", ",
             pc.center[2], ") r=", pc.radius, ": ", eps3, " microstrain");
  }
  if (!csv) throw Error("short write on probes.csv");
  return strains;
}

void execute_postproc(const RunConfig& config, const std::string& out_dir) {
  const Checkpoint cp = load_checkpoint_for(config);
  Model model = build_from_config(config);
  if (cp.state.u.size() != model.n_udofs() ||
      cp.state.s.size() != model.n_sdofs() ||
      cp.state.H.size() != model.quad.total_points())
    throw Error("checkpoint does not match this config's discretization");

  const fs::path dir(out_dir.empty() ? config.output_dir : out_dir);
  fs::create_directories(dir);
  write_force_strain_csv(cp.records, (dir / "force_strain.csv").string());
  if (config.post.vtk) write_vtk_outputs(config, model, cp.state, dir);
  write_json_file(report_json(config, model, cp.records, cp.state),
                  (dir / "report.json").string());
  log_info("postproc: regenerated artifacts in '", dir.string(), "'");
}

}  // namespace crackcell
