#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "crackcell/config.hpp"
#include "crackcell/error.hpp"
#include "crackcell/io.hpp"
#include "crackcell/log.hpp"
#include "crackcell/phantom.hpp"
#include "crackcell/pipeline.hpp"
#include "crackcell/runtime.hpp"
#include "crackcell/version.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string output_dir;  // overrides the config's output_dir when set
  int threads = 0;         // 0 keeps the CRACKCELL_THREADS / hardware default
  std::string log_level;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  auto* c = cmd->add_option("--config", opts.config_path,
                            "run configuration (JSON)");
  if (needs_config) c->required();
  cmd->add_option("--output-dir", opts.output_dir,
                  "override the config's output directory");
  cmd->add_option("--threads", opts.threads,
                  "worker threads (0 = CRACKCELL_THREADS or all cores)");
  cmd->add_option("--log-level", opts.log_level,
                  "debug|info|warn|error|quiet");
}

void apply_common(const CommonOpts& opts) {
  if (!opts.log_level.empty())
    crackcell::set_log_level(crackcell::parse_log_level(opts.log_level));
  if (opts.threads > 0) crackcell::set_num_threads(opts.threads);
}

crackcell::RunConfig load_config(const CommonOpts& opts) {
  crackcell::RunConfig config = crackcell::load_run_config(opts.config_path);
  if (!opts.output_dir.empty()) config.output_dir = opts.output_dir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxel-image-driven embedded-domain phase-field fracture "
               "simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts, cal_opts, probe_opts, post_opts;
  auto* cmd_run = app.add_subcommand("run", "execute a full simulation");
  add_common(cmd_run, run_opts, true);
  auto* cmd_cal =
      app.add_subcommand("calibrate", "sweep a parameter against a "
                                      "reference force-strain curve");
  add_common(cmd_cal, cal_opts, true);
  auto* cmd_probe = app.add_subcommand(
      "probe", "evaluate strain probes on a checkpointed state");
  add_common(cmd_probe, probe_opts, true);
  auto* cmd_post = app.add_subcommand(
      "postproc", "regenerate artifacts and report from a checkpoint");
  add_common(cmd_post, post_opts, true);

  auto* cmd_phantom =
      app.add_subcommand("phantom", "generate a synthetic voxel image");
  crackcell::PhantomSpec phantom;
  std::string phantom_out = "phantom.json";
  std::string scalar_type = "float32";
  CommonOpts phantom_opts;
  cmd_phantom->add_option("--kind", phantom.kind,
                          "uniform-bar|notched-plate|sphere|"
                          "layered-bone-surrogate");
  cmd_phantom
      ->add_option("--dims", [&phantom](const std::vector<std::string>& v) {
        return 3 == std::sscanf(v[0].c_str(), "%d,%d,%d", &phantom.dims[0],
                                &phantom.dims[1], &phantom.dims[2]);
      }, "voxel counts as nx,ny,nz")
      ->type_name("INT,INT,INT");
  cmd_phantom->add_option("--spacing", phantom.spacing, "voxel edge [mm]");
  cmd_phantom->add_option("--rho", phantom.rho,
                          "base ash density [g/cm^3]");
  cmd_phantom->add_option("--noise", phantom.noise,
                          "relative density jitter amplitude");
  cmd_phantom->add_option("--seed", phantom.seed, "jitter seed");
  cmd_phantom->add_option("--output", phantom_out,
                          "sidecar path (raw files land next to it)");
  cmd_phantom->add_option("--scalar-type", scalar_type,
                          "float32|float64|int16");
  cmd_phantom->add_option("--log-level", phantom_opts.log_level,
                          "debug|info|warn|error|quiet");

  auto* cmd_version = app.add_subcommand("version", "print the version");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_version->parsed()) {
      std::cout << "crackcell " << crackcell::kVersion << "\n";
      return 0;
    }
    if (cmd_phantom->parsed()) {
      apply_common(phantom_opts);
      const crackcell::VoxelImage img = crackcell::make_phantom(phantom);
      crackcell::write_voxel_image(img, phantom_out, scalar_type);
      std::cout << "wrote " << phantom_out << " (" << phantom.kind << ", "
                << img.count_inside() << " voxels inside)\n";
      return 0;
    }
    if (cmd_run->parsed()) {
      apply_common(run_opts);
      const auto artifacts = crackcell::execute_run(load_config(run_opts));
      std::printf("termination: %s\nsteps: %zu\nfailure load: %.6g N\n"
                  "wall time: %.2f s\nartifacts: %s\n",
                  artifacts.result.termination.c_str(),
                  artifacts.result.records.size(), artifacts.peak.force,
                  artifacts.wall_seconds, artifacts.output_dir.c_str());
      return artifacts.result.ok ? 0 : 1;
    }
    if (cmd_cal->parsed()) {
      apply_common(cal_opts);
      const auto sweep = crackcell::execute_calibrate(load_config(cal_opts));
      std::printf("%-6s %-12s %-10s %-16s %s\n", "rank", "value", "status",
                  "failure load", "metric");
      for (std::size_t i = 0; i < sweep.ranked.size(); ++i) {
        const auto& e = sweep.ranked[i];
        std::printf("%-6zu %-12g %-10s %-16g %g\n", i + 1, e.value,
                    e.ok ? "ok" : "failed", e.failure_load, e.metric_value);
      }
      bool any_ok = false;
      for (const auto& e : sweep.ranked) any_ok = any_ok || e.ok;
      return any_ok ? 0 : 1;
    }
    if (cmd_probe->parsed()) {
      apply_common(probe_opts);
      const auto config = crackcell::load_run_config(probe_opts.config_path);
      const auto strains =
          crackcell::execute_probe(config, probe_opts.output_dir);
      for (std::size_t i = 0; i < strains.size(); ++i)
        std::printf("probe %zu: %.9g microstrain\n", i, strains[i]);
      return 0;
    }
    if (cmd_post->parsed()) {
      apply_common(post_opts);
      const auto config = crackcell::load_run_config(post_opts.config_path);
      crackcell::execute_postproc(config, post_opts.output_dir);
      return 0;
    }
  } catch (const crackcell::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
