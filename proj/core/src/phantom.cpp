#include <algorithm>
#include <cmath>
#include <random>

#include "crackcell/error.hpp"
#include "crackcell/log.hpp"
#include "crackcell/phantom.hpp"

namespace crackcell {

namespace {

VoxelImage blank(const PhantomSpec& spec, bool with_mask,
                 const Eigen::Vector3i& min_dims = {4, 4, 4}) {
  if ((spec.dims.array() < min_dims.array()).any())
    throw Error("phantom: dims too small for '" + spec.kind + "' (needs " +
                std::to_string(min_dims[0]) + "x" + std::to_string(min_dims[1]) +
                "x" + std::to_string(min_dims[2]) + " voxels)");
  if (spec.spacing <= 0.0) throw Error("phantom: spacing must be positive");
  if (spec.rho <= 0.0) throw Error("phantom: rho must be positive");
  VoxelImage img;
  img.dims = spec.dims;
  img.spacing = Eigen::Vector3d::Constant(spec.spacing);
  img.origin.setZero();
  img.kind = ImageKind::RhoAsh;
  img.values.assign(static_cast<std::size_t>(img.num_voxels()), 0.0);
  if (with_mask)
    img.mask.assign(static_cast<std::size_t>(img.num_voxels()), 0);
  return img;
}

VoxelImage uniform_bar(const PhantomSpec& spec) {
  VoxelImage img = blank(spec, true);
  std::fill(img.values.begin(), img.values.end(), spec.rho);
  std::fill(img.mask.begin(), img.mask.end(), std::uint8_t{1});
  return img;
}

// Edge-notched plate pulled along z: a one-voxel slit at mid-height cuts
// 5/8 of the width, dense caps at both gripped faces keep the damage band
// away from the boundary-layer artifact of the natural phase-field BC.
VoxelImage notched_plate(const PhantomSpec& spec) {
  // quasi-2d is fine: only the slit (x) and cap (z) axes need room
  VoxelImage img = blank(spec, true, {8, 2, 8});
  const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
  const int cap = std::max(1, nz / 8);
  const int slit_k = nz / 2;
  const int slit_depth = (5 * nx) / 8;
  const double cap_rho = std::min(1.5 * spec.rho, 1.2);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t v =
            static_cast<std::size_t>(img.linear_index(i, j, k));
        if (k == slit_k && i < slit_depth) continue;  // masked out
        img.mask[v] = 1;
        img.values[v] = (k < cap || k >= nz - cap) ? cap_rho : spec.rho;
      }
  return img;
}

VoxelImage sphere(const PhantomSpec& spec) {
  VoxelImage img = blank(spec, true);
  const Eigen::Vector3d extent =
      spec.spacing * spec.dims.cast<double>();
  const Eigen::Vector3d center = 0.5 * extent;
  const double radius = 0.35 * extent.minCoeff();
  for (int k = 0; k < spec.dims[2]; ++k)
    for (int j = 0; j < spec.dims[1]; ++j)
      for (int i = 0; i < spec.dims[0]; ++i) {
        const Eigen::Vector3d x =
            spec.spacing *
            Eigen::Vector3d(i + 0.5, j + 0.5, k + 0.5);
        if ((x - center).norm() > radius) continue;
        const std::size_t v =
            static_cast<std::size_t>(img.linear_index(i, j, k));
        img.mask[v] = 1;
        img.values[v] = spec.rho;
      }
  return img;
}

// Quartic bump, 1 at t=0, 0 for |t| >= 1, C^1 at the support edge.
double bump(double t) {
  const double q = std::max(0.0, 1.0 - t * t);
  return q * q;
}

VoxelImage bone_surrogate(const PhantomSpec& spec) {
  VoxelImage img = blank(spec, true);
  const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
  const double r0 = 0.45 * spec.spacing * std::min(nx, ny);
  const double shell_t = std::max(1.5 * spec.spacing, 0.15 * r0);
  const double zc = 0.5 * spec.spacing * nz;
  const double band_w = 0.15 * spec.spacing * nz;
  const int grip = std::max(2, nz / 10);
  const double rho_shell = std::min(1.5 * spec.rho, 1.2);
  const double rho_core = 0.6 * spec.rho;
  const double weak = 0.75;  // neck densities scale by this factor
  const Eigen::Vector2d axis(0.5 * spec.spacing * nx,
                             0.5 * spec.spacing * ny);

  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double z = spec.spacing * (k + 0.5);
        const Eigen::Vector2d xy(spec.spacing * (i + 0.5),
                                 spec.spacing * (j + 0.5));
        const double r = (xy - axis).norm();
        const bool in_grip = k < grip || k >= nz - grip;
        const double radius =
            in_grip ? r0 : r0 * (1.0 - 0.2 * bump((z - zc) / band_w));
        if (r > radius) continue;
        const std::size_t v =
            static_cast<std::size_t>(img.linear_index(i, j, k));
        img.mask[v] = 1;
        double rho;
        if (in_grip)
          rho = rho_shell;
        else
          rho = r > radius - shell_t ? rho_shell : rho_core;
        if (!in_grip && std::abs(z - zc) <= band_w) rho *= weak;
        img.values[v] = rho;
      }
  return img;
}

void apply_noise(VoxelImage& img, const PhantomSpec& spec) {
  if (spec.noise <= 0.0) return;
  // fully specified generator so files are reproducible by seed
  std::mt19937_64 rng(spec.seed);
  for (std::size_t v = 0; v < img.values.size(); ++v) {
    const double u =
        2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
    if (img.mask[v]) img.values[v] *= 1.0 + spec.noise * u;
  }
}

}  // namespace

std::vector<std::string> phantom_kinds() {
  return {"uniform-bar", "notched-plate", "sphere", "layered-bone-surrogate"};
}

VoxelImage make_phantom(const PhantomSpec& spec) {
  VoxelImage img;
  if (spec.kind == "uniform-bar")
    img = uniform_bar(spec);
  else if (spec.kind == "notched-plate")
    img = notched_plate(spec);
  else if (spec.kind == "sphere")
    img = sphere(spec);
  else if (spec.kind == "layered-bone-surrogate")
    img = bone_surrogate(spec);
  else {
    std::string kinds;
    for (const auto& k : phantom_kinds())
      kinds += (kinds.empty() ? "" : "|") + k;
    throw Error("unknown phantom kind '" + spec.kind + "' (expected " +
                kinds + ")");
  }
  apply_noise(img, spec);
  img.validate();
  log_info("phantom: ", spec.kind, " ", spec.dims[0], "x", spec.dims[1], "x",
           spec.dims[2], ", ", img.count_inside(), " voxels inside");
  return img;
}

}  // namespace crackcell
