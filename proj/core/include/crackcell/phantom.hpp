#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "crackcell/voxel_image.hpp"

namespace crackcell {

// Synthetic voxel images for desk-scale verification runs. All kinds are
// deterministic functions of the spec (noise comes from the seed alone).
//   uniform-bar             solid box of constant density
//   notched-plate           quasi-2d plate, edge slit at mid-height, dense
//                           grip caps on the pulled faces
//   sphere                  ball of constant density in an empty box
//   layered-bone-surrogate  rod with a stiff shell, soft core, a narrowed
//                           and weakened neck band, and solid grip ends
struct PhantomSpec {
  std::string kind = "uniform-bar";
  Eigen::Vector3i dims{16, 16, 64};
  double spacing = 1.0;    // [mm]
  double rho = 0.6;        // base ash density [g/cm^3]
  double noise = 0.0;      // relative density jitter amplitude
  std::uint64_t seed = 1;  // jitter stream
};

std::vector<std::string> phantom_kinds();

// Throws Error for an unknown kind (the message lists the valid ones) or
// dimensions too small for the requested shape.
VoxelImage make_phantom(const PhantomSpec& spec);

}  // namespace crackcell
