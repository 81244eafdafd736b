#include "crackcell/grid.hpp"

#include <cmath>

#include "crackcell/error.hpp"
#include "crackcell/log.hpp"
#include "crackcell/runtime.hpp"

namespace crackcell {

namespace {

// Range of voxels along one axis whose open overlap with the cell interval
// [lo, hi) is longer than a sliver tolerance. May extend beyond the image.
void voxel_range(double lo, double hi, double org, double sp, int& v0,
                 int& v1) {
  const double tol = 1e-12 * sp;
  v0 = static_cast<int>(std::floor((lo - org) / sp + tol));
  v1 = static_cast<int>(std::ceil((hi - org) / sp - tol)) - 1;
}

}  // namespace

EmbeddedGrid build_grid(const VoxelImage& image, double h, int p) {
  image.validate();
  if (h <= 0.0) throw Error("build_grid: cell size must be positive");
  if (p < 1) throw Error("build_grid: order must be >= 1");

  EmbeddedGrid grid;
  grid.origin = image.bbox_min();
  grid.h = h;
  grid.p = p;
  const Eigen::Vector3d extent = image.bbox_max() - image.bbox_min();
  for (int a = 0; a < 3; ++a)
    grid.num_cells[a] =
        std::max(1, static_cast<int>(std::ceil(extent[a] / h - 1e-12)));

  const std::int64_t ntot = grid.num_cells_total();
  grid.active_index.assign(static_cast<std::size_t>(ntot), -1);

  std::vector<std::uint8_t> state(static_cast<std::size_t>(ntot), 0);
  // bit 0: overlaps an inside voxel, bit 1: overlaps outside voxels or space
  parallel_for(ntot, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t id = b; id < e; ++id) {
      const Eigen::Vector3i c = grid.cell_coords(id);
      const Eigen::Vector3d lo = grid.cell_min(c);
      int v0[3], v1[3];
      bool beyond = false;
      for (int a = 0; a < 3; ++a) {
        voxel_range(lo[a], lo[a] + h, image.origin[a], image.spacing[a], v0[a],
                    v1[a]);
        if (v0[a] < 0 || v1[a] >= image.dims[a]) beyond = true;
        v0[a] = std::max(v0[a], 0);
        v1[a] = std::min(v1[a], image.dims[a] - 1);
      }
      std::uint8_t s = beyond ? 2 : 0;
      for (int k = v0[2]; k <= v1[2] && s != 3; ++k)
        for (int j = v0[1]; j <= v1[1] && s != 3; ++j)
          for (int i = v0[0]; i <= v1[0] && s != 3; ++i)
            s |= image.inside(image.linear_index(i, j, k)) ? 1 : 2;
      state[static_cast<std::size_t>(id)] = s;
    }
  });

  for (std::int64_t id = 0; id < ntot; ++id) {
    if (!(state[static_cast<std::size_t>(id)] & 1)) continue;
    grid.active_index[static_cast<std::size_t>(id)] =
        static_cast<std::int32_t>(grid.active_cells.size());
    grid.active_cells.push_back(id);
    grid.cut.push_back(state[static_cast<std::size_t>(id)] == 3 ? 1 : 0);
  }

  if (grid.active_cells.empty())
    throw Error("build_grid: no voxel is inside the domain");
  log_debug("grid: ", grid.num_cells[0], "x", grid.num_cells[1], "x",
            grid.num_cells[2], " cells, ", grid.n_active(), " active");
  return grid;
}

double indicator(const VoxelImage& image, const EmbeddedGrid& grid,
                 const Eigen::Vector3d& x, double alpha_fcm) {
  const Eigen::Vector3d lo = grid.bbox_min(), hi = grid.bbox_max();
  for (int a = 0; a < 3; ++a)
    if (x[a] < lo[a] || x[a] > hi[a])
      throw Error("indicator: point outside the grid bounding box");
  Eigen::Vector3i v;
  if (!image.voxel_of(x, v)) return alpha_fcm;
  return image.inside(image.linear_index(v[0], v[1], v[2])) ? 1.0 : alpha_fcm;
}

}  // namespace crackcell
