#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "crackcell/grid.hpp"
#include "crackcell/voxel_image.hpp"

namespace crackcell {

// Point layout shared by every cell using the same template. Points live in
// the unit reference cell [0,1]^3; weights are unit-cube measures (they sum
// to 1), so the physical weight is w * h^3 * alpha.
struct RuleTemplate {
  int points_per_axis = 0;  // Gauss points per axis within one sub-cell
  int subdiv = 1;           // sub-cells per axis (2^depth on cut cells)
  Eigen::Matrix<double, Eigen::Dynamic, 3> points;
  Eigen::VectorXd weights;
  std::int64_t size() const { return points.rows(); }
};

// Per active cell: a template id plus per-point indicator values and the
// voxel each point falls in (-1 beyond the image extent).
struct QuadratureRule {
  int depth = 0;
  double alpha_fcm = 1e-6;
  std::vector<RuleTemplate> templates;      // [0] uncut, [1] cut
  std::vector<std::int32_t> cell_template;  // per active cell
  std::vector<std::int64_t> cell_offset;    // per active cell, +1 sentinel
  std::vector<double> alpha;                // per point
  std::vector<std::int64_t> voxel;          // per point

  std::int64_t total_points() const {
    return cell_offset.empty() ? 0 : cell_offset.back();
  }
  std::int64_t cell_points(std::int64_t c) const {
    return cell_offset[c + 1] - cell_offset[c];
  }

  // Sum of w * h^3 * alpha over all points: the alpha-weighted domain volume.
  double weighted_volume(const EmbeddedGrid& grid) const;
};

// Gauss rules with grid.p + 1 points per axis; cut cells are subdivided into
// 2^depth sub-cells per axis. Throws Error for depth < 0.
QuadratureRule build_quadrature(const EmbeddedGrid& grid,
                                const VoxelImage& image, int depth,
                                double alpha_fcm);

}  // namespace crackcell
