#include "crackcell/quadrature.hpp"

#include "crackcell/error.hpp"
#include "crackcell/gauss.hpp"
#include "crackcell/runtime.hpp"

namespace crackcell {

namespace {

RuleTemplate make_template(int pts_axis, int subdiv) {
  RuleTemplate t;
  t.points_per_axis = pts_axis;
  t.subdiv = subdiv;
  const Gauss1d g = gauss_legendre_unit(pts_axis);
  const std::int64_t per_sub = static_cast<std::int64_t>(pts_axis) * pts_axis *
                               pts_axis;
  const std::int64_t total = per_sub * subdiv * subdiv * subdiv;
  t.points.resize(total, 3);
  t.weights.resize(total);
  const double scale = 1.0 / subdiv;
  const double wscale = scale * scale * scale;
  std::int64_t q = 0;
  for (int sk = 0; sk < subdiv; ++sk)
    for (int sj = 0; sj < subdiv; ++sj)
      for (int si = 0; si < subdiv; ++si)
        for (int k = 0; k < pts_axis; ++k)
          for (int j = 0; j < pts_axis; ++j)
            for (int i = 0; i < pts_axis; ++i, ++q) {
              t.points(q, 0) = (si + g.nodes[i]) * scale;
              t.points(q, 1) = (sj + g.nodes[j]) * scale;
              t.points(q, 2) = (sk + g.nodes[k]) * scale;
              t.weights(q) =
                  g.weights[i] * g.weights[j] * g.weights[k] * wscale;
            }
  return t;
}

}  // namespace

double QuadratureRule::weighted_volume(const EmbeddedGrid& grid) const {
  const double cv = grid.cell_volume();
  double vol = 0.0;
  for (std::int64_t c = 0; c < grid.n_active(); ++c) {
    const RuleTemplate& t = templates[cell_template[c]];
    const std::int64_t off = cell_offset[c];
    for (std::int64_t q = 0; q < t.size(); ++q)
      vol += t.weights(q) * cv * alpha[off + q];
  }
  return vol;
}

QuadratureRule build_quadrature(const EmbeddedGrid& grid,
                                const VoxelImage& image, int depth,
                                double alpha_fcm) {
  if (depth < 0) throw Error("build_quadrature: depth must be >= 0");
  if (alpha_fcm <= 0.0 || alpha_fcm > 1.0)
    throw Error("build_quadrature: alpha_fcm must be in (0, 1]");

  QuadratureRule rule;
  rule.depth = depth;
  rule.alpha_fcm = alpha_fcm;
  const int pts_axis = grid.p + 1;
  rule.templates.push_back(make_template(pts_axis, 1));
  rule.templates.push_back(make_template(pts_axis, 1 << depth));

  const std::int64_t nact = grid.n_active();
  rule.cell_template.resize(nact);
  rule.cell_offset.resize(nact + 1);
  rule.cell_offset[0] = 0;
  for (std::int64_t c = 0; c < nact; ++c) {
    rule.cell_template[c] = grid.cut[c] ? 1 : 0;
    rule.cell_offset[c + 1] =
        rule.cell_offset[c] + rule.templates[rule.cell_template[c]].size();
  }

  const std::int64_t npts = rule.total_points();
  rule.alpha.resize(npts);
  rule.voxel.resize(npts);

  parallel_for(nact, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t c = b; c < e; ++c) {
      const RuleTemplate& t = rule.templates[rule.cell_template[c]];
      const Eigen::Vector3d lo =
          grid.cell_min(grid.cell_coords(grid.active_cells[c]));
      const std::int64_t off = rule.cell_offset[c];
      for (std::int64_t q = 0; q < t.size(); ++q) {
        const Eigen::Vector3d x =
            lo + grid.h * t.points.row(q).transpose();
        Eigen::Vector3i v;
        if (!image.voxel_of(x, v)) {
          rule.alpha[off + q] = alpha_fcm;
          rule.voxel[off + q] = -1;
          continue;
        }
        const std::int64_t vid = image.linear_index(v[0], v[1], v[2]);
        rule.voxel[off + q] = vid;
        rule.alpha[off + q] = image.inside(vid) ? 1.0 : alpha_fcm;
      }
    }
  });
  return rule;
}

}  // namespace crackcell
