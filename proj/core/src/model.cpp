#include "crackcell/model.hpp"

#include <algorithm>
#include <cmath>

#include "crackcell/error.hpp"
#include "crackcell/gauss.hpp"
#include "crackcell/log.hpp"

namespace crackcell {

BoxFaceRegion parse_box_face(const std::string& name) {
  if (name.size() != 2 || (name[1] != '-' && name[1] != '+') ||
      (name[0] != 'x' && name[0] != 'y' && name[0] != 'z'))
    throw Error("unknown box face '" + name + "' (expected x-|x+|y-|y+|z-|z+)");
  return {name[0] - 'x', name[1] == '+'};
}

std::string box_face_name(const BoxFaceRegion& region) {
  std::string s = "x";
  s[0] = static_cast<char>('x' + region.axis);
  s += region.max_side ? '+' : '-';
  return s;
}

double SurfaceQuadrature::weighted_area() const {
  double a = 0.0;
  for (std::int64_t q = 0; q < size(); ++q) a += weight[q] * alpha[q];
  return a;
}

BasisTables build_basis_tables(const BasisSpec& spec,
                               const QuadratureRule& quad) {
  BasisTables tables;
  const int m = spec.p + 1;
  tables.n_loc = m * m * m;
  Eigen::VectorXd vals;
  Eigen::Matrix<double, Eigen::Dynamic, 3> grads;
  for (const RuleTemplate& t : quad.templates) {
    const std::int64_t n = t.size();
    Eigen::MatrixXd N(n, tables.n_loc);
    Eigen::MatrixXd D0(n, tables.n_loc), D1(n, tables.n_loc),
        D2(n, tables.n_loc);
    for (std::int64_t q = 0; q < n; ++q) {
      eval_basis(spec, t.points.row(q).transpose(), vals, grads);
      N.row(q) = vals.transpose();
      D0.row(q) = grads.col(0).transpose();
      D1.row(q) = grads.col(1).transpose();
      D2.row(q) = grads.col(2).transpose();
    }
    tables.N.push_back(std::move(N));
    tables.dN[0].push_back(std::move(D0));
    tables.dN[1].push_back(std::move(D1));
    tables.dN[2].push_back(std::move(D2));
  }
  return tables;
}

int Model::driven_bc() const {
  int found = -1;
  for (std::size_t i = 0; i < bcs.size(); ++i) {
    if (!bcs[i].driven) continue;
    if (found >= 0) throw Error("model: more than one driven boundary condition");
    found = static_cast<int>(i);
  }
  return found;
}

FieldState make_state(const Model& model) {
  FieldState st;
  st.u = Eigen::VectorXd::Zero(model.n_udofs());
  st.s.resize(model.n_sdofs());
  // intact field s = 1: unit coefficients reproduce constants for splines;
  // hierarchical bases need zero internal modes
  if (model.basis.family == BasisFamily::BSpline) {
    st.s.setOnes();
  } else {
    const auto& L = model.sdofs;
    const int p = model.basis.p;
    std::int64_t t = 0;
    for (int fk = 0; fk < L.axis_funcs[2]; ++fk)
      for (int fj = 0; fj < L.axis_funcs[1]; ++fj)
        for (int fi = 0; fi < L.axis_funcs[0]; ++fi, ++t) {
          const std::int32_t a = L.tensor_to_active[static_cast<std::size_t>(t)];
          if (a < 0) continue;
          const bool nodal = fi % p == 0 && fj % p == 0 && fk % p == 0;
          st.s[a] = nodal ? 1.0 : 0.0;
        }
  }
  st.H = Eigen::VectorXd::Zero(model.quad.total_points());
  return st;
}

namespace {

struct SurfaceBuilder {
  SurfaceQuadrature sq;
  std::vector<Eigen::Vector3d> xi_list;

  void add(std::int64_t cell, const Eigen::Vector3d& xi,
           const Eigen::Vector3d& x, double weight, double alpha,
           std::int64_t voxel, const Eigen::Vector3d& normal) {
    sq.cell.push_back(cell);
    sq.weight.push_back(weight);
    sq.alpha.push_back(alpha);
    sq.voxel.push_back(voxel);
    sq.point.push_back(x);
    sq.normal.push_back(normal);
    xi_list.push_back(xi);
  }

  SurfaceQuadrature finish(const BasisSpec& spec, double h) {
    const std::int64_t n = static_cast<std::int64_t>(xi_list.size());
    const int m = spec.p + 1;
    const int nloc = m * m * m;
    sq.N.resize(n, nloc);
    sq.dNdx.resize(n, nloc);
    sq.dNdy.resize(n, nloc);
    sq.dNdz.resize(n, nloc);
    Eigen::VectorXd vals;
    Eigen::Matrix<double, Eigen::Dynamic, 3> grads;
    for (std::int64_t q = 0; q < n; ++q) {
      eval_basis(spec, xi_list[q], vals, grads);
      sq.N.row(q) = vals.transpose();
      sq.dNdx.row(q) = grads.col(0).transpose() / h;
      sq.dNdy.row(q) = grads.col(1).transpose() / h;
      sq.dNdz.row(q) = grads.col(2).transpose() / h;
    }
    return std::move(sq);
  }
};

}  // namespace

SurfaceQuadrature build_face_quadrature(const EmbeddedGrid& grid,
                                        const VoxelImage& image,
                                        const BasisSpec& spec,
                                        const BoxFaceRegion& region, int depth,
                                        double alpha_fcm) {
  if (region.axis < 0 || region.axis > 2)
    throw Error("face quadrature: axis must be 0, 1 or 2");
  SurfaceBuilder builder;
  const int a = region.axis;
  const int b = (a + 1) % 3, c = (a + 2) % 3;
  const Gauss1d g = gauss_legendre_unit(grid.p + 1);
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  normal[a] = region.max_side ? 1.0 : -1.0;

  for (std::int64_t ac = 0; ac < grid.n_active(); ++ac) {
    const Eigen::Vector3i cc = grid.cell_coords(grid.active_cells[ac]);
    if (region.max_side ? cc[a] != grid.num_cells[a] - 1 : cc[a] != 0)
      continue;
    const Eigen::Vector3d lo = grid.cell_min(cc);
    const int subdiv = grid.cut[ac] ? (1 << depth) : 1;
    const double scale = 1.0 / subdiv;
    for (int sj = 0; sj < subdiv; ++sj)
      for (int si = 0; si < subdiv; ++si)
        for (int qj = 0; qj < grid.p + 1; ++qj)
          for (int qi = 0; qi < grid.p + 1; ++qi) {
            Eigen::Vector3d xi;
            xi[a] = region.max_side ? 1.0 : 0.0;
            xi[b] = (si + g.nodes[qi]) * scale;
            xi[c] = (sj + g.nodes[qj]) * scale;
            const Eigen::Vector3d x = lo + grid.h * xi;
            Eigen::Vector3i v;
            double alpha = alpha_fcm;
            std::int64_t vid = -1;
            if (image.voxel_of(x, v)) {
              vid = image.linear_index(v[0], v[1], v[2]);
              alpha = image.inside(vid) ? 1.0 : alpha_fcm;
            }
            const double w = g.weights[qi] * g.weights[qj] * scale * scale *
                             grid.h * grid.h;
            builder.add(ac, xi, x, w, alpha, vid, normal);
          }
  }
  return builder.finish(spec, grid.h);
}

SurfaceQuadrature build_surface_quadrature(const EmbeddedGrid& grid,
                                           const VoxelImage& image,
                                           const BasisSpec& spec,
                                           const TriMesh& mesh, int refine) {
  SurfaceBuilder builder;
  std::int64_t dropped = 0;
  const int nsub = 1 << refine;  // subdivision per triangle edge

  for (const auto& tri : mesh.triangles) {
    const Eigen::Vector3d& p0 = mesh.vertices[tri[0]];
    const Eigen::Vector3d e1 = mesh.vertices[tri[1]] - p0;
    const Eigen::Vector3d e2 = mesh.vertices[tri[2]] - p0;
    const Eigen::Vector3d an = e1.cross(e2);
    const double area2 = an.norm();
    if (area2 <= 0.0) continue;
    const Eigen::Vector3d normal = an / area2;
    const double sub_area = 0.5 * area2 / (nsub * nsub);
    // barycentric centroids of the 4^refine congruent sub-triangles
    for (int row = 0; row < nsub; ++row) {
      for (int k = 0; k < 2 * (nsub - row) - 1; ++k) {
        const bool up = k % 2 == 0;
        const double l1 = (k / 2 + (up ? 1.0 : 2.0) / 3.0) / nsub;
        const double l2 = (row + (up ? 1.0 : 2.0) / 3.0) / nsub;
        const Eigen::Vector3d x = p0 + l1 * e1 + l2 * e2;
        // locate the owning cell; points on the grid boundary clamp inward
        Eigen::Vector3i cc;
        bool in_grid = true;
        for (int ax = 0; ax < 3; ++ax) {
          double f = (x[ax] - grid.origin[ax]) / grid.h;
          if (f < 0.0 || f > grid.num_cells[ax] + 0.0) in_grid = false;
          int ci = static_cast<int>(std::floor(f));
          ci = std::min(std::max(ci, 0), grid.num_cells[ax] - 1);
          cc[ax] = ci;
        }
        const std::int32_t ac =
            in_grid ? grid.active_index[static_cast<std::size_t>(
                          grid.cell_id(cc[0], cc[1], cc[2]))]
                    : -1;
        if (ac < 0) {
          ++dropped;
          continue;
        }
        const Eigen::Vector3d lo = grid.cell_min(cc);
        const Eigen::Vector3d xi = (x - lo) / grid.h;
        Eigen::Vector3i v;
        std::int64_t vid = -1;
        if (image.voxel_of(x, v)) vid = image.linear_index(v[0], v[1], v[2]);
        builder.add(ac, xi, x, sub_area, 1.0, vid, normal);
      }
    }
  }
  if (dropped > 0)
    log_warn("surface quadrature: ", dropped,
             " points fell outside the active grid and were dropped");
  return builder.finish(spec, grid.h);
}

Model build_model(VoxelImage image, double h, int p, int depth,
                  BasisFamily family, const MaterialLaws& laws,
                  std::vector<BoundaryCondition> bcs) {
  Model model;
  model.image = std::move(image);
  model.laws = laws;
  model.grid = build_grid(model.image, h, p);
  model.quad = build_quadrature(model.grid, model.image, depth, laws.alpha_fcm);
  model.basis = BasisSpec{family, p};
  model.udofs = dof_map(model.grid, model.basis, 3);
  model.sdofs = dof_map(model.grid, model.basis, 1);
  model.mat = build_material_field(model.image, model.quad, laws);
  model.max_modulus =
      *std::max_element(model.mat.E.begin(), model.mat.E.end());
  model.tables = build_basis_tables(model.basis, model.quad);
  model.bcs = std::move(bcs);
  for (const auto& bc : model.bcs) {
    if (std::holds_alternative<BoxFaceRegion>(bc.region)) {
      model.bc_quad.push_back(build_face_quadrature(
          model.grid, model.image, model.basis,
          std::get<BoxFaceRegion>(bc.region), depth, laws.alpha_fcm));
    } else {
      model.bc_quad.push_back(build_surface_quadrature(
          model.grid, model.image, model.basis, std::get<TriMesh>(bc.region)));
    }
    if (model.bc_quad.back().size() == 0)
      throw Error("boundary condition '" + bc.label +
                  "' has no quadrature points on the active grid");
  }
  model.driven_bc();  // validates uniqueness
  log_info("model: ", model.grid.n_active(), " active cells, ",
           model.n_udofs(), " displacement dofs, ", model.n_sdofs(),
           " phase dofs, ", model.quad.total_points(), " quadrature points");
  return model;
}

}  // namespace crackcell
