#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crackcell/basis.hpp"
#include "crackcell/grid.hpp"
#include "crackcell/material.hpp"
#include "crackcell/quadrature.hpp"
#include "crackcell/trimesh.hpp"
#include "crackcell/voxel_image.hpp"

namespace crackcell {

// One outer face of the grid bounding box. axis in {0,1,2}, max_side picks
// the + face.
struct BoxFaceRegion {
  int axis = 2;
  bool max_side = false;
};

BoxFaceRegion parse_box_face(const std::string& name);  // "x-", "z+", ...
std::string box_face_name(const BoxFaceRegion& region);

enum class BcKind {
  Fixed,       // all components pinned to zero
  Prescribed,  // one component pinned to a value (driven or constant)
  Function,    // all components pinned to target_fn(x); in-code use only
};

struct BoundaryCondition {
  std::variant<BoxFaceRegion, TriMesh> region;
  BcKind kind = BcKind::Fixed;
  int component = 2;
  bool driven = false;   // receives the load schedule's applied displacement
  double value = 0.0;    // constant target for non-driven Prescribed
  double penalty_scale = 1e3;  // beta = penalty_scale * max(E) / h
  std::function<Eigen::Vector3d(const Eigen::Vector3d&)> target_fn;
  std::string label;
};

// Surface quadrature with cached shape values: one row per surface point.
struct SurfaceQuadrature {
  std::vector<std::int64_t> cell;   // active cell index
  std::vector<double> weight;       // physical area weight [mm^2]
  std::vector<double> alpha;
  std::vector<std::int64_t> voxel;  // -1 beyond image extent
  std::vector<Eigen::Vector3d> point;
  std::vector<Eigen::Vector3d> normal;  // outward unit normal
  Eigen::MatrixXd N;                    // npts x n_loc
  Eigen::MatrixXd dNdx, dNdy, dNdz;     // npts x n_loc, physical derivatives

  std::int64_t size() const { return static_cast<std::int64_t>(cell.size()); }
  double weighted_area() const;
};

// Shape values and reference-cell gradients for every rule template, shared
// by all cells using that template.
struct BasisTables {
  int n_loc = 0;
  std::vector<Eigen::MatrixXd> N;      // per template: npts x n_loc
  std::vector<Eigen::MatrixXd> dN[3];  // per axis, npts x n_loc
};

BasisTables build_basis_tables(const BasisSpec& spec,
                               const QuadratureRule& quad);

// Everything fixed over a simulation: geometry, quadrature, spaces, material
// constants, boundary conditions.
struct Model {
  VoxelImage image;
  MaterialLaws laws;
  EmbeddedGrid grid;
  QuadratureRule quad;
  BasisSpec basis;
  DofLayout udofs;  // 3 components
  DofLayout sdofs;  // 1 component
  MaterialField mat;
  BasisTables tables;
  std::vector<BoundaryCondition> bcs;
  std::vector<SurfaceQuadrature> bc_quad;
  double max_modulus = 0.0;

  std::int64_t n_udofs() const { return udofs.n_dofs; }
  std::int64_t n_sdofs() const { return sdofs.n_dofs; }
  int driven_bc() const;  // index of the driven condition, -1 if none
  double penalty_beta(const BoundaryCondition& bc) const {
    return bc.penalty_scale * max_modulus / grid.h;
  }
};

// Evolving fields over a Model.
struct FieldState {
  Eigen::VectorXd u;  // displacement dofs
  Eigen::VectorXd s;  // phase-field dofs (1 intact, 0 broken)
  Eigen::VectorXd H;  // history energy per quadrature point
  double applied = 0.0;
  int step = 0;
};

FieldState make_state(const Model& model);

// Quadrature for one box face of the grid: per surface cell a 2D Gauss rule
// (subdivided like the volume rule on cut cells), alpha from the adjacent
// voxel band.
SurfaceQuadrature build_face_quadrature(const EmbeddedGrid& grid,
                                        const VoxelImage& image,
                                        const BasisSpec& spec,
                                        const BoxFaceRegion& region, int depth,
                                        double alpha_fcm);

// Quadrature over an embedded triangulated surface: a centroid-subdivision
// rule per triangle, points mapped into their containing active cells.
// Triangles lying outside every active cell are dropped with a warning.
SurfaceQuadrature build_surface_quadrature(const EmbeddedGrid& grid,
                                           const VoxelImage& image,
                                           const BasisSpec& spec,
                                           const TriMesh& mesh,
                                           int refine = 2);

// Assembles grid, quadrature, dof layouts, material field, shape tables and
// boundary-condition quadratures. The image is moved in.
Model build_model(VoxelImage image, double h, int p, int depth,
                  BasisFamily family, const MaterialLaws& laws,
                  std::vector<BoundaryCondition> bcs);

}  // namespace crackcell
