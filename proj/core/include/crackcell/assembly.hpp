#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "crackcell/model.hpp"

namespace crackcell {

using SparseMat = Eigen::SparseMatrix<double>;

struct AssembledSystem {
  SparseMat A;
  Eigen::VectorXd b;
};

// Penalty pin of the scalar phase field on a surface region (used to anchor
// s at a crack face in verification problems).
struct ScalarBc {
  const SurfaceQuadrature* surface = nullptr;
  double value = 0.0;
  double beta = 0.0;
};

// Momentum balance with the volumetric-deviatoric split, linearized by
// freezing the sign of tr(eps) at each quadrature point to its value under
// u_lin (both split branches coincide wherever s = 1, so the first staggered
// sweep from the intact state is exact). Dirichlet data enters through the
// penalty terms; `applied` scales the driven condition. The matrix is
// symmetric positive definite for admissible s and stores the lower triangle
// only - view it self-adjointly (as the bundled solvers do) before forming
// products with it.
AssembledSystem assemble_elastic(const Model& model, const Eigen::VectorXd& s,
                                 const Eigen::VectorXd& u_lin, double applied);

// True residual of the momentum balance (exact Macaulay brackets) including
// penalty forces: r = f_int(u, s) + f_pen(u) - b(applied).
Eigen::VectorXd elastic_residual(const Model& model, const Eigen::VectorXd& u,
                                 const Eigen::VectorXd& s, double applied);

// Phase-field evolution system for the current history field:
// (4 l0^2 grad, grad) + ((4 l0 (1-eta) H / Gc + 1) ., .) = (1, .)
// A stores the lower triangle only, like assemble_elastic.
AssembledSystem assemble_phasefield(const Model& model,
                                    const Eigen::VectorXd& H, double l0,
                                    std::span<const ScalarBc> sbcs = {});

Eigen::VectorXd phasefield_residual(const Model& model,
                                    const Eigen::VectorXd& s,
                                    const Eigen::VectorXd& H, double l0,
                                    std::span<const ScalarBc> sbcs = {});

// Tensile energy density at every quadrature point for the displacement u.
Eigen::VectorXd tensile_energy(const Model& model, const Eigen::VectorXd& u);

// H <- max(H, psi_plus(u)) pointwise. Never decreases H.
void update_history(const Model& model, const Eigen::VectorXd& u,
                    Eigen::VectorXd& H);

// Phase-field values at every quadrature point.
Eigen::VectorXd phase_at_points(const Model& model, const Eigen::VectorXd& s);

// Resultant of the degraded traction sigma * n over a boundary-condition
// region, indicator-weighted. Sign convention: force exerted on the domain
// through that region. Warns when the region carries no constraint.
Eigen::Vector3d reaction_force(const Model& model, const FieldState& state,
                               std::size_t bc_index);

// Strain tensor of the displacement field at a physical point. Throws Error
// when the point lies outside the active grid.
Eigen::Matrix3d strain_at(const Model& model, const Eigen::VectorXd& u,
                          const Eigen::Vector3d& x);

// Scalar field value at a physical point.
double scalar_at(const Model& model, const Eigen::VectorXd& s,
                 const Eigen::Vector3d& x);

// Displacement vector at a physical point.
Eigen::Vector3d displacement_at(const Model& model, const Eigen::VectorXd& u,
                                const Eigen::Vector3d& x);

}  // namespace crackcell
