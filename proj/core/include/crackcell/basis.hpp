#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "crackcell/grid.hpp"

namespace crackcell {

enum class BasisFamily { IntegratedLegendre, BSpline };

BasisFamily parse_basis_family(const std::string& name);
std::string basis_family_name(BasisFamily family);

struct BasisSpec {
  BasisFamily family = BasisFamily::BSpline;
  int p = 3;
};

// Number of univariate functions on an axis of n cells.
// B-splines: cardinal (non-clamped) uniform splines, n + p functions, cell c
// supports functions c .. c+p. Integrated Legendre: C^0 nodal modes plus
// p-1 internal modes per cell, n*p + 1 functions, cell c supports the
// contiguous block c*p .. c*p + p.
std::int64_t axis_num_functions(const BasisSpec& spec, int n_cells);
std::int64_t axis_support_offset(const BasisSpec& spec, int cell);

// Values and d/dt of the p+1 univariate functions alive on a cell, at local
// coordinate t in [0,1]. Identical on every cell for both families.
void eval_axis(const BasisSpec& spec, double t, double* value, double* deriv);

// Tensor-product values and gradients (with respect to the unit reference
// cell) of all (p+1)^3 local functions at xi in [0,1]^3. Local index ordering
// is x-fastest: m = mi + (p+1)*(mj + (p+1)*mk). Throws Error if xi is outside
// the reference cell.
void eval_basis(const BasisSpec& spec, const Eigen::Vector3d& xi,
                Eigen::VectorXd& values,
                Eigen::Matrix<double, Eigen::Dynamic, 3>& gradients);

// Scalar tensor-product functions restricted to those supported on at least
// one active cell, numbered by ascending tensor index. Vector fields
// interleave components: dof = components*scalar + component.
struct DofLayout {
  BasisSpec spec;
  int components = 1;
  Eigen::Vector3i axis_funcs{0, 0, 0};
  std::int64_t n_scalar = 0;
  std::int64_t n_dofs = 0;
  int n_loc = 0;                            // (p+1)^3
  std::vector<std::int32_t> tensor_to_active;
  std::vector<std::int32_t> cell_dofs;      // n_active x n_loc scalar ids

  const std::int32_t* cell_scalar_ids(std::int64_t active_cell) const {
    return cell_dofs.data() + active_cell * n_loc;
  }
};

DofLayout dof_map(const EmbeddedGrid& grid, const BasisSpec& spec,
                  int components);

}  // namespace crackcell
