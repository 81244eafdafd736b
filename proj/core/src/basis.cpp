#include "crackcell/basis.hpp"

#include <cmath>
#include <vector>

#include "crackcell/error.hpp"

namespace crackcell {

BasisFamily parse_basis_family(const std::string& name) {
  if (name == "bspline") return BasisFamily::BSpline;
  if (name == "integrated_legendre") return BasisFamily::IntegratedLegendre;
  throw Error("unknown basis family '" + name +
              "' (expected bspline|integrated_legendre)");
}

std::string basis_family_name(BasisFamily family) {
  return family == BasisFamily::BSpline ? "bspline" : "integrated_legendre";
}

std::int64_t axis_num_functions(const BasisSpec& spec, int n_cells) {
  if (spec.family == BasisFamily::BSpline) return n_cells + spec.p;
  return static_cast<std::int64_t>(n_cells) * spec.p + 1;
}

std::int64_t axis_support_offset(const BasisSpec& spec, int cell) {
  if (spec.family == BasisFamily::BSpline) return cell;
  return static_cast<std::int64_t>(cell) * spec.p;
}

namespace {

// Values at degree k of the k+1 cardinal B-spline segments alive on a cell,
// uniform integer knots, local coordinate t in [0,1]. Cox-de Boor with knot
// differences reduced to the uniform case.
void bspline_level(int k, double t, const double* prev, double* out) {
  for (int r = k; r >= 0; --r) {
    const double a = (t + k - r) / k;
    const double b = (r + 1.0 - t) / k;
    const double nl = (r >= 1) ? prev[r - 1] : 0.0;
    const double nr = (r <= k - 1) ? prev[r] : 0.0;
    out[r] = a * nl + b * nr;
  }
}

void bspline_axis(int p, double t, double* value, double* deriv) {
  std::vector<double> work(p + 1);
  work[0] = 1.0;
  for (int k = 1; k <= p - 1; ++k) bspline_level(k, t, work.data(), work.data());
  // d/dt N_{p,r} = N_{p-1,r-1} - N_{p-1,r} on unit knots
  for (int r = 0; r <= p; ++r) {
    const double nl = (r >= 1) ? work[r - 1] : 0.0;
    const double nr = (r <= p - 1) ? work[r] : 0.0;
    deriv[r] = nl - nr;
  }
  if (p == 0) {
    value[0] = 1.0;
    deriv[0] = 0.0;
    return;
  }
  bspline_level(p, t, work.data(), value);
}

// Legendre values L_0..L_n at xi via the three-term recurrence.
void legendre_values(int n, double xi, double* L) {
  L[0] = 1.0;
  if (n >= 1) L[1] = xi;
  for (int k = 1; k < n; ++k)
    L[k + 1] = ((2 * k + 1) * xi * L[k] - k * L[k - 1]) / (k + 1);
}

// Nodal hat modes at the cell ends, integrated-Legendre internal modes in
// between. Local ordering: m=0 left node, m=1..p-1 bubble of degree m+1,
// m=p right node.
void integrated_legendre_axis(int p, double t, double* value, double* deriv) {
  const double xi = 2.0 * t - 1.0;
  value[0] = 0.5 * (1.0 - xi);
  deriv[0] = -1.0;
  value[p] = 0.5 * (1.0 + xi);
  deriv[p] = 1.0;
  if (p < 2) return;
  std::vector<double> L(p + 1);
  legendre_values(p, xi, L.data());
  for (int m = 1; m <= p - 1; ++m) {
    const int j = m + 1;
    const double norm = 1.0 / std::sqrt(4.0 * j - 2.0);
    value[m] = (L[j] - L[j - 2]) * norm;
    deriv[m] = 2.0 * (2.0 * j - 1.0) * L[j - 1] * norm;  // d/dt = 2 d/dxi
  }
}

}  // namespace

void eval_axis(const BasisSpec& spec, double t, double* value, double* deriv) {
  if (spec.p < 1) throw Error("eval_axis: order must be >= 1");
  if (spec.family == BasisFamily::BSpline)
    bspline_axis(spec.p, t, value, deriv);
  else
    integrated_legendre_axis(spec.p, t, value, deriv);
}

void eval_basis(const BasisSpec& spec, const Eigen::Vector3d& xi,
                Eigen::VectorXd& values,
                Eigen::Matrix<double, Eigen::Dynamic, 3>& gradients) {
  for (int a = 0; a < 3; ++a)
    if (xi[a] < 0.0 || xi[a] > 1.0)
      throw Error("eval_basis: point outside the reference cell");
  const int m = spec.p + 1;
  Eigen::MatrixXd v(m, 3), d(m, 3);
  for (int a = 0; a < 3; ++a)
    eval_axis(spec, xi[a], v.col(a).data(), d.col(a).data());
  const int nloc = m * m * m;
  values.resize(nloc);
  gradients.resize(nloc, 3);
  int idx = 0;
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i, ++idx) {
        values(idx) = v(i, 0) * v(j, 1) * v(k, 2);
        gradients(idx, 0) = d(i, 0) * v(j, 1) * v(k, 2);
        gradients(idx, 1) = v(i, 0) * d(j, 1) * v(k, 2);
        gradients(idx, 2) = v(i, 0) * v(j, 1) * d(k, 2);
      }
}

DofLayout dof_map(const EmbeddedGrid& grid, const BasisSpec& spec,
                  int components) {
  if (components < 1) throw Error("dof_map: components must be >= 1");
  DofLayout layout;
  layout.spec = spec;
  layout.components = components;
  const int m = spec.p + 1;
  layout.n_loc = m * m * m;
  for (int a = 0; a < 3; ++a)
    layout.axis_funcs[a] =
        static_cast<int>(axis_num_functions(spec, grid.num_cells[a]));

  const std::int64_t ntensor = static_cast<std::int64_t>(layout.axis_funcs[0]) *
                               layout.axis_funcs[1] * layout.axis_funcs[2];
  layout.tensor_to_active.assign(static_cast<std::size_t>(ntensor), -1);

  auto tensor_id = [&](std::int64_t fi, std::int64_t fj, std::int64_t fk) {
    return (fk * layout.axis_funcs[1] + fj) * layout.axis_funcs[0] + fi;
  };

  for (std::int64_t c = 0; c < grid.n_active(); ++c) {
    const Eigen::Vector3i cc = grid.cell_coords(grid.active_cells[c]);
    const std::int64_t o0 = axis_support_offset(spec, cc[0]);
    const std::int64_t o1 = axis_support_offset(spec, cc[1]);
    const std::int64_t o2 = axis_support_offset(spec, cc[2]);
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          layout.tensor_to_active[static_cast<std::size_t>(
              tensor_id(o0 + i, o1 + j, o2 + k))] = 0;
  }
  std::int64_t next = 0;
  for (auto& t : layout.tensor_to_active)
    if (t == 0) t = static_cast<std::int32_t>(next++);
  layout.n_scalar = next;
  layout.n_dofs = next * components;

  layout.cell_dofs.resize(static_cast<std::size_t>(grid.n_active()) *
                          layout.n_loc);
  for (std::int64_t c = 0; c < grid.n_active(); ++c) {
    const Eigen::Vector3i cc = grid.cell_coords(grid.active_cells[c]);
    const std::int64_t o0 = axis_support_offset(spec, cc[0]);
    const std::int64_t o1 = axis_support_offset(spec, cc[1]);
    const std::int64_t o2 = axis_support_offset(spec, cc[2]);
    std::int32_t* dst = layout.cell_dofs.data() + c * layout.n_loc;
    int idx = 0;
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i, ++idx)
          dst[idx] = layout.tensor_to_active[static_cast<std::size_t>(
              tensor_id(o0 + i, o1 + j, o2 + k))];
  }
  return layout;
}

}  // namespace crackcell
