#include "crackcell/postproc.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "crackcell/assembly.hpp"
#include "crackcell/error.hpp"
#include "crackcell/gauss.hpp"

namespace crackcell {

namespace {

bool point_is_physical(const Model& model, const Eigen::Vector3d& x) {
  Eigen::Vector3i v;
  if (!model.image.voxel_of(x, v)) return false;
  return model.image.inside(model.image.linear_index(v[0], v[1], v[2]));
}

double min_principal_strain_at(const Model& model, const Eigen::VectorXd& u,
                               const Eigen::Vector3d& x) {
  const Eigen::Matrix3d eps = strain_at(model, u, x);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(eps,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

double probe_strain(const Model& model, const Eigen::VectorXd& u,
                    const ProbeSpec& probe) {
  if (probe.radius < 0.0) throw Error("probe: radius must be >= 0");

  if (probe.radius == 0.0) {
    // nearest physical quadrature point
    double best = std::numeric_limits<double>::max();
    Eigen::Vector3d bx;
    bool found = false;
    for (std::int64_t c = 0; c < model.grid.n_active(); ++c) {
      const RuleTemplate& t = model.quad.templates[model.quad.cell_template[c]];
      const Eigen::Vector3d lo =
          model.grid.cell_min(model.grid.cell_coords(model.grid.active_cells[c]));
      const std::int64_t off = model.quad.cell_offset[c];
      for (std::int64_t q = 0; q < t.size(); ++q) {
        if (model.quad.alpha[off + q] != 1.0) continue;
        const Eigen::Vector3d x = lo + model.grid.h * t.points.row(q).transpose();
        const double d = (x - probe.center).squaredNorm();
        if (d < best) {
          best = d;
          bx = x;
          found = true;
        }
      }
    }
    if (!found) throw Error("probe: no physical quadrature point in the model");
    return 1e6 * min_principal_strain_at(model, u, bx);
  }

  // antipodally symmetric Gauss-cube samples scaled to the ball
  const Gauss1d g = gauss_legendre_unit(4);
  double sum = 0.0;
  std::int64_t n = 0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k)
    for (std::size_t j = 0; j < g.nodes.size(); ++j)
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const Eigen::Vector3d xi(2.0 * g.nodes[i] - 1.0,
                                 2.0 * g.nodes[j] - 1.0,
                                 2.0 * g.nodes[k] - 1.0);
        if (xi.norm() > 1.0) continue;  // keep the set antipodal within the ball
        const Eigen::Vector3d x = probe.center + probe.radius * xi;
        if (!point_is_physical(model, x)) continue;
        sum += min_principal_strain_at(model, u, x);
        ++n;
      }
  if (n == 0)
    throw Error("probe: sphere contains no physical material");
  return 1e6 * sum / static_cast<double>(n);
}

void principal_values(const Eigen::Matrix3d& tensor, Eigen::Vector3d& values,
                      Eigen::Matrix3d& directions) {
  const Eigen::Matrix3d sym = 0.5 * (tensor + tensor.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(sym);
  // Eigen sorts ascending; flip to descending
  for (int i = 0; i < 3; ++i) {
    values[i] = es.eigenvalues()[2 - i];
    directions.col(i) = es.eigenvectors().col(2 - i);
  }
}

FailureLoad failure_load(std::span<const ForceStrainRecord> records) {
  FailureLoad out;
  if (records.empty()) return out;
  double best = -1.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double f = std::abs(records[i].force);
    if (f > best) {
      best = f;
      best_idx = i;
    }
  }
  out.force = records[best_idx].force;
  out.step = records[best_idx].step;
  out.peak_detected = best_idx + 1 < records.size();
  return out;
}

IsoVolume crack_isovolume(const Model& model, const FieldState& state,
                          double s_low, double s_high, double warp_scale,
                          int samples_per_cell) {
  if (s_low > s_high)
    throw Error("isovolume: s_low must not exceed s_high");
  IsoVolume iso;
  iso.s_low = s_low;
  iso.s_high = s_high;
  const int ns =
      samples_per_cell > 0 ? samples_per_cell : 2 * (model.grid.p + 1);
  const double d = model.grid.h / ns;
  iso.box_size = Eigen::Vector3d(d, d, d);

  Eigen::VectorXd vals;
  Eigen::Matrix<double, Eigen::Dynamic, 3> grads;
  Eigen::VectorXd sloc, ux, uy, uz;
  const int nloc = model.sdofs.n_loc;

  for (std::int64_t c = 0; c < model.grid.n_active(); ++c) {
    const Eigen::Vector3d lo =
        model.grid.cell_min(model.grid.cell_coords(model.grid.active_cells[c]));
    const std::int32_t* sids = model.sdofs.cell_scalar_ids(c);
    const std::int32_t* uids = model.udofs.cell_scalar_ids(c);
    sloc.resize(nloc);
    ux.resize(nloc);
    uy.resize(nloc);
    uz.resize(nloc);
    for (int a = 0; a < nloc; ++a) {
      sloc[a] = state.s[sids[a]];
      ux[a] = state.u[3 * uids[a]];
      uy[a] = state.u[3 * uids[a] + 1];
      uz[a] = state.u[3 * uids[a] + 2];
    }
    for (int k = 0; k < ns; ++k)
      for (int j = 0; j < ns; ++j)
        for (int i = 0; i < ns; ++i) {
          const Eigen::Vector3d xi((i + 0.5) / ns, (j + 0.5) / ns,
                                   (k + 0.5) / ns);
          const Eigen::Vector3d x = lo + model.grid.h * xi;
          if (!point_is_physical(model, x)) continue;
          eval_basis(model.basis, xi, vals, grads);
          const double sv = vals.dot(sloc);
          if (sv < s_low || sv > s_high) continue;
          iso.centers.push_back(x);
          iso.s_values.push_back(sv);
          std::array<Eigen::Vector3d, 8> corner;
          int ci = 0;
          for (int ck = 0; ck < 2; ++ck)
            for (int cj = 0; cj < 2; ++cj)
              for (int cc = 0; cc < 2; ++cc, ++ci) {
                Eigen::Vector3d cxi = xi;
                cxi[0] += (cc - 0.5) / ns;
                cxi[1] += (cj - 0.5) / ns;
                cxi[2] += (ck - 0.5) / ns;
                for (int a = 0; a < 3; ++a)
                  cxi[a] = std::min(1.0, std::max(0.0, cxi[a]));
                eval_basis(model.basis, cxi, vals, grads);
                const Eigen::Vector3d disp(vals.dot(ux), vals.dot(uy),
                                           vals.dot(uz));
                corner[ci] = lo + model.grid.h * cxi + warp_scale * disp;
              }
          iso.corners.push_back(corner);
        }
  }
  return iso;
}

RegressionStats regression(std::span<const double> measured,
                           std::span<const double> computed) {
  if (measured.size() != computed.size())
    throw Error("regression: measured and computed sizes differ");
  const std::int64_t n = static_cast<std::int64_t>(measured.size());
  if (n < 3) throw Error("regression: needs at least 3 pairs");

  double mx = 0.0, my = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    mx += measured[i];
    my += computed[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double dx = measured[i] - mx, dy = computed[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error("regression: measured values are constant");

  RegressionStats st;
  st.n = n;
  st.slope = sxy / sxx;
  st.intercept = my - st.slope * mx;
  double ss_res = 0.0, abs_rel = 0.0;
  std::int64_t n_rel = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double fit = st.slope * measured[i] + st.intercept;
    ss_res += (computed[i] - fit) * (computed[i] - fit);
    if (std::abs(measured[i]) >= 10.0) {  // microstrain noise floor
      abs_rel += std::abs(computed[i] - measured[i]) / std::abs(measured[i]);
      ++n_rel;
    }
  }
  st.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  st.rmse = std::sqrt(ss_res / n);
  st.mean_abs_rel_err_pct =
      n_rel > 0 ? 100.0 * abs_rel / static_cast<double>(n_rel) : 0.0;
  return st;
}

}  // namespace crackcell
