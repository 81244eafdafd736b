#include "crackcell/material.hpp"

#include <cmath>

#include "crackcell/error.hpp"
#include "crackcell/runtime.hpp"

namespace crackcell {

double k2hpo4_to_ash(double rho_k2hpo4) {
  const double r = rho_k2hpo4 < 0.0 ? 0.0 : rho_k2hpo4;
  return 0.877 * 1.15 * r + 0.08;
}

double ash_to_modulus(double rho_ash) {
  if (rho_ash > 0.486) return 10200.0 * std::pow(rho_ash, 2.01);
  if (rho_ash > 0.3) return 2398.0;
  return 33900.0 * std::pow(rho_ash, 2.2);
}

double modulus_to_toughness(double E, const MaterialLaws& laws) {
  return laws.Gc0 * std::pow(E / laws.E0, laws.beta);
}

double image_value_to_ash(double value, ImageKind kind,
                          const MaterialLaws& laws) {
  double ash = 0.0;
  switch (kind) {
    case ImageKind::Hu:
      ash = k2hpo4_to_ash(laws.hu_slope * value + laws.hu_intercept);
      break;
    case ImageKind::RhoK2hpo4:
      ash = k2hpo4_to_ash(value);
      break;
    case ImageKind::RhoAsh:
      ash = value;
      break;
  }
  return ash < 0.08 ? 0.08 : ash;  // air floor, keeps E strictly positive
}

MaterialPoint make_material_point(double rho_ash, const MaterialLaws& laws) {
  if (laws.nu < 0.0 || laws.nu >= 0.5)
    throw Error("material: nu must be in [0, 0.5)");
  MaterialPoint m;
  m.rho_ash = rho_ash;
  m.E = ash_to_modulus(rho_ash);
  m.nu = laws.nu;
  m.lambda = m.E * laws.nu / ((1.0 + laws.nu) * (1.0 - 2.0 * laws.nu));
  m.mu = m.E / (2.0 * (1.0 + laws.nu));
  m.kappa0 = m.lambda + 2.0 * m.mu / 3.0;
  m.Gc = modulus_to_toughness(m.E, laws);
  return m;
}

SplitEnergies split_energy(const Eigen::Matrix3d& eps,
                           const MaterialPoint& m) {
  SplitEnergies out;
  const double tr = eps.trace();
  const double tr_pos = tr > 0.0 ? tr : 0.0;
  const double tr_neg = tr < 0.0 ? tr : 0.0;
  const Eigen::Matrix3d dev = eps - (tr / 3.0) * Eigen::Matrix3d::Identity();
  out.psi_plus = 0.5 * m.kappa0 * tr_pos * tr_pos +
                 m.mu * dev.squaredNorm();
  out.psi_minus = 0.5 * m.kappa0 * tr_neg * tr_neg;
  out.sigma = m.lambda * tr * Eigen::Matrix3d::Identity() + 2.0 * m.mu * eps;
  return out;
}

double degradation(double s, double eta) {
  return (1.0 - eta) * s * s + eta;
}

double dissipation_weight(double s) { return 1.0 - s * s; }

Eigen::Matrix3d degraded_stress(const Eigen::Matrix3d& eps,
                                const MaterialPoint& m, double s, double eta) {
  const double g = degradation(s, eta);
  const double tr = eps.trace();
  const double tr_pos = tr > 0.0 ? tr : 0.0;
  const double tr_neg = tr < 0.0 ? tr : 0.0;
  const Eigen::Matrix3d dev = eps - (tr / 3.0) * Eigen::Matrix3d::Identity();
  return g * (m.kappa0 * tr_pos * Eigen::Matrix3d::Identity() +
              2.0 * m.mu * dev) +
         m.kappa0 * tr_neg * Eigen::Matrix3d::Identity();
}

MaterialField build_material_field(const VoxelImage& image,
                                   const QuadratureRule& quad,
                                   const MaterialLaws& laws) {
  const std::int64_t n = quad.total_points();
  MaterialField f;
  f.E.resize(n);
  f.lambda.resize(n);
  f.mu.resize(n);
  f.kappa0.resize(n);
  f.Gc.resize(n);
  const double air_ash = image_value_to_ash(0.0, ImageKind::RhoK2hpo4, laws);
  parallel_for(n, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t q = b; q < e; ++q) {
      const std::int64_t v = quad.voxel[q];
      const double ash =
          v < 0 ? air_ash
                : image_value_to_ash(image.values[static_cast<std::size_t>(v)],
                                     image.kind, laws);
      const MaterialPoint m = make_material_point(ash, laws);
      f.E[q] = m.E;
      f.lambda[q] = m.lambda;
      f.mu[q] = m.mu;
      f.kappa0[q] = m.kappa0;
      f.Gc[q] = m.Gc;
    }
  });
  return f;
}

}  // namespace crackcell
