#pragma once

#include <Eigen/Dense>
#include <vector>

#include "crackcell/quadrature.hpp"
#include "crackcell/voxel_image.hpp"

namespace crackcell {

// Constitutive constants and mapping coefficients. Units: MPa for moduli,
// N/mm for toughness, g/cm^3 for densities.
struct MaterialLaws {
  double E0 = 20000.0;
  double Gc0 = 7.0;
  double beta = 0.8;
  double nu = 0.3;
  double eta = 1e-5;
  double alpha_fcm = 1e-6;
  // scanner calibration line rho_K2HPO4 = hu_slope * HU + hu_intercept
  double hu_slope = 1e-3;
  double hu_intercept = 0.0;
};

// Ash density from K2HPO4-equivalent density; negative inputs clamp to zero
// before the affine map, so the minimum output is the 0.08 air level.
double k2hpo4_to_ash(double rho_k2hpo4);

// Elastic modulus [MPa] from ash density, piecewise power law with a constant
// middle plateau. Continuous at 0.3, jumps at 0.486.
double ash_to_modulus(double rho_ash);

// Toughness scaling Gc = Gc0 * (E / E0)^beta.
double modulus_to_toughness(double E, const MaterialLaws& laws);

// Image value -> ash density under the image kind (HU passes through the
// calibration line). Values below the 0.08 air level are floored there so
// fictitious-domain stiffness never degenerates to zero.
double image_value_to_ash(double value, ImageKind kind,
                          const MaterialLaws& laws);

struct MaterialPoint {
  double rho_ash = 0.0;
  double E = 0.0;
  double nu = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double kappa0 = 0.0;  // lambda + 2 mu / 3
  double Gc = 0.0;
};

MaterialPoint make_material_point(double rho_ash, const MaterialLaws& laws);

// Volumetric-deviatoric split of the elastic energy. sigma is the undamaged
// stress (the degraded stress applies g(s) to the tensile part only).
struct SplitEnergies {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
};

SplitEnergies split_energy(const Eigen::Matrix3d& eps,
                           const MaterialPoint& m);

double degradation(double s, double eta);       // (1-eta) s^2 + eta
double dissipation_weight(double s);            // w(s) = 1 - s^2
Eigen::Matrix3d degraded_stress(const Eigen::Matrix3d& eps,
                                const MaterialPoint& m, double s, double eta);

// Per-quadrature-point material constants mapped from the voxel values.
// Points beyond the image extent take the air floor.
struct MaterialField {
  std::vector<double> E, lambda, mu, kappa0, Gc;
  std::int64_t size() const { return static_cast<std::int64_t>(E.size()); }
};

MaterialField build_material_field(const VoxelImage& image,
                                   const QuadratureRule& quad,
                                   const MaterialLaws& laws);

}  // namespace crackcell
