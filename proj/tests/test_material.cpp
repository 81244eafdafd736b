#include <doctest.h>

#include <cmath>
#include <random>

#include "crackcell/error.hpp"
#include "crackcell/grid.hpp"
#include "crackcell/material.hpp"
#include "crackcell/quadrature.hpp"

using namespace crackcell;

TEST_SUITE("material") {

TEST_CASE("ash density from K2HPO4 density") {
  CHECK(k2hpo4_to_ash(1.0) == doctest::Approx(1.08855).epsilon(1e-12));
  CHECK(k2hpo4_to_ash(0.0) == doctest::Approx(0.08));
  // negative equivalent densities clamp to the air level
  CHECK(k2hpo4_to_ash(-0.4) == doctest::Approx(0.08));
}

TEST_CASE("modulus law branches") {
  // power branch above 0.486
  CHECK(ash_to_modulus(1.0) == doctest::Approx(10200.0));
  CHECK(ash_to_modulus(0.6) ==
        doctest::Approx(10200.0 * std::pow(0.6, 2.01)).epsilon(1e-12));
  // plateau
  CHECK(ash_to_modulus(0.4) == doctest::Approx(2398.0));
  CHECK(ash_to_modulus(0.486) == doctest::Approx(2398.0));
  // low-density branch
  CHECK(ash_to_modulus(0.2) ==
        doctest::Approx(33900.0 * std::pow(0.2, 2.2)).epsilon(1e-12));

  // near-continuity at 0.3: the two branches agree to about a tenth percent
  const double below = ash_to_modulus(0.3);
  const double above = ash_to_modulus(0.3 + 1e-9);
  CHECK(std::abs(below - above) / 2398.0 < 1e-3);

  // genuine jump at 0.486
  const double plateau = ash_to_modulus(0.486);
  const double jumped = ash_to_modulus(0.486 + 1e-9);
  CHECK(plateau == doctest::Approx(2398.0));
  CHECK(jumped == doctest::Approx(10200.0 * std::pow(0.486, 2.01)));
  CHECK(std::abs(plateau - jumped) > 1.0);
}

TEST_CASE("toughness scaling") {
  MaterialLaws laws;
  CHECK(modulus_to_toughness(laws.E0, laws) == doctest::Approx(laws.Gc0));
  CHECK(modulus_to_toughness(10000.0, laws) ==
        doctest::Approx(7.0 * std::pow(0.5, 0.8)).epsilon(1e-12));
  MaterialLaws flat = laws;
  flat.beta = 0.0;
  CHECK(modulus_to_toughness(123.0, flat) == doctest::Approx(laws.Gc0));
  // monotone: stiffer material is tougher for beta > 0
  CHECK(modulus_to_toughness(25000.0, laws) > laws.Gc0);
}

TEST_CASE("image value mapping per kind") {
  MaterialLaws laws;
  laws.hu_slope = 8e-4;
  laws.hu_intercept = -0.01;
  CHECK(image_value_to_ash(500.0, ImageKind::Hu, laws) ==
        doctest::Approx(k2hpo4_to_ash(8e-4 * 500.0 - 0.01)));
  CHECK(image_value_to_ash(1.0, ImageKind::RhoK2hpo4, laws) ==
        doctest::Approx(1.08855));
  CHECK(image_value_to_ash(0.75, ImageKind::RhoAsh, laws) ==
        doctest::Approx(0.75));
  // ash floor keeps stiffness strictly positive
  CHECK(image_value_to_ash(0.0, ImageKind::RhoAsh, laws) ==
        doctest::Approx(0.08));
}

TEST_CASE("material point elastic constants") {
  MaterialLaws laws;
  const MaterialPoint m = make_material_point(1.0, laws);
  CHECK(m.E == doctest::Approx(10200.0));
  const double lam = m.E * 0.3 / (1.3 * 0.4);
  const double mu = m.E / 2.6;
  CHECK(m.lambda == doctest::Approx(lam).epsilon(1e-12));
  CHECK(m.mu == doctest::Approx(mu).epsilon(1e-12));
  CHECK(m.kappa0 == doctest::Approx(lam + 2.0 * mu / 3.0).epsilon(1e-12));
  CHECK(m.Gc == doctest::Approx(7.0 * std::pow(10200.0 / 20000.0, 0.8)));

  MaterialLaws bad = laws;
  bad.nu = 0.5;
  CHECK_THROWS_AS(make_material_point(1.0, bad), Error);
}

TEST_CASE("split energies: volumetric tension and compression") {
  MaterialLaws laws;
  const MaterialPoint m = make_material_point(0.8, laws);
  const double a = 1e-3;

  SplitEnergies tens = split_energy(a * Eigen::Matrix3d::Identity(), m);
  CHECK(tens.psi_plus ==
        doctest::Approx(0.5 * m.kappa0 * 9.0 * a * a).epsilon(1e-12));
  CHECK(tens.psi_minus == doctest::Approx(0.0));

  SplitEnergies comp = split_energy(-a * Eigen::Matrix3d::Identity(), m);
  CHECK(comp.psi_plus == doctest::Approx(0.0));
  CHECK(comp.psi_minus ==
        doctest::Approx(0.5 * m.kappa0 * 9.0 * a * a).epsilon(1e-12));
}

TEST_CASE("split energies: pure shear is fully tensile") {
  MaterialLaws laws;
  const MaterialPoint m = make_material_point(0.8, laws);
  const double g = 2e-3;
  Eigen::Matrix3d eps = Eigen::Matrix3d::Zero();
  eps(0, 1) = eps(1, 0) = 0.5 * g;
  const SplitEnergies se = split_energy(eps, m);
  CHECK(se.psi_plus == doctest::Approx(m.mu * 0.5 * g * g).epsilon(1e-12));
  CHECK(se.psi_minus == doctest::Approx(0.0));
}

TEST_CASE("split partitions the isotropic energy") {
  MaterialLaws laws;
  const MaterialPoint m = make_material_point(1.1, laws);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Matrix3d e;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) e(i, j) = e(j, i) = dist(rng);
    const SplitEnergies se = split_energy(e, m);
    const double full = 0.5 * (e * se.sigma).trace();
    CHECK(se.psi_plus + se.psi_minus ==
          doctest::Approx(full).epsilon(1e-10));
    CHECK(se.psi_plus >= 0.0);
    CHECK(se.psi_minus >= 0.0);
  }
}

TEST_CASE("degradation function limits") {
  const double eta = 1e-5;
  CHECK(degradation(1.0, eta) == doctest::Approx(1.0));
  CHECK(degradation(0.0, eta) == doctest::Approx(eta));
  CHECK(dissipation_weight(1.0) == doctest::Approx(0.0));
  CHECK(dissipation_weight(0.0) == doctest::Approx(1.0));
}

TEST_CASE("degraded stress: intact equals isotropic, broken keeps compression") {
  MaterialLaws laws;
  laws.eta = 0.0;
  const MaterialPoint m = make_material_point(0.9, laws);
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix3d e;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) e(i, j) = e(j, i) = dist(rng);
    const Eigen::Matrix3d iso =
        m.lambda * e.trace() * Eigen::Matrix3d::Identity() + 2.0 * m.mu * e;
    CHECK((degraded_stress(e, m, 1.0, 0.0) - iso).norm() <
          1e-12 * (1.0 + iso.norm()));
  }
  // fully broken: only the compressive volumetric response remains
  const Eigen::Matrix3d comp = -1e-3 * Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d sig = degraded_stress(comp, m, 0.0, 0.0);
  CHECK(sig(0, 0) == doctest::Approx(-m.kappa0 * 3e-3).epsilon(1e-12));
  const Eigen::Matrix3d tens = 1e-3 * Eigen::Matrix3d::Identity();
  CHECK(degraded_stress(tens, m, 0.0, 0.0).norm() ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("material field maps voxels and fills the fictitious extent") {
  VoxelImage img;
  img.dims = {3, 3, 3};
  img.spacing = {1.0, 1.0, 1.0};
  img.kind = ImageKind::RhoAsh;
  img.values.assign(27, 0.6);
  img.mask.assign(27, 1);
  // grid of 2-cells spans [0,4] > image extent 3: some points are beyond
  EmbeddedGrid grid = build_grid(img, 2.0, 1);
  QuadratureRule quad = build_quadrature(grid, img, 1, 1e-6);
  MaterialLaws laws;
  MaterialField f = build_material_field(img, quad, laws);
  const double e_in = ash_to_modulus(0.6);
  const double e_air = ash_to_modulus(0.08);
  bool saw_air = false;
  for (std::int64_t q = 0; q < f.size(); ++q) {
    if (quad.voxel[q] >= 0) {
      CHECK(f.E[q] == doctest::Approx(e_in));
    } else {
      CHECK(f.E[q] == doctest::Approx(e_air));
      saw_air = true;
    }
    CHECK(f.Gc[q] == doctest::Approx(modulus_to_toughness(f.E[q], laws)));
  }
  CHECK(saw_air);
}

}  // TEST_SUITE
