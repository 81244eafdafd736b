#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <vector>

#include "crackcell/assembly.hpp"
#include "crackcell/error.hpp"
#include "crackcell/postproc.hpp"
#include "test_helpers.hpp"

using namespace crackcell;
using crackcell::testing::interp_displacement;
using crackcell::testing::interp_separable;
using crackcell::testing::SeparableTerm;
using crackcell::testing::solid_box;

namespace {

// Displacement whose strain is diag(a z + b1, a z + b2, a z + b3): linear in
// z, zero shear. All components are quadratic polynomials, so any p >= 2
// space carries it exactly.
Eigen::VectorXd linear_strain_field(const Model& model, double a, double b1,
                                    double b2, double b3) {
  auto one = [](double) { return 1.0; };
  std::vector<SeparableTerm> terms;
  terms.push_back({0, [](double x) { return x; }, one,
                   [=](double z) { return a * z + b1; }});
  terms.push_back({1, one, [](double y) { return y; },
                   [=](double z) { return a * z + b2; }});
  terms.push_back({2, one, one,
                   [=](double z) { return b3 * z + 0.5 * a * z * z; }});
  terms.push_back({2, [=](double x) { return -0.5 * a * x * x; }, one, one});
  terms.push_back({2, one, [=](double y) { return -0.5 * a * y * y; }, one});
  return interp_displacement(model, terms);
}

}  // namespace

TEST_CASE("sphere probe reproduces the center value of a linear strain field") {
  const double a = 2e-5, b1 = 3e-4, b2 = 8e-4, b3 = -5e-4;
  for (BasisSpec spec : {BasisSpec{BasisFamily::BSpline, 2},
                         BasisSpec{BasisFamily::IntegratedLegendre, 2}}) {
    CAPTURE(basis_family_name(spec.family));
    MaterialLaws laws;
    Model model = build_model(solid_box(4, 4, 6), 1.0, spec.p, 0, spec.family,
                              laws, {});
    Eigen::VectorXd u = linear_strain_field(model, a, b1, b2, b3);

    // sanity: the interpolated field really has the intended strain
    Eigen::Matrix3d eps = strain_at(model, u, {1.7, 2.3, 3.1});
    Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
    expected.diagonal() << a * 3.1 + b1, a * 3.1 + b2, a * 3.1 + b3;
    CHECK((eps - expected).cwiseAbs().maxCoeff() < 1e-12);

    ProbeSpec probe;
    probe.center = {2.0, 2.0, 3.0};
    probe.radius = 1.0;
    const double center_micro = 1e6 * (a * 3.0 + b3);
    CHECK(probe_strain(model, u, probe) ==
          doctest::Approx(center_micro).epsilon(1e-10));
  }
}

TEST_CASE("zero-radius probe evaluates the nearest quadrature point") {
  const double a = 2e-5, b1 = 3e-4, b2 = 8e-4, b3 = -5e-4;
  MaterialLaws laws;
  Model model = build_model(solid_box(4, 4, 6), 1.0, 2, 0,
                            BasisFamily::BSpline, laws, {});
  Eigen::VectorXd u = linear_strain_field(model, a, b1, b2, b3);

  ProbeSpec probe;
  probe.center = {1.37, 2.11, 3.42};
  probe.radius = 0.0;

  double best = std::numeric_limits<double>::max();
  Eigen::Vector3d bx = Eigen::Vector3d::Zero();
  for (std::int64_t c = 0; c < model.grid.n_active(); ++c) {
    const RuleTemplate& t = model.quad.templates[model.quad.cell_template[c]];
    const Eigen::Vector3d lo =
        model.grid.cell_min(model.grid.cell_coords(model.grid.active_cells[c]));
    for (std::int64_t q = 0; q < t.size(); ++q) {
      const Eigen::Vector3d x =
          lo + model.grid.h * t.points.row(q).transpose();
      const double d = (x - probe.center).squaredNorm();
      if (d < best) {
        best = d;
        bx = x;
      }
    }
  }
  const double expected = 1e6 * (a * bx[2] + b3);
  CHECK(probe_strain(model, u, probe) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("probe rejects spheres without physical material") {
  MaterialLaws laws;
  VoxelImage img = solid_box(6, 4, 4);
  // mask out a slab so the left third of the box is void
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 2; ++i)
        img.mask[static_cast<std::size_t>(img.linear_index(i, j, k))] = 0;
  Model model = build_model(std::move(img), 1.0, 1, 1, BasisFamily::BSpline,
                            laws, {});
  Eigen::VectorXd u = Eigen::VectorXd::Zero(model.n_udofs());

  ProbeSpec probe;
  probe.center = {0.8, 2.0, 2.0};
  probe.radius = 0.5;
  CHECK_THROWS_AS(probe_strain(model, u, probe), Error);

  probe.center = {4.0, 2.0, 2.0};  // well inside the solid part
  CHECK(std::isfinite(probe_strain(model, u, probe)));
}

TEST_CASE("principal values are sorted with matching directions") {
  const Eigen::Matrix3d R =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized())
          .toRotationMatrix();
  Eigen::Vector3d diag(5.0, 3.0, 1.0);
  const Eigen::Matrix3d T = R * diag.asDiagonal() * R.transpose();

  Eigen::Vector3d values;
  Eigen::Matrix3d dirs;
  principal_values(T, values, dirs);
  CHECK(values[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(values[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(values[2] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(dirs.col(i).dot(R.col(i))) ==
          doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dirs.determinant()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("failure load finds the peak and flags whether it was passed") {
  auto rec = [](int step, double f) {
    ForceStrainRecord r;
    r.step = step;
    r.force = f;
    return r;
  };
  std::vector<ForceStrainRecord> hist = {rec(1, 1.0), rec(2, 3.0), rec(3, 5.0),
                                         rec(4, 4.0), rec(5, 1.5)};
  FailureLoad fl = failure_load(hist);
  CHECK(fl.force == 5.0);
  CHECK(fl.step == 3);
  CHECK(fl.peak_detected);

  std::vector<ForceStrainRecord> rising = {rec(1, 1.0), rec(2, 2.0),
                                           rec(3, 3.0)};
  fl = failure_load(rising);
  CHECK(fl.force == 3.0);
  CHECK_FALSE(fl.peak_detected);

  // magnitude decides; the signed value is reported
  std::vector<ForceStrainRecord> comp = {rec(1, -1.0), rec(2, -6.0),
                                         rec(3, -2.0)};
  fl = failure_load(comp);
  CHECK(fl.force == -6.0);
  CHECK(fl.peak_detected);

  std::vector<ForceStrainRecord> empty;
  CHECK(failure_load(empty).force == 0.0);
}

TEST_CASE("isovolume selects the phase window and warps by displacement") {
  MaterialLaws laws;
  Model model = build_model(solid_box(4, 4, 4), 1.0, 1, 0,
                            BasisFamily::BSpline, laws, {});
  FieldState state = make_state(model);
  state.s = interp_separable(
      model, [](double x) { return x / 4.0; }, [](double) { return 1.0; },
      [](double) { return 1.0; });
  const Eigen::Vector3d shift(0.1, -0.2, 0.3);
  std::vector<SeparableTerm> terms;
  auto one = [](double) { return 1.0; };
  for (int c = 0; c < 3; ++c)
    terms.push_back({c, [=](double) { return shift[c]; }, one, one});
  state.u = interp_displacement(model, terms);

  const double warp = 2.0;
  IsoVolume iso = crack_isovolume(model, state, 0.0, 0.5, warp, 2);
  CHECK(iso.box_size[0] == 0.5);
  // s = x/4 <= 1/2 selects exactly the x <= 2 half: 4 of 8 sample columns
  CHECK(iso.centers.size() == 4 * 8 * 8);
  REQUIRE(iso.s_values.size() == iso.centers.size());
  REQUIRE(iso.corners.size() == iso.centers.size());

  for (std::size_t m = 0; m < iso.centers.size(); ++m) {
    const Eigen::Vector3d& c = iso.centers[m];
    CHECK(c[0] <= 2.0);
    CHECK(iso.s_values[m] == doctest::Approx(c[0] / 4.0).epsilon(1e-12));
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& corner : iso.corners[m]) {
      mean += corner / 8.0;
      CHECK(((corner - warp * shift - c).cwiseAbs().array() - 0.25)
                .abs()
                .maxCoeff() < 1e-12);
    }
    CHECK((mean - c - warp * shift).cwiseAbs().maxCoeff() < 1e-12);
  }

  // a tighter window is a subset of the wider one
  IsoVolume tight = crack_isovolume(model, state, 0.0, 0.25, warp, 2);
  CHECK(tight.centers.size() == 2 * 8 * 8);
  for (const auto& c : tight.centers) CHECK(c[0] <= 1.0);

  CHECK_THROWS_AS(crack_isovolume(model, state, 0.6, 0.4, warp, 2), Error);
}

TEST_CASE("regression statistics match hand-computed values") {
  // exact affine relation
  std::vector<double> m1 = {10.0, 20.0, 30.0, 40.0};
  std::vector<double> c1 = {21.0, 41.0, 61.0, 81.0};
  RegressionStats st = regression(m1, c1);
  CHECK(st.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(st.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st.r2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(st.rmse < 1e-12);
  CHECK(st.n == 4);

  // frozen oracle, worked out by hand:
  //   slope = 48000/50000, intercept = -250 - slope * -250,
  //   ss_res = 320, syy = 46400, rel errs 10, 5, 10/3, 2.5 percent
  std::vector<double> m2 = {-100.0, -200.0, -300.0, -400.0};
  std::vector<double> c2 = {-110.0, -190.0, -310.0, -390.0};
  st = regression(m2, c2);
  CHECK(st.slope == doctest::Approx(0.96).epsilon(1e-14));
  CHECK(st.intercept == doctest::Approx(-10.0).epsilon(1e-12));
  CHECK(st.r2 == doctest::Approx(1.0 - 320.0 / 46400.0).epsilon(1e-13));
  CHECK(st.rmse == doctest::Approx(std::sqrt(80.0)).epsilon(1e-13));
  CHECK(st.mean_abs_rel_err_pct ==
        doctest::Approx(100.0 * (0.1 + 0.05 + 1.0 / 30.0 + 0.025) / 4.0)
            .epsilon(1e-13));

  // the relative-error average skips sub-threshold measurements
  std::vector<double> m3 = {1.0, -2.0, 100.0, 200.0};
  std::vector<double> c3 = {5.0, -9.0, 110.0, 180.0};
  st = regression(m3, c3);
  CHECK(st.mean_abs_rel_err_pct ==
        doctest::Approx(100.0 * (0.1 + 0.1) / 2.0).epsilon(1e-13));

  std::vector<double> short_m = {1.0, 2.0};
  std::vector<double> short_c = {1.0, 2.0};
  CHECK_THROWS_AS(regression(short_m, short_c), Error);
  std::vector<double> const_m = {5.0, 5.0, 5.0};
  std::vector<double> any_c = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(regression(const_m, any_c), Error);
  std::vector<double> mism = {1.0, 2.0, 3.0};
  std::vector<double> mism_c = {1.0, 2.0};
  CHECK_THROWS_AS(regression(mism, mism_c), Error);
}
