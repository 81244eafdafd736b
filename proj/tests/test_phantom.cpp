#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "crackcell/error.hpp"
#include "crackcell/phantom.hpp"
#include "test_helpers.hpp"

using namespace crackcell;
using crackcell::testing::thrown_message;

namespace {

std::size_t vox(const VoxelImage& img, int i, int j, int k) {
  return static_cast<std::size_t>(img.linear_index(i, j, k));
}

std::int64_t count_inside_mask(const VoxelImage& img) {
  std::int64_t n = 0;
  for (auto m : img.mask) n += m;
  return n;
}

}  // namespace

TEST_CASE("uniform bar fills the whole box at the base density") {
  PhantomSpec spec;
  spec.kind = "uniform-bar";
  spec.dims = {5, 6, 7};
  spec.spacing = 0.8;
  spec.rho = 0.55;
  const VoxelImage img = make_phantom(spec);
  CHECK(img.dims == spec.dims);
  CHECK(img.spacing == Eigen::Vector3d::Constant(0.8));
  CHECK(img.kind == ImageKind::RhoAsh);
  CHECK(count_inside_mask(img) == img.num_voxels());
  for (double v : img.values) CHECK(v == 0.55);
}

TEST_CASE("unknown kinds and degenerate specs are rejected") {
  PhantomSpec spec;
  spec.kind = "banana";
  const std::string msg = thrown_message([&] { make_phantom(spec); });
  CHECK(msg.find("banana") != std::string::npos);
  for (const auto& kind : phantom_kinds())
    CHECK(msg.find(kind) != std::string::npos);

  spec.kind = "uniform-bar";
  spec.dims = {3, 8, 8};
  CHECK_THROWS_AS(make_phantom(spec), Error);
  spec.dims = {8, 8, 8};
  spec.spacing = 0.0;
  CHECK_THROWS_AS(make_phantom(spec), Error);
  spec.spacing = 1.0;
  spec.rho = -1.0;
  CHECK_THROWS_AS(make_phantom(spec), Error);
}

TEST_CASE("notched plate carves the slit and reinforces the grip caps") {
  PhantomSpec spec;
  spec.kind = "notched-plate";
  spec.dims = {32, 2, 16};
  const VoxelImage img = make_phantom(spec);

  const int slit_k = 8, slit_depth = 20, cap = 2;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 32; ++i) {
      const bool in_slit = i < slit_depth;
      CHECK(img.mask[vox(img, i, j, slit_k)] == (in_slit ? 0 : 1));
    }
  // everything else is solid
  std::int64_t expected = img.num_voxels() - 2 * slit_depth;
  CHECK(count_inside_mask(img) == expected);

  CHECK(img.values[vox(img, 5, 0, 0)] == doctest::Approx(0.9));       // cap
  CHECK(img.values[vox(img, 5, 0, cap)] == doctest::Approx(0.6));     // bulk
  CHECK(img.values[vox(img, 5, 0, 15)] == doctest::Approx(0.9));      // cap
  CHECK(img.values[vox(img, 5, 0, 13)] == doctest::Approx(0.6));      // bulk
}

TEST_CASE("sphere phantom volume matches the analytic ball") {
  PhantomSpec spec;
  spec.kind = "sphere";
  spec.dims = {32, 32, 32};
  spec.spacing = 0.5;
  const VoxelImage img = make_phantom(spec);

  const double radius = 0.35 * 16.0;  // mm: 0.35 * min box extent
  const double analytic = 4.0 / 3.0 * M_PI * radius * radius * radius;
  const double voxel_vol = 0.5 * 0.5 * 0.5;
  const double counted = voxel_vol * static_cast<double>(count_inside_mask(img));
  CHECK(counted == doctest::Approx(analytic).epsilon(0.01));

  // masked-out voxels carry zero density
  CHECK(img.values[vox(img, 0, 0, 0)] == 0.0);
  CHECK(img.mask[vox(img, 0, 0, 0)] == 0);
  CHECK(img.values[vox(img, 16, 16, 16)] == 0.6);
}

TEST_CASE("bone surrogate layers shell, core, neck band and grips") {
  PhantomSpec spec;
  spec.kind = "layered-bone-surrogate";
  spec.dims = {16, 16, 48};
  const VoxelImage img = make_phantom(spec);

  const double r0 = 0.45 * 16.0;          // outer radius 7.2
  const double shell_t = 1.5;
  const int grip = 4;

  // grip slabs: full radius, uniformly dense
  CHECK(img.values[vox(img, 8, 8, 0)] == doctest::Approx(0.9));
  CHECK(img.values[vox(img, 8, 8, 47)] == doctest::Approx(0.9));
  CHECK(img.mask[vox(img, 8 + 6, 8, 0)] == 1);  // r = 6.5 < 7.2

  // shaft outside the band: stiff shell over a soft core
  const int shaft_k = grip + 4;  // z = 8.5, far from the band
  CHECK(img.values[vox(img, 8, 8, shaft_k)] == doctest::Approx(0.36));
  CHECK(img.values[vox(img, 14, 8, shaft_k)] == doctest::Approx(0.9));
  CHECK(img.mask[vox(img, 15, 8, shaft_k)] == 0);  // r = 7.5 > 7.2

  // neck: narrowed and weakened by exactly the documented factor
  const int neck_k = 23;  // z = 23.5, almost mid-band
  CHECK(img.values[vox(img, 8, 8, neck_k)] == doctest::Approx(0.75 * 0.36));
  CHECK(img.mask[vox(img, 14, 8, neck_k)] == 0);  // narrowed below r = 6.5
  // a voxel that is core in the straight shaft turns shell in the neck
  const double z = 23.5, zc = 24.0, band_w = 0.15 * 48.0;
  const double t = (z - zc) / band_w;
  const double q = 1.0 - t * t;
  const double neck_radius = r0 * (1.0 - 0.2 * q * q);
  const double r_13 = std::hypot(13.5 - 8.0, 0.5);
  REQUIRE(r_13 < neck_radius);
  REQUIRE(r_13 > neck_radius - shell_t);
  CHECK(img.values[vox(img, 13, 8, neck_k)] == doctest::Approx(0.75 * 0.9));
}

TEST_CASE("density jitter is seed-deterministic and mask-confined") {
  PhantomSpec spec;
  spec.kind = "sphere";
  spec.dims = {16, 16, 16};
  spec.noise = 0.05;
  spec.seed = 7;

  const VoxelImage a = make_phantom(spec);
  const VoxelImage b = make_phantom(spec);
  CHECK(a.values == b.values);

  spec.seed = 8;
  const VoxelImage c = make_phantom(spec);
  CHECK(a.values != c.values);

  spec.noise = 0.0;
  const VoxelImage clean = make_phantom(spec);
  bool any_jitter = false;
  for (std::size_t v = 0; v < a.values.size(); ++v) {
    if (!a.mask[v]) {
      CHECK(a.values[v] == clean.values[v]);  // untouched outside the mask
    } else {
      CHECK(a.values[v] >= 0.95 * clean.values[v] - 1e-12);
      CHECK(a.values[v] <= 1.05 * clean.values[v] + 1e-12);
      any_jitter = any_jitter || a.values[v] != clean.values[v];
    }
  }
  CHECK(any_jitter);
}
