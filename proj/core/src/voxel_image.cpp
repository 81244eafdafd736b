#include "crackcell/voxel_image.hpp"

#include <cmath>

#include "crackcell/error.hpp"

namespace crackcell {

ImageKind parse_image_kind(const std::string& name) {
  if (name == "hu") return ImageKind::Hu;
  if (name == "rho_k2hpo4") return ImageKind::RhoK2hpo4;
  if (name == "rho_ash") return ImageKind::RhoAsh;
  throw Error("unknown image kind '" + name +
              "' (expected hu|rho_k2hpo4|rho_ash)");
}

std::string image_kind_name(ImageKind kind) {
  switch (kind) {
    case ImageKind::Hu: return "hu";
    case ImageKind::RhoK2hpo4: return "rho_k2hpo4";
    case ImageKind::RhoAsh: return "rho_ash";
  }
  return "rho_ash";
}

bool VoxelImage::voxel_of(const Eigen::Vector3d& x, Eigen::Vector3i& idx) const {
  for (int a = 0; a < 3; ++a) {
    const double f = (x[a] - origin[a]) / spacing[a];
    if (f < 0.0 || f > static_cast<double>(dims[a])) return false;
    double fl = std::floor(f);
    // exact face hit: lower voxel owns the face; the extent max maps inward
    if (fl == f && f > 0.0) fl -= 1.0;
    if (fl >= static_cast<double>(dims[a])) fl = dims[a] - 1;
    idx[a] = static_cast<int>(fl);
  }
  return true;
}

bool VoxelImage::inside(std::int64_t voxel) const {
  if (!mask.empty()) return mask[static_cast<std::size_t>(voxel)] != 0;
  if (inside_threshold)
    return values[static_cast<std::size_t>(voxel)] >= *inside_threshold;
  throw Error("voxel image has neither mask nor inside_threshold");
}

std::int64_t VoxelImage::count_inside() const {
  std::int64_t n = 0;
  for (std::int64_t v = 0; v < num_voxels(); ++v)
    if (inside(v)) ++n;
  return n;
}

void VoxelImage::validate() const {
  if (dims.minCoeff() <= 0)
    throw Error("voxel image: dims must be positive");
  if (spacing.minCoeff() <= 0.0)
    throw Error("voxel image: spacing must be positive");
  const auto n = static_cast<std::size_t>(num_voxels());
  if (values.size() != n)
    throw Error("voxel image: value count " + std::to_string(values.size()) +
                " does not match dims product " + std::to_string(n));
  if (!mask.empty()) {
    if (mask.size() != n)
      throw Error("voxel image: mask count " + std::to_string(mask.size()) +
                  " does not match dims product " + std::to_string(n));
    for (auto m : mask)
      if (m > 1) throw Error("voxel image: mask values must be 0 or 1");
  }
  if (!has_inside_rule())
    throw Error("voxel image: needs a mask or an inside_threshold");
  for (double v : values)
    if (!std::isfinite(v))
      throw Error("voxel image: non-finite value");
}

}  // namespace crackcell
