#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crackcell/model.hpp"
#include "crackcell/postproc.hpp"
#include "crackcell/trimesh.hpp"
#include "crackcell/voxel_image.hpp"

namespace crackcell {

// Voxel images travel as a raw little-endian scalar array plus a JSON
// sidecar holding the metadata (dims, spacing, origin, kind, scalar type,
// raw/mask paths, optional inside threshold and HU calibration line). Paths
// inside the sidecar are resolved relative to the sidecar file.
struct LoadedImage {
  VoxelImage image;
  // calibration line carried by the file, if any; callers fold these into
  // MaterialLaws unless the run config overrides them
  std::optional<double> hu_slope;
  std::optional<double> hu_intercept;
};

LoadedImage read_voxel_image(const std::string& sidecar_path);

// scalar_type in {"float32", "float64", "int16"}. Writes the sidecar at
// sidecar_path and the raw array(s) next to it (basename + ".raw" /
// ".mask.raw"). int16 values are rounded to nearest and must fit the type.
void write_voxel_image(const VoxelImage& image, const std::string& sidecar_path,
                       const std::string& scalar_type = "float32",
                       std::optional<double> hu_slope = {},
                       std::optional<double> hu_intercept = {});

// STL triangle soup, ASCII or binary (auto-detected on read).
TriMesh read_stl(const std::string& path);
void write_stl(const TriMesh& mesh, const std::string& path,
               bool binary = true);

// Force-strain history CSV. Doubles are printed with %.17g so a written file
// parses back to bitwise-identical records.
void write_force_strain_csv(std::span<const ForceStrainRecord> records,
                            const std::string& path);
std::vector<ForceStrainRecord> read_force_strain_csv(const std::string& path);

// Measured-data input: values as "id,value" rows, coordinates as
// "id,x,y,z" rows. Headers required; ids join the two files.
struct MeasuredPoint {
  std::string id;
  double value = 0.0;           // [microstrain]
  Eigen::Vector3d position{0.0, 0.0, 0.0};
};

std::vector<MeasuredPoint> read_measured_data(const std::string& values_csv,
                                              const std::string& points_csv);

// Cell-data snapshot of a run state on the embedded grid as a VTK XML image
// file (.vti): phase field, history maximum, modulus, displacement, minimum
// principal strain, extreme principal degraded stresses, and an activity
// mask. Inactive cells carry NaN in the field arrays.
void write_vti(const Model& model, const FieldState& state,
               const std::string& path);

// Iso-volume boxes as VTK hexahedra (.vtu) with the sampled phase value as
// cell data; corners are pre-warped by the extraction.
void write_vtu(const IsoVolume& iso, const std::string& path);

// Checkpoint container: magic "CCKP", a JSON header line, then the DOF
// vectors, history field, and force-strain records as little-endian doubles.
// Reading back and re-emitting the CSV reproduces it byte for byte.
struct Checkpoint {
  FieldState state;
  std::vector<ForceStrainRecord> records;
  std::string termination;
  std::uint64_t config_hash = 0;
};

void write_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace crackcell
