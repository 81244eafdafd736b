#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "crackcell/error.hpp"
#include "crackcell/io.hpp"
#include "crackcell/log.hpp"

namespace crackcell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve_near(const std::string& anchor, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p.string();
  return (fs::path(anchor).parent_path() / p).string();
}

std::vector<char> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  in.seekg(0, std::ios::end);
  const auto n = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<char> bytes(static_cast<std::size_t>(n));
  in.read(bytes.data(), n);
  if (!in) throw Error("short read on '" + path + "'");
  return bytes;
}

void write_binary_file(const std::string& path, const void* data,
                       std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw Error("short write on '" + path + "'");
}

// Raw arrays are little-endian on disk; this code targets little-endian
// hosts and converts by memcpy.
template <typename T>
std::vector<double> decode_scalars(const std::vector<char>& bytes,
                                   const std::string& path) {
  if (bytes.size() % sizeof(T) != 0)
    throw Error("raw file '" + path + "' size " +
                std::to_string(bytes.size()) + " is not a multiple of " +
                std::to_string(sizeof(T)));
  const std::size_t n = bytes.size() / sizeof(T);
  std::vector<double> values(n);
  const T* src = reinterpret_cast<const T*>(bytes.data());
  for (std::size_t i = 0; i < n; ++i)
    values[i] = static_cast<double>(src[i]);
  return values;
}

template <typename T>
void encode_scalars(const std::vector<double>& values,
                    const std::string& path) {
  std::vector<T> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if constexpr (std::is_same_v<T, std::int16_t>) {
      const double r = std::nearbyint(values[i]);
      if (r < std::numeric_limits<std::int16_t>::min() ||
          r > std::numeric_limits<std::int16_t>::max())
        throw Error("value " + std::to_string(values[i]) +
                    " does not fit int16 raw encoding");
      out[i] = static_cast<std::int16_t>(r);
    } else {
      out[i] = static_cast<T>(values[i]);
    }
  }
  write_binary_file(path, out.data(), out.size() * sizeof(T));
}

const json& require_key(const json& j, const char* key,
                        const std::string& path) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error("sidecar '" + path + "': missing key '" + key + "'");
  return *it;
}

Eigen::Vector3d triple_d(const json& j, const char* key,
                         const std::string& path) {
  const json& v = require_key(j, key, path);
  if (!v.is_array() || v.size() != 3)
    throw Error("sidecar '" + path + "': '" + key +
                "' must be an array of 3 numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

LoadedImage read_voxel_image(const std::string& sidecar_path) {
  std::ifstream in(sidecar_path);
  if (!in) throw Error("cannot open '" + sidecar_path + "' for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("sidecar '" + sidecar_path + "': " + e.what());
  }

  static const char* known[] = {"raw",    "scalar_type", "dims",
                                "spacing", "origin",     "kind",
                                "mask",   "inside_threshold",
                                "hu_slope", "hu_intercept"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok)
      throw Error("sidecar '" + sidecar_path + "': unknown key '" + it.key() +
                  "'");
  }

  LoadedImage loaded;
  VoxelImage& img = loaded.image;
  const json& dims = require_key(j, "dims", sidecar_path);
  if (!dims.is_array() || dims.size() != 3)
    throw Error("sidecar '" + sidecar_path +
                "': 'dims' must be an array of 3 integers");
  img.dims = {dims[0].get<int>(), dims[1].get<int>(), dims[2].get<int>()};
  img.spacing = triple_d(j, "spacing", sidecar_path);
  img.origin = j.contains("origin") ? triple_d(j, "origin", sidecar_path)
                                    : Eigen::Vector3d::Zero();
  img.kind = parse_image_kind(
      require_key(j, "kind", sidecar_path).get<std::string>());
  if (j.contains("inside_threshold"))
    img.inside_threshold = j["inside_threshold"].get<double>();
  if (j.contains("hu_slope")) loaded.hu_slope = j["hu_slope"].get<double>();
  if (j.contains("hu_intercept"))
    loaded.hu_intercept = j["hu_intercept"].get<double>();

  const std::string raw_path = resolve_near(
      sidecar_path, require_key(j, "raw", sidecar_path).get<std::string>());
  const std::string type =
      require_key(j, "scalar_type", sidecar_path).get<std::string>();
  const std::vector<char> bytes = read_binary_file(raw_path);
  if (type == "float32")
    img.values = decode_scalars<float>(bytes, raw_path);
  else if (type == "float64")
    img.values = decode_scalars<double>(bytes, raw_path);
  else if (type == "int16")
    img.values = decode_scalars<std::int16_t>(bytes, raw_path);
  else
    throw Error("sidecar '" + sidecar_path + "': unknown scalar_type '" +
                type + "' (expected float32|float64|int16)");

  if (j.contains("mask")) {
    const std::string mask_path =
        resolve_near(sidecar_path, j["mask"].get<std::string>());
    const std::vector<char> mb = read_binary_file(mask_path);
    img.mask.assign(reinterpret_cast<const std::uint8_t*>(mb.data()),
                    reinterpret_cast<const std::uint8_t*>(mb.data()) +
                        mb.size());
  }

  img.validate();
  log_info("image: read ", img.dims[0], "x", img.dims[1], "x", img.dims[2],
           " ", image_kind_name(img.kind), " (", type, ") from '",
           sidecar_path, "'");
  return loaded;
}

void write_voxel_image(const VoxelImage& image,
                       const std::string& sidecar_path,
                       const std::string& scalar_type,
                       std::optional<double> hu_slope,
                       std::optional<double> hu_intercept) {
  image.validate();
  fs::path sp(sidecar_path);
  if (sp.parent_path() != fs::path()) fs::create_directories(sp.parent_path());
  const std::string stem = sp.stem().string();
  const std::string raw_name = stem + ".raw";
  const std::string mask_name = stem + ".mask.raw";
  const std::string raw_path = (sp.parent_path() / raw_name).string();

  if (scalar_type == "float32")
    encode_scalars<float>(image.values, raw_path);
  else if (scalar_type == "float64")
    encode_scalars<double>(image.values, raw_path);
  else if (scalar_type == "int16")
    encode_scalars<std::int16_t>(image.values, raw_path);
  else
    throw Error("unknown scalar_type '" + scalar_type +
                "' (expected float32|float64|int16)");

  json j;
  j["raw"] = raw_name;
  j["scalar_type"] = scalar_type;
  j["dims"] = {image.dims[0], image.dims[1], image.dims[2]};
  j["spacing"] = {image.spacing[0], image.spacing[1], image.spacing[2]};
  j["origin"] = {image.origin[0], image.origin[1], image.origin[2]};
  j["kind"] = image_kind_name(image.kind);
  if (!image.mask.empty()) {
    write_binary_file((sp.parent_path() / mask_name).string(),
                      image.mask.data(), image.mask.size());
    j["mask"] = mask_name;
  }
  if (image.inside_threshold) j["inside_threshold"] = *image.inside_threshold;
  if (hu_slope) j["hu_slope"] = *hu_slope;
  if (hu_intercept) j["hu_intercept"] = *hu_intercept;

  std::ofstream out(sidecar_path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + sidecar_path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw Error("short write on '" + sidecar_path + "'");
}

}  // namespace crackcell
