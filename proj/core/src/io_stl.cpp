#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "crackcell/error.hpp"
#include "crackcell/io.hpp"
#include "crackcell/log.hpp"

namespace crackcell {

namespace {

// Exact-coordinate vertex merge; deterministic by map ordering.
struct VertexPool {
  std::map<std::array<double, 3>, int> index;
  std::vector<Eigen::Vector3d> vertices;

  int add(const Eigen::Vector3d& v) {
    std::array<double, 3> key{v[0], v[1], v[2]};
    auto [it, inserted] =
        index.emplace(key, static_cast<int>(vertices.size()));
    if (inserted) vertices.push_back(v);
    return it->second;
  }
};

TriMesh read_stl_ascii(std::istream& in, const std::string& path) {
  VertexPool pool;
  std::vector<Eigen::Vector3i> tris;
  std::string tok;
  std::vector<Eigen::Vector3d> loop;
  while (in >> tok) {
    if (tok == "vertex") {
      Eigen::Vector3d v;
      if (!(in >> v[0] >> v[1] >> v[2]))
        throw Error("stl '" + path + "': malformed vertex line");
      loop.push_back(v);
    } else if (tok == "endloop") {
      if (loop.size() != 3)
        throw Error("stl '" + path + "': facet with " +
                    std::to_string(loop.size()) + " vertices");
      tris.emplace_back(pool.add(loop[0]), pool.add(loop[1]),
                        pool.add(loop[2]));
      loop.clear();
    }
  }
  TriMesh mesh;
  mesh.vertices = std::move(pool.vertices);
  mesh.triangles = std::move(tris);
  return mesh;
}

TriMesh read_stl_binary(const std::vector<char>& bytes,
                        const std::string& path) {
  if (bytes.size() < 84)
    throw Error("stl '" + path + "': file too short for a binary header");
  std::uint32_t count;
  std::memcpy(&count, bytes.data() + 80, 4);
  if (bytes.size() != 84 + static_cast<std::size_t>(count) * 50)
    throw Error("stl '" + path + "': size does not match triangle count " +
                std::to_string(count));
  VertexPool pool;
  std::vector<Eigen::Vector3i> tris;
  tris.reserve(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    const char* rec = bytes.data() + 84 + static_cast<std::size_t>(t) * 50;
    float f[12];
    std::memcpy(f, rec, sizeof(f));  // normal then 3 vertices; normal ignored
    int idx[3];
    for (int v = 0; v < 3; ++v) {
      Eigen::Vector3d x(f[3 + 3 * v], f[4 + 3 * v], f[5 + 3 * v]);
      idx[v] = pool.add(x);
    }
    tris.emplace_back(idx[0], idx[1], idx[2]);
  }
  TriMesh mesh;
  mesh.vertices = std::move(pool.vertices);
  mesh.triangles = std::move(tris);
  return mesh;
}

}  // namespace

TriMesh read_stl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.empty()) throw Error("stl '" + path + "': empty file");

  // ASCII files start with "solid" and contain "facet" as text; binary
  // files may also start with "solid", so sizes break the tie.
  const std::string head(bytes.data(),
                         bytes.data() + std::min<std::size_t>(bytes.size(), 512));
  const bool says_solid = head.rfind("solid", 0) == 0;
  const bool has_facet = head.find("facet") != std::string::npos;
  TriMesh mesh;
  if (says_solid && has_facet) {
    std::istringstream is(std::string(bytes.begin(), bytes.end()));
    mesh = read_stl_ascii(is, path);
  } else {
    mesh = read_stl_binary(bytes, path);
  }
  if (mesh.triangles.empty())
    throw Error("stl '" + path + "': no triangles");
  log_info("stl: read ", mesh.triangles.size(), " triangles, ",
           mesh.vertices.size(), " vertices from '", path, "'");
  return mesh;
}

void write_stl(const TriMesh& mesh, const std::string& path, bool binary) {
  if (mesh.triangles.empty())
    throw Error("stl '" + path + "': refusing to write an empty mesh");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  auto normal_of = [&](const Eigen::Vector3i& t) {
    const Eigen::Vector3d e1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
    const Eigen::Vector3d e2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
    Eigen::Vector3d n = e1.cross(e2);
    const double len = n.norm();
    return len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero().eval();
  };
  if (binary) {
    char header[80] = {};
    std::snprintf(header, sizeof(header), "crackcell surface (%zu triangles)",
                  mesh.triangles.size());
    out.write(header, 80);
    const std::uint32_t count =
        static_cast<std::uint32_t>(mesh.triangles.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (const auto& t : mesh.triangles) {
      float f[12];
      const Eigen::Vector3d n = normal_of(t);
      for (int a = 0; a < 3; ++a) f[a] = static_cast<float>(n[a]);
      for (int v = 0; v < 3; ++v)
        for (int a = 0; a < 3; ++a)
          f[3 + 3 * v + a] = static_cast<float>(mesh.vertices[t[v]][a]);
      out.write(reinterpret_cast<const char*>(f), sizeof(f));
      const std::uint16_t attr = 0;
      out.write(reinterpret_cast<const char*>(&attr), 2);
    }
  } else {
    out << "solid crackcell\n";
    char line[256];
    for (const auto& t : mesh.triangles) {
      const Eigen::Vector3d n = normal_of(t);
      std::snprintf(line, sizeof(line), "  facet normal %.9g %.9g %.9g\n",
                    n[0], n[1], n[2]);
      out << line << "    outer loop\n";
      for (int v = 0; v < 3; ++v) {
        const Eigen::Vector3d& x = mesh.vertices[t[v]];
        std::snprintf(line, sizeof(line), "      vertex %.17g %.17g %.17g\n",
                      x[0], x[1], x[2]);
        out << line;
      }
      out << "    endloop\n  endfacet\n";
    }
    out << "endsolid crackcell\n";
  }
  if (!out) throw Error("short write on '" + path + "'");
}

}  // namespace crackcell
