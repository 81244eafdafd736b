#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "crackcell/assembly.hpp"
#include "crackcell/error.hpp"
#include "crackcell/io.hpp"
#include "crackcell/material.hpp"
#include "crackcell/postproc.hpp"

namespace crackcell {

namespace {

class XmlWriter {
 public:
  explicit XmlWriter(const std::string& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot open '" + path + "' for writing");
    path_ = path;
  }
  ~XmlWriter() = default;

  std::ofstream& raw() { return out_; }

  void line(const std::string& text) { out_ << text << "\n"; }

  template <typename Fn>
  void data_array(const std::string& type, const std::string& name,
                  int components, std::int64_t n, const Fn& value) {
    out_ << "        <DataArray type=\"" << type << "\" Name=\"" << name
         << "\"";
    if (components != 1)
      out_ << " NumberOfComponents=\"" << components << "\"";
    out_ << " format=\"ascii\">\n";
    char buf[32];
    for (std::int64_t i = 0; i < n; ++i) {
      out_ << "         ";
      for (int c = 0; c < components; ++c) {
        std::snprintf(buf, sizeof(buf), " %.9g", value(i, c));
        out_ << buf;
      }
      out_ << "\n";
    }
    out_ << "        </DataArray>\n";
  }

  void check() {
    if (!out_) throw Error("short write on '" + path_ + "'");
  }

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace

void write_vti(const Model& model, const FieldState& state,
               const std::string& path) {
  const EmbeddedGrid& g = model.grid;
  const std::int64_t n = g.num_cells_total();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // per-cell samples at cell centers; inactive cells carry NaN
  std::vector<double> s_c(n, nan), hmax(n, nan), e_c(n, nan), eps3(n, nan),
      sig1(n, nan), sig3(n, nan);
  std::vector<double> u_c(3 * n, nan);
  std::vector<std::uint8_t> active(n, 0), cut(n, 0);

  Eigen::Vector3d pv;
  Eigen::Matrix3d pd;
  for (std::int64_t ac = 0; ac < g.n_active(); ++ac) {
    const std::int64_t id = g.active_cells[ac];
    const Eigen::Vector3i cc = g.cell_coords(id);
    const Eigen::Vector3d center =
        g.cell_min(cc) + 0.5 * g.h * Eigen::Vector3d::Ones();
    active[id] = 1;
    cut[id] = g.cut[ac];

    s_c[id] = scalar_at(model, state.s, center);
    const Eigen::Vector3d u = displacement_at(model, state.u, center);
    for (int a = 0; a < 3; ++a) u_c[3 * id + a] = u[a];

    double hm = 0.0;
    for (std::int64_t q = model.quad.cell_offset[ac];
         q < model.quad.cell_offset[ac + 1]; ++q)
      hm = std::max(hm, state.H[q]);
    hmax[id] = hm;

    // physical-point average modulus; fully fictitious cells fall back to
    // the plain average (all points carry the air floor anyway)
    double esum = 0.0, ecount = 0.0, esum_all = 0.0;
    for (std::int64_t q = model.quad.cell_offset[ac];
         q < model.quad.cell_offset[ac + 1]; ++q) {
      esum_all += model.mat.E[q];
      if (model.quad.alpha[q] == 1.0) {
        esum += model.mat.E[q];
        ecount += 1.0;
      }
    }
    e_c[id] = ecount > 0.0
                  ? esum / ecount
                  : esum_all / static_cast<double>(model.quad.cell_points(ac));

    const Eigen::Matrix3d eps = strain_at(model, state.u, center);
    principal_values(eps, pv, pd);
    eps3[id] = pv[2];

    Eigen::Vector3i vox;
    double value = 0.0;
    if (model.image.voxel_of(center, vox))
      value = model.image.values[static_cast<std::size_t>(
          model.image.linear_index(vox[0], vox[1], vox[2]))];
    const MaterialPoint m = make_material_point(
        image_value_to_ash(value, model.image.kind, model.laws), model.laws);
    const Eigen::Matrix3d sig =
        degraded_stress(eps, m, s_c[id], model.laws.eta);
    principal_values(sig, pv, pd);
    sig1[id] = pv[0];
    sig3[id] = pv[2];
  }

  XmlWriter w(path);
  char buf[256];
  w.line("<?xml version=\"1.0\"?>");
  w.line(
      "<VTKFile type=\"ImageData\" version=\"0.1\" "
      "byte_order=\"LittleEndian\">");
  std::snprintf(buf, sizeof(buf),
                "  <ImageData WholeExtent=\"0 %d 0 %d 0 %d\" Origin=\"%.9g "
                "%.9g %.9g\" Spacing=\"%.9g %.9g %.9g\">",
                g.num_cells[0], g.num_cells[1], g.num_cells[2], g.origin[0],
                g.origin[1], g.origin[2], g.h, g.h, g.h);
  w.line(buf);
  std::snprintf(buf, sizeof(buf), "    <Piece Extent=\"0 %d 0 %d 0 %d\">",
                g.num_cells[0], g.num_cells[1], g.num_cells[2]);
  w.line(buf);
  w.line("      <CellData Scalars=\"s\">");
  w.data_array("Float64", "s", 1, n, [&](std::int64_t i, int) { return s_c[i]; });
  w.data_array("Float64", "H_max", 1, n,
               [&](std::int64_t i, int) { return hmax[i]; });
  w.data_array("Float64", "E", 1, n, [&](std::int64_t i, int) { return e_c[i]; });
  w.data_array("Float64", "u", 3, n,
               [&](std::int64_t i, int c) { return u_c[3 * i + c]; });
  w.data_array("Float64", "eps3", 1, n,
               [&](std::int64_t i, int) { return eps3[i]; });
  w.data_array("Float64", "sigma1", 1, n,
               [&](std::int64_t i, int) { return sig1[i]; });
  w.data_array("Float64", "sigma3", 1, n,
               [&](std::int64_t i, int) { return sig3[i]; });
  w.data_array("UInt8", "active", 1, n, [&](std::int64_t i, int) {
    return static_cast<double>(active[i]);
  });
  w.data_array("UInt8", "cut", 1, n, [&](std::int64_t i, int) {
    return static_cast<double>(cut[i]);
  });
  w.line("      </CellData>");
  w.line("    </Piece>");
  w.line("  </ImageData>");
  w.line("</VTKFile>");
  w.check();
}

void write_vtu(const IsoVolume& iso, const std::string& path) {
  const std::int64_t ncells = static_cast<std::int64_t>(iso.corners.size());
  XmlWriter w(path);
  char buf[256];
  w.line("<?xml version=\"1.0\"?>");
  w.line(
      "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" "
      "byte_order=\"LittleEndian\">");
  w.line("  <UnstructuredGrid>");
  std::snprintf(buf, sizeof(buf),
                "    <Piece NumberOfPoints=\"%lld\" NumberOfCells=\"%lld\">",
                static_cast<long long>(8 * ncells),
                static_cast<long long>(ncells));
  w.line(buf);

  // sample-box corners are stored x-fastest; hexahedron connectivity wants
  // the bottom and top faces as counterclockwise rings
  static const int kHexOrder[8] = {0, 1, 3, 2, 4, 5, 7, 6};

  w.line("      <Points>");
  w.data_array("Float64", "Points", 3, 8 * ncells,
               [&](std::int64_t i, int c) {
                 return iso.corners[static_cast<std::size_t>(i / 8)]
                                   [static_cast<std::size_t>(i % 8)][c];
               });
  w.line("      </Points>");
  w.line("      <Cells>");
  w.data_array("Int64", "connectivity", 1, 8 * ncells,
               [&](std::int64_t i, int) {
                 return static_cast<double>(8 * (i / 8) + kHexOrder[i % 8]);
               });
  w.data_array("Int64", "offsets", 1, ncells, [&](std::int64_t i, int) {
    return static_cast<double>(8 * (i + 1));
  });
  w.data_array("UInt8", "types", 1, ncells,
               [&](std::int64_t, int) { return 12.0; });
  w.line("      </Cells>");
  w.line("      <CellData Scalars=\"s\">");
  w.data_array("Float64", "s", 1, ncells,
               [&](std::int64_t i, int) { return iso.s_values[i]; });
  w.line("      </CellData>");
  w.line("    </Piece>");
  w.line("  </UnstructuredGrid>");
  w.line("</VTKFile>");
  w.check();
}

}  // namespace crackcell
