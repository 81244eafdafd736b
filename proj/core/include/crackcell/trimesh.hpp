#pragma once

#include <Eigen/Dense>
#include <vector>

namespace crackcell {

// Triangle soup used for embedded boundary-condition regions.
struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Eigen::Vector3i> triangles;

  double area() const {
    double a = 0.0;
    for (const auto& t : triangles) {
      const Eigen::Vector3d e1 = vertices[t[1]] - vertices[t[0]];
      const Eigen::Vector3d e2 = vertices[t[2]] - vertices[t[0]];
      a += 0.5 * e1.cross(e2).norm();
    }
    return a;
  }
};

}  // namespace crackcell
