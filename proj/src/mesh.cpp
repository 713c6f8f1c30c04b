#include "goalfem/mesh.hpp"

#include <algorithm>
#include <string>

#include "goalfem/csv.hpp"
#include "goalfem/errors.hpp"

namespace goalfem {

int Mesh1D::locate(double x) const {
  if (x <= nodes.front()) return 0;
  if (x >= nodes.back()) return element_count() - 1;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  return static_cast<int>(it - nodes.begin()) - 1;
}

Mesh1D build_interval_mesh(int n, double a, double b) {
  if (n < 1) throw ConfigError("build_interval_mesh: need at least one element");
  if (!(a < b)) throw ConfigError("build_interval_mesh: empty interval, a >= b");
  Mesh1D mesh;
  mesh.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    mesh.nodes[i] = a + (b - a) * (static_cast<double>(i) / n);
  }
  mesh.nodes.front() = a;
  mesh.nodes.back() = b;
  return mesh;
}

double Mesh2D::triangle_area(int t) const {
  const auto& tri = triangles[t];
  Eigen::Vector2d e1 = vertices[tri[1]] - vertices[tri[0]];
  Eigen::Vector2d e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double Mesh2D::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < triangle_count(); ++t) sum += triangle_area(t);
  return sum;
}

Mesh2D build_rect_mesh(int nx, int ny, SquareSplit split) {
  if (nx < 1 || ny < 1) throw ConfigError("build_rect_mesh: need at least one cell per direction");
  Mesh2D mesh;
  auto grid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices.emplace_back(static_cast<double>(i) / nx, static_cast<double>(j) / ny);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int v00 = grid(i, j), v10 = grid(i + 1, j);
      int v11 = grid(i + 1, j + 1), v01 = grid(i, j + 1);
      if (split == SquareSplit::diagonal) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        int c = static_cast<int>(mesh.vertices.size());
        mesh.vertices.emplace_back((i + 0.5) / nx, (j + 0.5) / ny);
        mesh.triangles.push_back({v00, v10, c});
        mesh.triangles.push_back({v10, v11, c});
        mesh.triangles.push_back({v11, v01, c});
        mesh.triangles.push_back({v01, v00, c});
      }
    }
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (i == 0 || i == nx || j == 0 || j == ny) mesh.boundary_vertices.push_back(grid(i, j));
    }
  }
  std::sort(mesh.boundary_vertices.begin(), mesh.boundary_vertices.end());
  return mesh;
}

Mesh2D build_square_mesh(int n, SquareSplit split) { return build_rect_mesh(n, n, split); }

void write_mesh_csv(const Mesh1D& mesh, std::ostream& out) {
  for (double x : mesh.nodes) out << format_g17(x) << "\r\n";
  for (int e = 0; e < mesh.element_count(); ++e) out << e << ',' << e + 1 << "\r\n";
}

void write_mesh_csv(const Mesh2D& mesh, std::ostream& out) {
  for (const auto& v : mesh.vertices) {
    out << format_g17(v.x()) << ',' << format_g17(v.y()) << "\r\n";
  }
  for (const auto& t : mesh.triangles) out << t[0] << ',' << t[1] << ',' << t[2] << "\r\n";
}

}  // namespace goalfem
