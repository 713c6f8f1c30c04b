#pragma once

#include <array>
#include <ostream>
#include <vector>

#include <Eigen/Core>

namespace goalfem {

/// Partition of an interval [a,b]. Element e spans nodes[e]..nodes[e+1].
struct Mesh1D {
  std::vector<double> nodes;  // strictly increasing

  int element_count() const { return static_cast<int>(nodes.size()) - 1; }
  double a() const { return nodes.front(); }
  double b() const { return nodes.back(); }
  double element_length(int e) const { return nodes[e + 1] - nodes[e]; }

  /// Element whose closed span contains x (clamped to the domain).
  int locate(double x) const;
};

Mesh1D build_interval_mesh(int n, double a, double b);

enum class SquareSplit { diagonal, crisscross };

/// Triangulation of the unit square. All triangles are counterclockwise.
struct Mesh2D {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_vertices;  // sorted; x or y in {0,1}

  int triangle_count() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double total_area() const;
};

/// n x n grid of cells. diagonal: 2 triangles per cell; crisscross: the cell
/// center is added and each cell becomes 4 triangles.
Mesh2D build_square_mesh(int n, SquareSplit split);

/// Rectangular nx x ny grid over the unit square; used for coarse trial
/// meshes whose interior-vertex count must hit a prescribed value.
Mesh2D build_rect_mesh(int nx, int ny, SquareSplit split);

// Debug dumps: one vertex per line, then one element per line of indices.
void write_mesh_csv(const Mesh1D& mesh, std::ostream& out);
void write_mesh_csv(const Mesh2D& mesh, std::ostream& out);

}  // namespace goalfem
