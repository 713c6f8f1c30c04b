#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "goalfem/errors.hpp"
#include "goalfem/mesh.hpp"

using namespace goalfem;

TEST_CASE("interval mesh: uniform nodes") {
  Mesh1D mesh = build_interval_mesh(4, 0.0, 1.0);
  REQUIRE(mesh.nodes.size() == 5);
  CHECK(mesh.nodes[0] == 0.0);
  CHECK(mesh.nodes[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mesh.nodes[2] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mesh.nodes[3] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(mesh.nodes[4] == 1.0);
  CHECK(mesh.element_count() == 4);
}

TEST_CASE("interval mesh: single element and the 128-element partition") {
  Mesh1D one = build_interval_mesh(1, 0.0, 1.0);
  CHECK(one.element_count() == 1);
  CHECK(one.nodes == std::vector<double>{0.0, 1.0});

  Mesh1D fine = build_interval_mesh(128, 0.0, 1.0);
  CHECK(fine.nodes.size() == 129);
  for (int e = 0; e < 128; ++e) {
    CHECK(fine.element_length(e) == doctest::Approx(1.0 / 128).epsilon(1e-14));
  }
}

TEST_CASE("interval mesh: rejects bad input") {
  CHECK_THROWS_AS(build_interval_mesh(0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_interval_mesh(4, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_interval_mesh(4, 2.0, 1.0), ConfigError);
}

TEST_CASE("interval mesh: length sum and locate") {
  for (int n : {1, 3, 7, 128}) {
    Mesh1D mesh = build_interval_mesh(n, 0.0, 1.0);
    double total = 0.0;
    for (int e = 0; e < n; ++e) total += mesh.element_length(e);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  Mesh1D mesh = build_interval_mesh(4, 0.0, 1.0);
  CHECK(mesh.locate(0.1) == 0);
  CHECK(mesh.locate(0.3) == 1);
  CHECK(mesh.locate(0.0) == 0);
  CHECK(mesh.locate(1.0) == 3);
}

TEST_CASE("square mesh: counts per split") {
  Mesh2D diag1 = build_square_mesh(1, SquareSplit::diagonal);
  CHECK(diag1.triangle_count() == 2);
  CHECK(diag1.vertices.size() == 4);

  Mesh2D cc16 = build_square_mesh(16, SquareSplit::crisscross);
  CHECK(cc16.triangle_count() == 1024);

  Mesh2D diag2 = build_square_mesh(2, SquareSplit::diagonal);
  CHECK(diag2.triangle_count() == 8);
  CHECK(diag2.total_area() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(build_square_mesh(0, SquareSplit::diagonal), ConfigError);
}

TEST_CASE("square mesh: positive areas summing to the domain area") {
  for (auto split : {SquareSplit::diagonal, SquareSplit::crisscross}) {
    for (int n : {1, 2, 5, 16}) {
      Mesh2D mesh = build_square_mesh(n, split);
      for (int t = 0; t < mesh.triangle_count(); ++t) CHECK(mesh.triangle_area(t) > 0.0);
      CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  Mesh2D rect = build_rect_mesh(3, 2, SquareSplit::crisscross);
  CHECK(rect.triangle_count() == 24);
  CHECK(rect.total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("square mesh: boundary vertices are exactly the ones on the unit-square edge") {
  for (auto split : {SquareSplit::diagonal, SquareSplit::crisscross}) {
    Mesh2D mesh = build_square_mesh(4, split);
    std::set<int> expected;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      double x = mesh.vertices[v].x(), y = mesh.vertices[v].y();
      if (x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0) expected.insert(static_cast<int>(v));
    }
    std::set<int> actual(mesh.boundary_vertices.begin(), mesh.boundary_vertices.end());
    CHECK(actual == expected);
  }
}

TEST_CASE("square mesh: every interior edge is shared by exactly two triangles") {
  for (auto split : {SquareSplit::diagonal, SquareSplit::crisscross}) {
    Mesh2D mesh = build_square_mesh(3, split);
    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : mesh.triangles) {
      for (int k = 0; k < 3; ++k) {
        count[std::minmax(tri[k], tri[(k + 1) % 3])]++;
      }
    }
    std::set<int> bnd(mesh.boundary_vertices.begin(), mesh.boundary_vertices.end());
    for (const auto& [edge, c] : count) {
      CHECK(c <= 2);
      if (c == 1) {
        // boundary edge: both endpoints on the boundary
        CHECK(bnd.count(edge.first) == 1);
        CHECK(bnd.count(edge.second) == 1);
      }
    }
  }
}

TEST_CASE("mesh csv dump") {
  std::ostringstream out;
  write_mesh_csv(build_interval_mesh(2, 0.0, 1.0), out);
  CHECK(out.str().find("0.5") != std::string::npos);
  std::ostringstream out2;
  write_mesh_csv(build_square_mesh(1, SquareSplit::crisscross), out2);
  CHECK(out2.str().find("0.5,0.5") != std::string::npos);
}
