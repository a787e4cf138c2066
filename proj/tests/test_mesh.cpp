#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rtagg/mesh.hpp"

using namespace rtagg;

TEST_CASE("structured quad grid: counts, measures, boundary") {
  const int n = 4;
  BackgroundMesh mesh = generate_structured_quad(n);
  CHECK(mesh.dim == 2);
  CHECK(mesh.n_cells() == n * n);
  CHECK(mesh.n_vertices() == (n + 1) * (n + 1));
  CHECK(mesh.n_boundary_faces() == 4 * n);
  // interior + boundary edges of an n x n grid
  CHECK(int(mesh.faces.size()) == 2 * n * (n + 1));
  const double cell_area = 1.0 / (n * n);
  for (int c = 0; c < mesh.n_cells(); ++c)
    CHECK(mesh.cell_measure(c) == doctest::Approx(cell_area).epsilon(1e-14));
  CHECK(mesh.total_measure() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("structured hex grid: counts, measures, boundary") {
  const int n = 4;
  BackgroundMesh mesh = generate_structured_hex(n);
  CHECK(mesh.dim == 3);
  CHECK(mesh.n_cells() == n * n * n);
  CHECK(mesh.n_vertices() == (n + 1) * (n + 1) * (n + 1));
  CHECK(mesh.n_boundary_faces() == 6 * n * n);
  for (int c = 0; c < mesh.n_cells(); ++c)
    CHECK(mesh.cell_measure(c) == doctest::Approx(1.0 / (n * n * n)).epsilon(1e-14));
  CHECK(mesh.total_measure() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dual adjacency matches hand enumeration") {
  BackgroundMesh mesh = generate_structured_quad(3);
  DualGraph g = dual_adjacency(mesh);
  // center cell of a 3x3 grid touches exactly the four edge-midpoint cells
  CHECK(g.neighbors[4] == std::vector<int>{1, 3, 5, 7});
  CHECK(g.neighbors[0] == std::vector<int>{1, 3});
  // count oracle: 2*n*(n-1) interior interfaces for an n x n grid
  BackgroundMesh mesh8 = generate_structured_quad(8);
  CHECK(dual_adjacency(mesh8).n_edges() == 2 * 8 * 7);
}

TEST_CASE("boundary face normals point outward, interior normals are axis-aligned") {
  BackgroundMesh mesh = generate_structured_quad(2);
  const Vec domain_center{0.5, 0.5, 0};
  for (int f = 0; f < int(mesh.faces.size()); ++f) {
    const Face& face = mesh.faces[f];
    Vec mid = 0.5 * (mesh.vertices[face.v[0]] + mesh.vertices[face.v[1]]);
    Vec nrm = mesh.face_normal(f);
    CHECK(norm(nrm) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mesh.face_measure(f) == doctest::Approx(0.5).epsilon(1e-14));
    if (face.boundary()) {
      CHECK(dot(nrm, mid - domain_center) > 0.0);
    } else {
      CHECK(std::abs(nrm[0]) + std::abs(nrm[1]) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(face.owner < face.neighbor);  // owner is the lower cell id
    }
  }
}

TEST_CASE("hex face normals point out of the owner") {
  BackgroundMesh mesh = generate_structured_hex(2);
  for (int f = 0; f < int(mesh.faces.size()); ++f) {
    const Face& face = mesh.faces[f];
    Vec mid{0, 0, 0};
    for (int i = 0; i < face.n_vertices; ++i) mid = mid + mesh.vertices[face.v[i]];
    mid = (1.0 / face.n_vertices) * mid;
    Vec out = mid - mesh.cell_centroid(face.owner);
    CHECK(dot(mesh.face_normal(f), out) > 0.0);
  }
}

TEST_CASE("perturbed quad grid is deterministic, boundary-fixed, convex") {
  const int n = 8;
  BackgroundMesh a = generate_perturbed_quad(n, 0.3, 42);
  BackgroundMesh b = generate_perturbed_quad(n, 0.3, 42);
  BackgroundMesh c = generate_perturbed_quad(n, 0.3, 43);
  CHECK(a.vertices == b.vertices);
  CHECK(a.vertices != c.vertices);

  int moved = 0;
  for (int iy = 0; iy <= n; ++iy)
    for (int ix = 0; ix <= n; ++ix) {
      const Vec& v = a.vertices[iy * (n + 1) + ix];
      if (ix == 0 || ix == n || iy == 0 || iy == n) {
        CHECK(v[0] == doctest::Approx(double(ix) / n).epsilon(1e-15));
        CHECK(v[1] == doctest::Approx(double(iy) / n).epsilon(1e-15));
      } else if (v[0] != double(ix) / n || v[1] != double(iy) / n) {
        ++moved;
      }
    }
  CHECK(moved == (n - 1) * (n - 1));

  // convexity oracle: every corner turn of every quad is a left turn
  for (int cell = 0; cell < a.n_cells(); ++cell) {
    CHECK(a.cell_measure(cell) > 0.0);
    for (int i = 0; i < 4; ++i) {
      const Vec& p = a.vertices[a.cells[cell].v[i]];
      const Vec& q = a.vertices[a.cells[cell].v[(i + 1) % 4]];
      const Vec& r = a.vertices[a.cells[cell].v[(i + 2) % 4]];
      CHECK((q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]) > 0.0);
    }
  }

  CHECK(generate_perturbed_quad(n, 0.0, 7).vertices == generate_structured_quad(n).vertices);
  CHECK_THROWS_AS(generate_perturbed_quad(n, 0.5, 7), std::invalid_argument);
}

TEST_CASE("cell_contains agrees with geometry") {
  BackgroundMesh mesh = generate_perturbed_quad(4, 0.25, 11);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CHECK(mesh.cell_contains(c, mesh.cell_centroid(c)));
    CHECK_FALSE(mesh.cell_contains(c, Vec{5.0, 5.0, 0}));
  }
  BackgroundMesh hexes = generate_structured_hex(2);
  for (int c = 0; c < hexes.n_cells(); ++c)
    CHECK(hexes.cell_contains(c, hexes.cell_centroid(c)));
  CHECK_FALSE(hexes.cell_contains(0, Vec{0.9, 0.9, 0.9}));
}

TEST_CASE("msh round trip preserves geometry, connectivity, and materials") {
  BackgroundMesh mesh = generate_perturbed_quad(5, 0.2, 3);
  mesh.material.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    mesh.material[c] = mesh.cell_centroid(c)[0] < 0.5 ? 1 : 2;
  mesh.finalize();

  const std::string path = "tmp_roundtrip.msh";
  write_msh(mesh, path);
  BackgroundMesh back = read_msh(path);
  REQUIRE(back.n_cells() == mesh.n_cells());
  REQUIRE(back.n_vertices() == mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    for (int k = 0; k < 3; ++k)
      CHECK(back.vertices[v][k] == doctest::Approx(mesh.vertices[v][k]).epsilon(1e-12));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CHECK(back.cells[c].kind == mesh.cells[c].kind);
    for (int k = 0; k < mesh.cells[c].nv(); ++k) CHECK(back.cells[c].v[k] == mesh.cells[c].v[k]);
  }
  CHECK(back.material == mesh.material);
  std::remove(path.c_str());

  BackgroundMesh hexes = generate_structured_hex(3);
  write_msh(hexes, path);
  BackgroundMesh hexback = read_msh(path);
  CHECK(hexback.dim == 3);
  CHECK(hexback.n_cells() == 27);
  CHECK_FALSE(hexback.has_material());
  CHECK(hexback.total_measure() == doctest::Approx(1.0).epsilon(1e-14));
  std::remove(path.c_str());
}

TEST_CASE("msh reader rejects malformed input with location info") {
  const std::string path = "tmp_bad.msh";
  {
    std::ofstream out(path);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n"
           "4 0 1 0\n$EndNodes\n$Elements\n1\n1 3 0 1 2 3 999\n$EndElements\n";
  }
  CHECK_THROWS_WITH_AS(read_msh(path), doctest::Contains("unknown node 999"),
                       std::runtime_error);
  {
    std::ofstream out(path);
    out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
  }
  CHECK_THROWS_WITH_AS(read_msh(path), doctest::Contains("unsupported format"),
                       std::runtime_error);
  {
    std::ofstream out(path);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n2\n1 0 0 0\n";
  }
  CHECK_THROWS_AS(read_msh(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("vtk writer emits parseable cell data") {
  BackgroundMesh mesh = generate_structured_quad(2);
  const std::string path = "tmp_mesh.vtk";
  write_vtk(mesh, path, {{"part", {0, 0, 1, 1}}});

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string tok;
  std::vector<double> values;
  bool in_points = false, in_cells = false;
  int n_points = -1, n_cells = -1;
  while (in >> tok) {
    if (tok == "POINTS") in >> n_points >> tok, in_points = true;
    if (tok == "CELLS") in >> n_cells;
    if (tok == "LOOKUP_TABLE") {
      in >> tok;  // "default"
      double v;
      while (in >> v) values.push_back(v);
    }
  }
  CHECK(in_points);
  CHECK(n_points == 9);
  CHECK(n_cells == 4);
  CHECK(values == std::vector<double>{0, 0, 1, 1});
  CHECK(std::set<double>(values.begin(), values.end()).size() == 2);
  std::remove(path.c_str());
  (void)in_cells;
}
