#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rtagg/metrics.hpp"

using namespace rtagg;

namespace {

std::vector<RTreeEntry> mesh_entries(const BackgroundMesh& mesh) {
  std::vector<RTreeEntry> entries;
  for (int c = 0; c < mesh.n_cells(); ++c) entries.push_back({mesh.cell_bbox(c), c});
  return entries;
}

// Two quads: a 2x1 rectangle and a unit square next to it.
BackgroundMesh two_rectangles() {
  BackgroundMesh mesh;
  mesh.dim = 2;
  mesh.vertices = {{0, 0, 0}, {2, 0, 0}, {3, 0, 0}, {0, 1, 0}, {2, 1, 0}, {3, 1, 0}};
  Cell a;
  a.kind = CellKind::Quad;
  a.v = {0, 1, 4, 3, 0, 0, 0, 0};
  Cell b;
  b.kind = CellKind::Quad;
  b.v = {1, 2, 5, 4, 0, 0, 0, 0};
  mesh.cells = {a, b};
  mesh.finalize();
  return mesh;
}

Partition identity(int n) {
  Partition p;
  p.n_cells = n;
  p.n_agglomerates = n;
  p.assignment.resize(n);
  for (int i = 0; i < n; ++i) p.assignment[i] = i;
  return p;
}

}  // namespace

TEST_CASE("uniformity factor compares diameters against the mesh maximum") {
  BackgroundMesh mesh = two_rectangles();  // must outlive poly, which points at it
  PolytopalMesh poly = build_polytopal_mesh(mesh, identity(2));
  CHECK(poly.h_max == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(uniformity_factor(poly, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(uniformity_factor(poly, 1) ==
        doctest::Approx(std::sqrt(2.0) / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("inradius and circle ratio of rectangles are exact at the center") {
  BackgroundMesh mesh = two_rectangles();
  PolytopalMesh poly = build_polytopal_mesh(mesh, identity(2));
  CHECK(inradius(poly, 0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(inradius(poly, 1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(circle_ratio(poly, 0) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-6));
  CHECK(circle_ratio(poly, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("box ratio and inradius of an L-shaped agglomerate") {
  BackgroundMesh mesh = generate_structured_quad(2, Aabb::from_corners({0, 0, 0}, {2, 2, 0}));
  Partition p;
  p.n_cells = 4;
  p.n_agglomerates = 2;
  p.assignment = {0, 0, 0, 1};  // three unit squares form an L, the fourth stands alone
  PolytopalMesh poly = build_polytopal_mesh(mesh, p);
  CHECK(box_ratio(poly, 0) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(box_ratio(poly, 1) == doctest::Approx(1.0).epsilon(1e-13));
  // largest disc inside the L: radius 2 - sqrt(2), centered on the diagonal
  CHECK(inradius(poly, 0, 1e-4) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("overlap factor accounts for double-covered box area") {
  BackgroundMesh mesh = generate_structured_quad(4);
  Partition p;
  p.n_cells = 16;
  p.n_agglomerates = 2;
  p.assignment.assign(16, 1);
  for (int id : {0, 1, 2, 3, 4, 5, 8, 9}) p.assignment[id] = 0;  // interlocking S/Z halves
  PolytopalMesh poly = build_polytopal_mesh(mesh, p);
  CHECK(poly.agglomerates[0].mbr.measure(2) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(poly.agglomerates[1].mbr.measure(2) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(overlap_factor(poly) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(poly.agglomerates[0].connected);
  CHECK(poly.agglomerates[1].connected);
}

TEST_CASE("disconnected agglomerates are measured on the largest component") {
  BackgroundMesh mesh = generate_structured_quad(2);
  Partition p;
  p.n_cells = 4;
  p.n_agglomerates = 2;
  p.assignment = {0, 1, 1, 0};
  PolytopalMesh poly = build_polytopal_mesh(mesh, p);
  // components are single half-size cells; tie resolved to the lower cell id
  CHECK(inradius(poly, 0) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(circle_ratio(poly, 0) == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("report on the 16-block agglomeration of a 32x32 grid") {
  BackgroundMesh mesh = generate_structured_quad(32);
  RTree tree = RTree::build_str(2, 2, 4, mesh_entries(mesh));
  PolytopalMesh poly =
      build_polytopal_mesh(mesh, compute_agglomerates(tree, 2, mesh.n_cells()));
  MetricsReport r = metrics_report(poly);
  REQUIRE(r.per_agglomerate.size() == 16);
  CHECK(r.uf_min == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.uf_max == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.br_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.br_max == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.cr_avg == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
  CHECK(r.of == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("metrics csv layout") {
  BackgroundMesh mesh = two_rectangles();
  PolytopalMesh poly = build_polytopal_mesh(mesh, identity(2));
  MetricsReport r = metrics_report(poly);
  const std::string path = "tmp_metrics.csv";
  write_metrics_csv(r, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "agglomerate,uf,cr,br");
  int rows = 0;
  bool saw_of = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("of,", 0) == 0) saw_of = true;
  }
  CHECK(rows == 2 + 4);  // per-agglomerate rows + min/max/avg/of
  CHECK(saw_of);
  std::remove(path.c_str());
}
