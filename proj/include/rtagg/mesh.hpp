#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rtagg/geometry.hpp"

namespace rtagg {

enum class CellKind : std::uint8_t { Tri = 0, Quad = 1, Tet = 2, Hex = 3 };

int cell_num_vertices(CellKind k);
int cell_num_faces(CellKind k);
int cell_dim(CellKind k);

struct Cell {
  CellKind kind;
  std::array<int, 8> v{};  // vertex ids, first cell_num_vertices(kind) entries used

  int nv() const { return cell_num_vertices(kind); }
};

// A codimension-1 facet of the fine mesh: an edge in 2D, a triangle or quad in 3D.
// `owner` is always the incident cell with the lower id; `neighbor` is -1 on the
// domain boundary. Vertices are stored in the owner's outward orientation.
struct Face {
  std::array<int, 4> v{-1, -1, -1, -1};
  int n_vertices = 0;
  int owner = -1;
  int neighbor = -1;

  bool boundary() const { return neighbor < 0; }
};

// Fine ("background") mesh: simplicial and/or tensor cells of one dimension.
// Plain data plus derived facet connectivity; finalize() must be called after the
// vertex/cell arrays are filled (the generators and readers do this).
struct BackgroundMesh {
  int dim = 2;
  std::vector<Vec> vertices;
  std::vector<Cell> cells;
  std::vector<int> material;  // per-cell label; empty when the mesh has none

  std::vector<Face> faces;                  // deduplicated facets, deterministic order
  std::vector<std::array<int, 6>> cell_faces;  // per cell: face id per local face (-1 pad)

  int n_cells() const { return int(cells.size()); }
  int n_vertices() const { return int(vertices.size()); }
  int n_boundary_faces() const;
  bool has_material() const { return !material.empty(); }

  Vec cell_centroid(int c) const;       // vertex average
  double cell_measure(int c) const;     // area (2D) / volume (3D)
  Aabb cell_bbox(int c) const;
  double total_measure() const;

  // Local face as a list of vertex ids, oriented outward with respect to `cell`.
  std::vector<int> local_face_vertices(int cell, int lf) const;
  // Point membership (convex cells; quads/hexes are tested via their simplex
  // decomposition). `eps` is an absolute slack on the containment test.
  bool cell_contains(int c, const Vec& p, double eps = 0.0) const;
  // Unit normal of face f pointing out of its owner cell, evaluated at the face
  // vertex average (exact for planar facets).
  Vec face_normal(int f) const;
  double face_measure(int f) const;

  void finalize();  // builds faces/cell_faces; validates positive measures
};

// Face-adjacency graph of the cells (CSR-like, neighbors sorted ascending).
struct DualGraph {
  std::vector<std::vector<int>> neighbors;
  int n_edges() const;
};
DualGraph dual_adjacency(const BackgroundMesh& mesh);

// Uniform n x n quadrilateral grid on the given box (default unit square).
BackgroundMesh generate_structured_quad(int n, const Aabb& bounds);
BackgroundMesh generate_structured_quad(int n);
// Uniform n x n x n hexahedral grid on the given box (default unit cube).
BackgroundMesh generate_structured_hex(int n, const Aabb& bounds);
BackgroundMesh generate_structured_hex(int n);
// Rectangular nx x ny quad grid on the unit square-scaled box.
BackgroundMesh generate_structured_quad_grid(int nx, int ny, const Aabb& bounds);

// n x n quad grid with every interior vertex displaced by amplitude*h*u, u uniform
// in [-1,1) per coordinate from a splitmix64 stream; boundary vertices stay fixed.
// amplitude must be < 0.5 so cells remain convex with positive area.
BackgroundMesh generate_perturbed_quad(int n, double amplitude, std::uint64_t seed);
BackgroundMesh generate_perturbed_quad_grid(int nx, int ny, double amplitude,
                                            std::uint64_t seed);

// Gmsh ASCII v2.2 reader. Imports tri/quad/tet/hex elements; lower-dimensional
// elements are skipped; the physical tag (first element tag) becomes the material
// label. Throws std::runtime_error with a line number on malformed input.
BackgroundMesh read_msh(const std::string& path);
// Gmsh ASCII v2.2 writer (full-precision coordinates, round-trips through read_msh).
void write_msh(const BackgroundMesh& mesh, const std::string& path);

// Legacy ASCII VTK (unstructured grid) writer with per-cell scalar fields.
void write_vtk(const BackgroundMesh& mesh, const std::string& path,
               const std::map<std::string, std::vector<double>>& cell_scalars = {});

}  // namespace rtagg
