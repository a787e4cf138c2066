#include "rtagg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rtagg {

int cell_num_vertices(CellKind k) {
  switch (k) {
    case CellKind::Tri: return 3;
    case CellKind::Quad: return 4;
    case CellKind::Tet: return 4;
    case CellKind::Hex: return 8;
  }
  return 0;
}

int cell_num_faces(CellKind k) {
  switch (k) {
    case CellKind::Tri: return 3;
    case CellKind::Quad: return 4;
    case CellKind::Tet: return 4;
    case CellKind::Hex: return 6;
  }
  return 0;
}

int cell_dim(CellKind k) { return (k == CellKind::Tri || k == CellKind::Quad) ? 2 : 3; }

namespace {

// Local face vertex tables, oriented outward for positively oriented cells.
// 2D cells list their corners counterclockwise; hexes use the Gmsh/VTK ordering
// (bottom ring 0-3, top ring 4-7 with vertex i+4 above vertex i).
constexpr int tri_faces[3][4] = {{0, 1, -1, -1}, {1, 2, -1, -1}, {2, 0, -1, -1}};
constexpr int quad_faces[4][4] = {{0, 1, -1, -1}, {1, 2, -1, -1}, {2, 3, -1, -1}, {3, 0, -1, -1}};
constexpr int tet_faces[4][4] = {{0, 2, 1, -1}, {0, 1, 3, -1}, {0, 3, 2, -1}, {1, 2, 3, -1}};
constexpr int hex_faces[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                 {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};

const int (*face_table(CellKind k))[4] {
  switch (k) {
    case CellKind::Tri: return tri_faces;
    case CellKind::Quad: return quad_faces;
    case CellKind::Tet: return tet_faces;
    case CellKind::Hex: return hex_faces;
  }
  return nullptr;
}

double tet_volume(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  return dot(b - a, cross(c - a, d - a)) / 6.0;
}

// Unit normal of a planar polygon via Newell's formula.
Vec polygon_normal(const std::vector<Vec>& pts) {
  Vec n{0, 0, 0};
  const std::size_t k = pts.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Vec& a = pts[i];
    const Vec& b = pts[(i + 1) % k];
    n[0] += (a[1] - b[1]) * (a[2] + b[2]);
    n[1] += (a[2] - b[2]) * (a[0] + b[0]);
    n[2] += (a[0] - b[0]) * (a[1] + b[1]);
  }
  double len = norm(n);
  if (len == 0.0) throw std::runtime_error("degenerate face");
  return (1.0 / len) * n;
}

}  // namespace

int BackgroundMesh::n_boundary_faces() const {
  int n = 0;
  for (const Face& f : faces) n += f.boundary() ? 1 : 0;
  return n;
}

Vec BackgroundMesh::cell_centroid(int c) const {
  const Cell& cell = cells[c];
  Vec s{0, 0, 0};
  for (int i = 0; i < cell.nv(); ++i) s = s + vertices[cell.v[i]];
  return (1.0 / cell.nv()) * s;
}

double BackgroundMesh::cell_measure(int c) const {
  const Cell& cell = cells[c];
  auto P = [&](int i) -> const Vec& { return vertices[cell.v[i]]; };
  switch (cell.kind) {
    case CellKind::Tri: {
      Vec u = P(1) - P(0), w = P(2) - P(0);
      return 0.5 * (u[0] * w[1] - u[1] * w[0]);
    }
    case CellKind::Quad: {
      double a = 0.0;
      for (int i = 0; i < 4; ++i) {
        const Vec& p = P(i);
        const Vec& q = P((i + 1) % 4);
        a += p[0] * q[1] - q[0] * p[1];
      }
      return 0.5 * a;
    }
    case CellKind::Tet:
      return tet_volume(P(0), P(1), P(2), P(3));
    case CellKind::Hex: {
      // Volume of the polyhedron split into six tets around the 0-6 diagonal.
      double v = 0.0;
      v += tet_volume(P(0), P(1), P(2), P(6));
      v += tet_volume(P(0), P(2), P(3), P(6));
      v += tet_volume(P(0), P(3), P(7), P(6));
      v += tet_volume(P(0), P(7), P(4), P(6));
      v += tet_volume(P(0), P(4), P(5), P(6));
      v += tet_volume(P(0), P(5), P(1), P(6));
      return v;
    }
  }
  return 0.0;
}

Aabb BackgroundMesh::cell_bbox(int c) const {
  Aabb b;
  const Cell& cell = cells[c];
  for (int i = 0; i < cell.nv(); ++i) b.extend(vertices[cell.v[i]]);
  return b;
}

double BackgroundMesh::total_measure() const {
  double s = 0.0;
  for (int c = 0; c < n_cells(); ++c) s += cell_measure(c);
  return s;
}

namespace {

bool point_in_tri(const Vec& p, const Vec& a, const Vec& b, const Vec& c, double eps) {
  auto side = [&](const Vec& u, const Vec& v) {
    return (v[0] - u[0]) * (p[1] - u[1]) - (v[1] - u[1]) * (p[0] - u[0]);
  };
  return side(a, b) >= -eps && side(b, c) >= -eps && side(c, a) >= -eps;
}

bool point_in_tet(const Vec& p, const Vec& a, const Vec& b, const Vec& c, const Vec& d,
                  double eps) {
  auto vol = [](const Vec& r, const Vec& s, const Vec& t, const Vec& u) {
    return dot(s - r, cross(t - r, u - r));
  };
  double total = vol(a, b, c, d);
  if (total < 0) return point_in_tet(p, a, c, b, d, eps);
  return vol(p, b, c, d) >= -eps && vol(a, p, c, d) >= -eps && vol(a, b, p, d) >= -eps &&
         vol(a, b, c, p) >= -eps;
}

}  // namespace

bool BackgroundMesh::cell_contains(int c, const Vec& p, double eps) const {
  const Cell& cell = cells[c];
  auto P = [&](int i) -> const Vec& { return vertices[cell.v[i]]; };
  switch (cell.kind) {
    case CellKind::Tri:
      return point_in_tri(p, P(0), P(1), P(2), eps);
    case CellKind::Quad:
      return point_in_tri(p, P(0), P(1), P(2), eps) || point_in_tri(p, P(0), P(2), P(3), eps);
    case CellKind::Tet:
      return point_in_tet(p, P(0), P(1), P(2), P(3), eps);
    case CellKind::Hex:
      return point_in_tet(p, P(0), P(1), P(2), P(6), eps) ||
             point_in_tet(p, P(0), P(2), P(3), P(6), eps) ||
             point_in_tet(p, P(0), P(3), P(7), P(6), eps) ||
             point_in_tet(p, P(0), P(7), P(4), P(6), eps) ||
             point_in_tet(p, P(0), P(4), P(5), P(6), eps) ||
             point_in_tet(p, P(0), P(5), P(1), P(6), eps);
  }
  return false;
}

std::vector<int> BackgroundMesh::local_face_vertices(int cell, int lf) const {
  const Cell& c = cells[cell];
  const int(*table)[4] = face_table(c.kind);
  std::vector<int> out;
  for (int i = 0; i < 4 && table[lf][i] >= 0; ++i) out.push_back(c.v[table[lf][i]]);
  return out;
}

Vec BackgroundMesh::face_normal(int f) const {
  const Face& face = faces[f];
  if (dim == 2) {
    Vec t = vertices[face.v[1]] - vertices[face.v[0]];
    double len = std::hypot(t[0], t[1]);
    return {t[1] / len, -t[0] / len, 0.0};
  }
  std::vector<Vec> pts;
  for (int i = 0; i < face.n_vertices; ++i) pts.push_back(vertices[face.v[i]]);
  return polygon_normal(pts);
}

double BackgroundMesh::face_measure(int f) const {
  const Face& face = faces[f];
  if (dim == 2) return distance(vertices[face.v[0]], vertices[face.v[1]]);
  const Vec& a = vertices[face.v[0]];
  const Vec& b = vertices[face.v[1]];
  const Vec& c = vertices[face.v[2]];
  double m = 0.5 * norm(cross(b - a, c - a));
  if (face.n_vertices == 4) {
    const Vec& d = vertices[face.v[3]];
    m += 0.5 * norm(cross(c - a, d - a));
  }
  return m;
}

void BackgroundMesh::finalize() {
  if (cells.empty()) throw std::invalid_argument("mesh has no cells");
  for (const Cell& c : cells) {
    if (cell_dim(c.kind) != dim) throw std::invalid_argument("cell dimension mismatch");
    for (int i = 0; i < c.nv(); ++i)
      if (c.v[i] < 0 || c.v[i] >= n_vertices())
        throw std::invalid_argument("cell references vertex out of range");
  }
  if (!material.empty() && int(material.size()) != n_cells())
    throw std::invalid_argument("material array size does not match cell count");
  for (int c = 0; c < n_cells(); ++c)
    if (!(cell_measure(c) > 0.0))
      throw std::invalid_argument("cell " + std::to_string(c) + " has non-positive measure");

  faces.clear();
  cell_faces.assign(cells.size(), {-1, -1, -1, -1, -1, -1});
  std::map<std::array<int, 4>, int> index;  // sorted vertex ids -> face id
  for (int c = 0; c < n_cells(); ++c) {
    const int nf = cell_num_faces(cells[c].kind);
    for (int lf = 0; lf < nf; ++lf) {
      std::vector<int> fv = local_face_vertices(c, lf);
      std::array<int, 4> key{-1, -1, -1, -1};
      std::copy(fv.begin(), fv.end(), key.begin());
      std::sort(key.begin(), key.end());
      auto it = index.find(key);
      if (it == index.end()) {
        Face f;
        f.n_vertices = int(fv.size());
        std::copy(fv.begin(), fv.end(), f.v.begin());
        f.owner = c;
        index.emplace(key, int(faces.size()));
        cell_faces[c][lf] = int(faces.size());
        faces.push_back(f);
      } else {
        Face& f = faces[it->second];
        if (f.neighbor >= 0)
          throw std::invalid_argument("non-manifold face shared by more than two cells");
        f.neighbor = c;
        cell_faces[c][lf] = it->second;
      }
    }
  }
}

int DualGraph::n_edges() const {
  std::size_t s = 0;
  for (const auto& nb : neighbors) s += nb.size();
  return int(s / 2);
}

DualGraph dual_adjacency(const BackgroundMesh& mesh) {
  DualGraph g;
  g.neighbors.assign(mesh.n_cells(), {});
  for (const Face& f : mesh.faces) {
    if (f.boundary()) continue;
    g.neighbors[f.owner].push_back(f.neighbor);
    g.neighbors[f.neighbor].push_back(f.owner);
  }
  for (auto& nb : g.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

BackgroundMesh generate_structured_quad_grid(int nx, int ny, const Aabb& bounds) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid size must be positive");
  BackgroundMesh mesh;
  mesh.dim = 2;
  const Vec ext = bounds.extents();
  mesh.vertices.reserve(std::size_t(nx + 1) * (ny + 1));
  for (int iy = 0; iy <= ny; ++iy)
    for (int ix = 0; ix <= nx; ++ix)
      mesh.vertices.push_back(
          {bounds.lo[0] + ext[0] * ix / nx, bounds.lo[1] + ext[1] * iy / ny, 0.0});
  mesh.cells.reserve(std::size_t(nx) * ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      int v00 = iy * (nx + 1) + ix;
      Cell c;
      c.kind = CellKind::Quad;
      c.v = {v00, v00 + 1, v00 + nx + 2, v00 + nx + 1, 0, 0, 0, 0};
      mesh.cells.push_back(c);
    }
  mesh.finalize();
  return mesh;
}

BackgroundMesh generate_structured_quad(int n, const Aabb& bounds) {
  return generate_structured_quad_grid(n, n, bounds);
}

BackgroundMesh generate_structured_quad(int n) {
  return generate_structured_quad(n, Aabb::from_corners({0, 0, 0}, {1, 1, 0}));
}

BackgroundMesh generate_structured_hex(int n, const Aabb& bounds) {
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  BackgroundMesh mesh;
  mesh.dim = 3;
  const Vec ext = bounds.extents();
  const int nv = n + 1;
  mesh.vertices.reserve(std::size_t(nv) * nv * nv);
  for (int iz = 0; iz <= n; ++iz)
    for (int iy = 0; iy <= n; ++iy)
      for (int ix = 0; ix <= n; ++ix)
        mesh.vertices.push_back({bounds.lo[0] + ext[0] * ix / n, bounds.lo[1] + ext[1] * iy / n,
                                 bounds.lo[2] + ext[2] * iz / n});
  auto vid = [nv](int ix, int iy, int iz) { return (iz * nv + iy) * nv + ix; };
  mesh.cells.reserve(std::size_t(n) * n * n);
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        Cell c;
        c.kind = CellKind::Hex;
        c.v = {vid(ix, iy, iz),         vid(ix + 1, iy, iz),         vid(ix + 1, iy + 1, iz),
               vid(ix, iy + 1, iz),     vid(ix, iy, iz + 1),         vid(ix + 1, iy, iz + 1),
               vid(ix + 1, iy + 1, iz + 1), vid(ix, iy + 1, iz + 1)};
        mesh.cells.push_back(c);
      }
  mesh.finalize();
  return mesh;
}

BackgroundMesh generate_structured_hex(int n) {
  return generate_structured_hex(n, Aabb::from_corners({0, 0, 0}, {1, 1, 1}));
}

BackgroundMesh generate_perturbed_quad_grid(int nx, int ny, double amplitude,
                                            std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude < 0.5))
    throw std::invalid_argument("perturbation amplitude must lie in [0, 0.5)");
  BackgroundMesh mesh =
      generate_structured_quad_grid(nx, ny, Aabb::from_corners({0, 0, 0}, {1, 1, 0}));
  const double hx = 1.0 / nx, hy = 1.0 / ny;
  SplitMix64 rng(seed);
  // Interior vertices only, visited in id order: two draws per vertex.
  for (int iy = 1; iy < ny; ++iy)
    for (int ix = 1; ix < nx; ++ix) {
      Vec& v = mesh.vertices[iy * (nx + 1) + ix];
      v[0] += amplitude * hx * rng.next_symmetric();
      v[1] += amplitude * hy * rng.next_symmetric();
    }
  mesh.finalize();
  return mesh;
}

BackgroundMesh generate_perturbed_quad(int n, double amplitude, std::uint64_t seed) {
  return generate_perturbed_quad_grid(n, n, amplitude, seed);
}

}  // namespace rtagg
