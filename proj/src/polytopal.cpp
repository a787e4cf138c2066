#include <algorithm>
#include <stdexcept>

#include "rtagg/agglomeration.hpp"

namespace rtagg {

PolytopalMesh build_polytopal_mesh(const BackgroundMesh& mesh, Partition partition) {
  if (partition.n_cells != mesh.n_cells())
    throw std::invalid_argument("partition does not match mesh");
  validate_partition(partition);

  PolytopalMesh poly;
  poly.fine = &mesh;
  poly.agglomerates.resize(partition.n_agglomerates);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    Agglomerate& a = poly.agglomerates[partition.assignment[c]];
    a.cells.push_back(c);
    a.mbr.extend(mesh.cell_bbox(c));
    a.measure += mesh.cell_measure(c);
  }

  // Skeleton: fine faces whose two sides lie in different agglomerates, plus the
  // domain boundary. The stored sign flips the owner-outward normal to point from
  // the lower-id agglomerate to the higher-id one.
  for (int f = 0; f < int(mesh.faces.size()); ++f) {
    const Face& face = mesh.faces[f];
    const int a = partition.assignment[face.owner];
    if (face.boundary()) {
      poly.faces.push_back({f, a, -1, 1.0});
    } else {
      const int b = partition.assignment[face.neighbor];
      if (a == b) continue;
      PolytopalFace pf;
      pf.fine_face = f;
      pf.inner = std::min(a, b);
      pf.outer = std::max(a, b);
      pf.sign = (a < b) ? 1.0 : -1.0;  // owner normal points a -> b
      poly.faces.push_back(pf);
    }
  }
  for (int i = 0; i < int(poly.faces.size()); ++i) {
    poly.agglomerates[poly.faces[i].inner].faces.push_back(i);
    if (poly.faces[i].outer >= 0) poly.agglomerates[poly.faces[i].outer].faces.push_back(i);
  }

  // Connectivity: BFS over member cells through faces interior to the agglomerate.
  std::vector<int> mark(mesh.n_cells(), -1);
  for (int a = 0; a < poly.n_agglomerates(); ++a) {
    Agglomerate& agg = poly.agglomerates[a];
    std::vector<int> queue{agg.cells.front()};
    mark[agg.cells.front()] = a;
    std::size_t head = 0;
    while (head < queue.size()) {
      int c = queue[head++];
      for (int lf = 0; lf < cell_num_faces(mesh.cells[c].kind); ++lf) {
        const Face& face = mesh.faces[mesh.cell_faces[c][lf]];
        int other = (face.owner == c) ? face.neighbor : face.owner;
        if (other < 0 || mark[other] == a) continue;
        if (partition.assignment[other] != a) continue;
        mark[other] = a;
        queue.push_back(other);
      }
    }
    agg.connected = (queue.size() == agg.cells.size());
    if (!agg.connected) poly.disconnected.push_back(a);
  }

  // Diameters. In 2D the farthest pair is found on the convex hull of the member
  // vertices; in 3D over the vertices of the agglomerate's boundary faces (interior
  // vertices cannot be extreme points).
  for (int a = 0; a < poly.n_agglomerates(); ++a) {
    Agglomerate& agg = poly.agglomerates[a];
    std::vector<int> vids;
    if (mesh.dim == 2) {
      for (int c : agg.cells) {
        const Cell& cell = mesh.cells[c];
        for (int i = 0; i < cell.nv(); ++i) vids.push_back(cell.v[i]);
      }
    } else {
      for (int fi : agg.faces) {
        const Face& face = mesh.faces[poly.faces[fi].fine_face];
        for (int i = 0; i < face.n_vertices; ++i) vids.push_back(face.v[i]);
      }
    }
    std::sort(vids.begin(), vids.end());
    vids.erase(std::unique(vids.begin(), vids.end()), vids.end());
    std::vector<Vec> pts;
    pts.reserve(vids.size());
    for (int v : vids) pts.push_back(mesh.vertices[v]);
    if (mesh.dim == 2) pts = convex_hull_2d(std::move(pts));
    agg.diameter = point_set_diameter(pts);
    poly.h_max = std::max(poly.h_max, agg.diameter);
  }

  poly.partition = std::move(partition);
  return poly;
}

}  // namespace rtagg
