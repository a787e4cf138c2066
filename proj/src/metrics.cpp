#include "rtagg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <stdexcept>

namespace rtagg {

double uniformity_factor(const PolytopalMesh& poly, int a) {
  return poly.agglomerates[a].diameter / poly.h_max;
}

double box_ratio(const PolytopalMesh& poly, int a) {
  const Agglomerate& agg = poly.agglomerates[a];
  return agg.measure / agg.mbr.measure(poly.fine->dim);
}

double overlap_factor(const PolytopalMesh& poly) {
  double boxes = 0.0;
  for (const Agglomerate& agg : poly.agglomerates) boxes += agg.mbr.measure(poly.fine->dim);
  return poly.fine->total_measure() / boxes;
}

namespace {

// Geometry of the region whose inscribed ball is sought: a set of fine cells and
// the facets bounding it (segments in 2D, triangles in 3D; quads split in two).
struct Region {
  const BackgroundMesh* mesh;
  int dim;
  std::vector<int> cells;
  std::vector<std::array<Vec, 3>> walls;  // wall[2] unused in 2D
  double eps;                             // containment slack

  bool inside(const Vec& p) const {
    for (int c : cells)
      if (mesh->cell_contains(c, p, eps)) return true;
    return false;
  }
  double boundary_distance(const Vec& p) const {
    double d = std::numeric_limits<double>::max();
    for (const auto& w : walls)
      d = std::min(d, dim == 2 ? point_segment_distance(p, w[0], w[1])
                               : point_triangle_distance(p, w[0], w[1], w[2]));
    return d;
  }
  double signed_distance(const Vec& p) const {
    double d = boundary_distance(p);
    return inside(p) ? d : -d;
  }
};

Region make_region(const PolytopalMesh& poly, int a) {
  const BackgroundMesh& mesh = *poly.fine;
  const Agglomerate& agg = poly.agglomerates[a];

  // Largest face-connected component (ties by lowest contained cell id, which BFS
  // from cells in ascending id order delivers for free).
  std::vector<int> cells = agg.cells;
  if (!agg.connected) {
    std::vector<char> seen(mesh.n_cells(), 0);
    std::vector<int> best;
    for (int start : agg.cells) {
      if (seen[start]) continue;
      std::vector<int> queue{start};
      seen[start] = 1;
      std::size_t head = 0;
      while (head < queue.size()) {
        int c = queue[head++];
        for (int lf = 0; lf < cell_num_faces(mesh.cells[c].kind); ++lf) {
          const Face& face = mesh.faces[mesh.cell_faces[c][lf]];
          int other = (face.owner == c) ? face.neighbor : face.owner;
          if (other < 0 || seen[other]) continue;
          if (poly.partition.assignment[other] != a) continue;
          seen[other] = 1;
          queue.push_back(other);
        }
      }
      if (queue.size() > best.size()) best = std::move(queue);
    }
    cells = std::move(best);
    std::sort(cells.begin(), cells.end());
  }

  Region region;
  region.mesh = &mesh;
  region.dim = mesh.dim;
  region.cells = cells;
  const double scale = agg.diameter > 0 ? agg.diameter : 1.0;
  region.eps = 1e-12 * scale * scale * (mesh.dim == 3 ? scale : 1.0);

  std::vector<char> member(mesh.n_cells(), 0);
  for (int c : cells) member[c] = 1;
  for (int c : cells) {
    for (int lf = 0; lf < cell_num_faces(mesh.cells[c].kind); ++lf) {
      const Face& face = mesh.faces[mesh.cell_faces[c][lf]];
      int other = (face.owner == c) ? face.neighbor : face.owner;
      if (other >= 0 && member[other]) continue;  // interior to the region
      if (mesh.dim == 2) {
        region.walls.push_back(
            {mesh.vertices[face.v[0]], mesh.vertices[face.v[1]], Vec{0, 0, 0}});
      } else {
        region.walls.push_back(
            {mesh.vertices[face.v[0]], mesh.vertices[face.v[1]], mesh.vertices[face.v[2]]});
        if (face.n_vertices == 4)
          region.walls.push_back(
              {mesh.vertices[face.v[0]], mesh.vertices[face.v[2]], mesh.vertices[face.v[3]]});
      }
    }
  }
  return region;
}

}  // namespace

double inradius(const PolytopalMesh& poly, int a, double tol_rel) {
  const Agglomerate& agg = poly.agglomerates[a];
  const int dim = poly.fine->dim;
  Region region = make_region(poly, a);
  const double tol = tol_rel * (agg.diameter > 0 ? agg.diameter : 1.0);

  Aabb box;
  for (int c : region.cells) box.extend(poly.fine->cell_bbox(c));
  const Vec ext = box.extents();
  double size = ext[0];
  for (int k = 1; k < dim; ++k) size = std::min(size, ext[k]);
  if (size <= 0.0) return 0.0;

  // Pole-of-inaccessibility search: best-first quadtree/octree refinement with the
  // bound d(center) + half * sqrt(dim) on the cell maximum.
  struct Cand {
    double pot;
    long seq;
    Vec center;
    double half;
  };
  auto worse = [](const Cand& x, const Cand& y) {
    return x.pot < y.pot || (x.pot == y.pot && x.seq > y.seq);
  };
  std::priority_queue<Cand, std::vector<Cand>, decltype(worse)> queue(worse);
  long seq = 0;
  const double root_dim = std::sqrt(double(dim));

  double best = region.signed_distance(box.center());
  auto push_cell = [&](const Vec& c, double half) {
    double d = region.signed_distance(c);
    best = std::max(best, d);
    if (d + half * root_dim > best + tol) queue.push({d + half * root_dim, seq++, c, half});
  };

  const double half0 = 0.5 * size;
  std::array<long, 3> counts{1, 1, 1};
  for (int k = 0; k < dim; ++k) counts[k] = std::max(1L, long(std::ceil(ext[k] / size - 1e-9)));
  for (long ix = 0; ix < counts[0]; ++ix)
    for (long iy = 0; iy < counts[1]; ++iy)
      for (long iz = 0; iz < counts[2]; ++iz)
        push_cell({box.lo[0] + (ix + 0.5) * size, box.lo[1] + (iy + 0.5) * size,
                   dim == 3 ? box.lo[2] + (iz + 0.5) * size : 0.0},
                  half0);

  long guard = 0;
  while (!queue.empty() && guard++ < 4'000'000) {
    Cand top = queue.top();
    queue.pop();
    if (top.pot - best <= tol) break;
    const double h = 0.5 * top.half;
    for (int sx = -1; sx <= 1; sx += 2)
      for (int sy = -1; sy <= 1; sy += 2) {
        if (dim == 2) {
          push_cell({top.center[0] + sx * h, top.center[1] + sy * h, 0}, h);
        } else {
          for (int sz = -1; sz <= 1; sz += 2)
            push_cell(
                {top.center[0] + sx * h, top.center[1] + sy * h, top.center[2] + sz * h}, h);
        }
      }
  }
  return std::max(best, 0.0);
}

double circle_ratio(const PolytopalMesh& poly, int a, double tol_rel) {
  return inradius(poly, a, tol_rel) / (0.5 * poly.agglomerates[a].diameter);
}

MetricsReport metrics_report(const PolytopalMesh& poly, double tol_rel) {
  MetricsReport r;
  const int n = poly.n_agglomerates();
  r.per_agglomerate.resize(n);
  r.uf_min = r.cr_min = r.br_min = std::numeric_limits<double>::max();
  for (int a = 0; a < n; ++a) {
    ElementMetrics& em = r.per_agglomerate[a];
    em.uf = uniformity_factor(poly, a);
    em.cr = circle_ratio(poly, a, tol_rel);
    em.br = box_ratio(poly, a);
    r.uf_min = std::min(r.uf_min, em.uf);
    r.uf_max = std::max(r.uf_max, em.uf);
    r.uf_avg += em.uf / n;
    r.cr_min = std::min(r.cr_min, em.cr);
    r.cr_max = std::max(r.cr_max, em.cr);
    r.cr_avg += em.cr / n;
    r.br_min = std::min(r.br_min, em.br);
    r.br_max = std::max(r.br_max, em.br);
    r.br_avg += em.br / n;
  }
  r.of = overlap_factor(poly);
  return r;
}

void write_metrics_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << "agglomerate,uf,cr,br\n";
  for (std::size_t a = 0; a < report.per_agglomerate.size(); ++a) {
    const ElementMetrics& em = report.per_agglomerate[a];
    out << a << ',' << num(em.uf) << ',' << num(em.cr) << ',' << num(em.br) << "\n";
  }
  out << "min," << num(report.uf_min) << ',' << num(report.cr_min) << ',' << num(report.br_min)
      << "\n";
  out << "max," << num(report.uf_max) << ',' << num(report.cr_max) << ',' << num(report.br_max)
      << "\n";
  out << "avg," << num(report.uf_avg) << ',' << num(report.cr_avg) << ',' << num(report.br_avg)
      << "\n";
  out << "of," << num(report.of) << ",,\n";
  if (!out) throw std::runtime_error("error while writing " + path);
}

}  // namespace rtagg
