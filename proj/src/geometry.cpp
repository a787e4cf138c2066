#include "rtagg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rtagg {

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
double distance(const Vec& a, const Vec& b) { return norm(a - b); }

void Aabb::extend(const Vec& p) {
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::min(lo[k], p[k]);
    hi[k] = std::max(hi[k], p[k]);
  }
}

void Aabb::extend(const Aabb& b) {
  if (!b.valid()) return;
  extend(b.lo);
  extend(b.hi);
}

double Aabb::measure(int dim) const {
  double m = 1.0;
  for (int k = 0; k < dim; ++k) m *= std::max(0.0, hi[k] - lo[k]);
  return m;
}

double Aabb::margin(int dim) const {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += std::max(0.0, hi[k] - lo[k]);
  return s;
}

bool Aabb::contains(const Vec& p, int dim, double eps) const {
  for (int k = 0; k < dim; ++k)
    if (p[k] < lo[k] - eps || p[k] > hi[k] + eps) return false;
  return true;
}

bool Aabb::contains(const Aabb& b, int dim, double eps) const {
  for (int k = 0; k < dim; ++k)
    if (b.lo[k] < lo[k] - eps || b.hi[k] > hi[k] + eps) return false;
  return true;
}

Aabb Aabb::hull(const Aabb& a, const Aabb& b) {
  Aabb h = a;
  h.extend(b);
  return h;
}

Aabb Aabb::from_corners(const Vec& a, const Vec& b) {
  Aabb box;
  box.extend(a);
  box.extend(b);
  return box;
}

double Aabb::overlap(const Aabb& a, const Aabb& b, int dim) {
  double m = 1.0;
  for (int k = 0; k < dim; ++k) {
    double w = std::min(a.hi[k], b.hi[k]) - std::max(a.lo[k], b.lo[k]);
    if (w <= 0.0) return 0.0;
    m *= w;
  }
  return m;
}

double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  Vec ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double point_triangle_distance(const Vec& p, const Vec& a, const Vec& b, const Vec& c) {
  // Project onto the triangle plane; if the projection lies inside, the distance is
  // the plane distance, otherwise the closest point is on an edge.
  Vec ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return distance(p, a);

  Vec bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return distance(p, b);

  Vec cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return distance(p, c);

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    double t = d1 / (d1 - d3);
    return distance(p, a + t * ab);
  }
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    double t = d2 / (d2 - d6);
    return distance(p, a + t * ac);
  }
  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return distance(p, b + t * (c - b));
  }
  Vec n = cross(ab, ac);
  double nn = dot(n, n);
  if (nn == 0.0) return point_segment_distance(p, a, b);  // degenerate triangle
  double d = dot(ap, n);
  return std::abs(d) / std::sqrt(nn);
}

std::vector<Vec> convex_hull_2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;

  auto cross2 = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Vec> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
    while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double point_set_diameter(const std::vector<Vec>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, distance(pts[i], pts[j]));
  return best;
}

}  // namespace rtagg
