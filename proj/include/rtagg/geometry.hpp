#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace rtagg {

// Points and vectors are stored with three components regardless of the spatial
// dimension; 2D data keeps z = 0. The active dimension is carried by the owning
// container (mesh, tree, ...) and passed to the few operations that need it.
using Vec = std::array<double, 3>;

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec& a);
double distance(const Vec& a, const Vec& b);

// Axis-aligned bounding box. A default-constructed box is "inverted" (lo > hi) so
// that extend() can be used to accumulate hulls without special-casing the first
// element.
struct Aabb {
  Vec lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
         std::numeric_limits<double>::max()};
  Vec hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
         std::numeric_limits<double>::lowest()};

  bool valid() const { return lo[0] <= hi[0] && lo[1] <= hi[1] && lo[2] <= hi[2]; }
  void extend(const Vec& p);
  void extend(const Aabb& b);
  Vec center() const { return 0.5 * (lo + hi); }
  Vec extents() const { return hi - lo; }

  // Product of extents over the first `dim` axes.
  double measure(int dim) const;
  // Sum of extents over the first `dim` axes (the R*-tree "margin").
  double margin(int dim) const;
  bool contains(const Vec& p, int dim, double eps = 0.0) const;
  bool contains(const Aabb& b, int dim, double eps = 0.0) const;

  static Aabb hull(const Aabb& a, const Aabb& b);
  // Smallest box containing the two points (any corner pair works).
  static Aabb from_corners(const Vec& a, const Vec& b);
  // Measure of the intersection over the first `dim` axes (0 if disjoint).
  static double overlap(const Aabb& a, const Aabb& b, int dim);

  bool operator==(const Aabb& o) const { return lo == o.lo && hi == o.hi; }
};

// Distance from p to the segment [a,b] (works in 2D and 3D).
double point_segment_distance(const Vec& p, const Vec& a, const Vec& b);
// Distance from p to the triangle (a,b,c) in 3D.
double point_triangle_distance(const Vec& p, const Vec& a, const Vec& b, const Vec& c);

// Convex hull of a planar point set (z ignored), Andrew's monotone chain.
// Returns hull vertices in counterclockwise order without the closing point.
std::vector<Vec> convex_hull_2d(std::vector<Vec> pts);

// Largest pairwise distance of a point set.
double point_set_diameter(const std::vector<Vec>& pts);

// splitmix64: tiny deterministic PRNG used wherever reproducible randomness is
// needed (mesh perturbation, seeded start vectors). Fixed algorithm so results are
// identical across platforms and standard libraries.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0,1).
  double next_double() { return double(next() >> 11) * 0x1.0p-53; }
  // Uniform in [-1,1).
  double next_symmetric() { return 2.0 * next_double() - 1.0; }
};

}  // namespace rtagg
