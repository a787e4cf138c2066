#pragma once

#include <vector>

#include "rtagg/mesh.hpp"

namespace rtagg {

// One-dimensional Gauss-Legendre rule on [-1, 1]; exact for degree 2n-1.
void gauss_legendre_1d(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Gauss-Lobatto point set on [-1, 1] (n >= 2 points, endpoints included).
// Used as interpolation nodes; no weights needed.
std::vector<double> gauss_lobatto_nodes(int n);

struct QuadratureRule {
  std::vector<Vec> points;      // physical coordinates
  std::vector<double> weights;  // geometry Jacobians folded in; sum = measure
  int size() const { return int(points.size()); }
};

// Rule over fine cell `c`, exact for total polynomial degree `exactness` on
// affinely mapped cells (tensor Gauss on quads/hexes, collapsed-coordinate
// Gauss on triangles/tetrahedra with per-direction counts inflated to absorb
// the collapse Jacobian).
QuadratureRule cell_quadrature(const BackgroundMesh& mesh, int c, int exactness);

// Rule over fine face `f` with the surface measure folded into the weights.
QuadratureRule face_quadrature(const BackgroundMesh& mesh, int f, int exactness);

}  // namespace rtagg
