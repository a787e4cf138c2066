#pragma once

#include <vector>

#include "rtagg/geometry.hpp"

namespace rtagg {

// Local polynomial families on an agglomerate's bounding box:
//   Tensor      — Q_p, tensor-product Lagrange polynomials on the (p+1)^d grid
//                 of Gauss-Lobatto nodes of the box; local dimension (p+1)^d.
//   TotalDegree — P_p, graded monomials in box-normalized coordinates,
//                 orthonormalized over the box by a Gram-matrix Cholesky
//                 factorization; local dimension C(p+d, d).
enum class BasisFamily { Tensor, TotalDegree };

int basis_local_dim(int dim, int p, BasisFamily family);

// Polynomial basis of one agglomerate, defined on its bounding box. Functions
// are polynomials on all of space; the restriction to the agglomerate is
// realized purely through the integration domains used by the assembly.
class BoxBasis {
 public:
  BoxBasis(int dim, int p, BasisFamily family, const Aabb& box);

  int size() const { return n_; }
  int dim() const { return dim_; }
  int degree() const { return p_; }
  BasisFamily family() const { return family_; }
  const Aabb& box() const { return box_; }

  // Values and gradients of all basis functions at physical point x. The vectors
  // are resized; gradients carry the physical-coordinate chain factor.
  void eval(const Vec& x, std::vector<double>& values, std::vector<Vec>& gradients) const;

  // Tensor family only: the interpolation nodes in physical coordinates, in
  // basis-function order (phi_i(node_j) = delta_ij).
  std::vector<Vec> nodes() const;

 private:
  int dim_, p_, n_;
  BasisFamily family_;
  Aabb box_;
  std::vector<double> nodes_1d_;           // Tensor: Gauss-Lobatto nodes in [-1,1]
  std::vector<std::array<int, 3>> expo_;   // TotalDegree: graded exponent tuples
  std::vector<double> transform_;          // TotalDegree: row-major lower-tri L^{-1}
};

}  // namespace rtagg
