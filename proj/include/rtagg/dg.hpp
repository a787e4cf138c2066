#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rtagg/agglomeration.hpp"
#include "rtagg/basis.hpp"
#include "rtagg/sparse.hpp"

namespace rtagg {

// Discontinuous polynomial space over a polytopal mesh: one bounding-box basis
// per agglomerate, contiguous global DoF blocks in agglomerate order.
struct DgSpace {
  const PolytopalMesh* poly = nullptr;  // non-owning: the mesh must outlive the space
  int p = 1;
  BasisFamily family = BasisFamily::Tensor;
  std::vector<BoxBasis> basis;  // one per agglomerate
  std::vector<int> offset;      // size n_agglomerates + 1, strictly increasing

  int n_dofs() const { return offset.back(); }
  int local_dim(int a) const { return offset[a + 1] - offset[a]; }
};

DgSpace build_space(const PolytopalMesh& poly, int p, BasisFamily family);

// Poisson problem data: -Laplace(u) = f on the domain, u = g on the boundary.
// exact/exact_grad may be empty; then error computation is unavailable.
struct PoissonCase {
  std::function<double(const Vec&)> f;
  std::function<double(const Vec&)> g;
  std::function<double(const Vec&)> exact;
  std::function<Vec(const Vec&)> exact_grad;
};

// u = prod_i sin(pi * scale_i * x_i), f = pi^2 (sum_i scale_i^2) u, g = trace of u.
PoissonCase manufactured_case(int dim, const Vec& scale = {1, 1, 1});
// f = 1, g = 0.
PoissonCase constant_case();

// Penalty on skeleton face `face`: c_sigma p^2 / h_K on boundary faces and
// c_sigma p^2 / min(h+, h-) on interior faces, with h the agglomerate diameter.
double penalty_sigma(const DgSpace& space, int face, double c_sigma);

struct DgSystem {
  CsrMatrix a;
  std::vector<double> b;
};

// Symmetric interior-penalty assembly over the fine sub-tessellation, with
// quadrature exactness 2p+1. Dirichlet data enters weakly through the boundary
// terms; no DoF is eliminated.
DgSystem assemble(const DgSpace& space, const PoissonCase& pc, double c_sigma = 10.0);

struct ErrorPair {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

// L2 and broken-H1-seminorm errors of the coefficient vector against the exact
// solution, integrated per fine cell with quadrature exactness 2p+2.
ErrorPair compute_errors(const DgSpace& space, const std::vector<double>& coeffs,
                         const PoissonCase& pc);

// u_h evaluated at the fine-cell centroids (cells inherit their agglomerate's
// polynomial).
std::vector<double> evaluate_at_cell_centers(const DgSpace& space,
                                             const std::vector<double>& coeffs);

// Legacy VTK of the fine mesh with cell data "u" = evaluate_at_cell_centers.
void write_solution_vtk(const DgSpace& space, const std::vector<double>& coeffs,
                        const std::string& path);

}  // namespace rtagg
