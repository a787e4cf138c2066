#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "rtagg/dg.hpp"

namespace rtagg {

struct ChebyshevParams {
  int degree = 5;
  int steps = 10;
  int lanczos_iters = 20;
  double interval_divisor = 15.0;  // smoothing interval lower edge: lambda_max / divisor
  double safety = 1.1;             // smoothing interval upper edge: safety * lambda_max
};

// Prolongation (natural injection) from the coarse space into the fine space as
// an n_fine x n_coarse block matrix; parent_of maps each fine agglomerate to its
// containing coarse agglomerate. Exact because the spaces are nested: tensor
// bases transfer by evaluation at the fine Lagrange nodes, total-degree bases by
// quadrature projection onto the (orthonormal) fine basis. Throws on mismatched
// degree/family or a pairing whose boxes are not nested.
CsrMatrix build_injection(const DgSpace& coarse, const DgSpace& fine,
                          const std::vector<int>& parent_of);

// Largest Ritz value of D^{-1/2} A D^{-1/2} after `iters` Lanczos iterations
// (no reorthogonalization) from a seeded pseudo-random start vector;
// deterministic. Throws on a non-positive diagonal entry.
double lanczos_lambda_max(const CsrMatrix& a, const std::vector<double>& diag,
                          int iters = 20, std::uint64_t seed = 0x72747265655f6d67ull);

// `steps` successive degree-`degree` Chebyshev iterations for A x = b on the
// Jacobi-scaled operator, damping residual components with D^{-1}A-eigenvalues
// in [lo, hi]; x is updated in place. With x = 0 on entry the map b -> x is a
// fixed symmetric polynomial in D^{-1}A times D^{-1}. Throws on an empty
// interval or a non-positive diagonal entry.
void chebyshev_smooth(const CsrMatrix& a, const std::vector<double>& diag,
                      const std::vector<double>& b, std::vector<double>& x,
                      double lo, double hi, int degree = 5, int steps = 10);

// One level of the multigrid hierarchy. Owns its polytopal mesh (the space and
// matrices reference it); the background mesh is shared and owned by the caller.
struct MgLevel {
  std::unique_ptr<PolytopalMesh> poly;
  DgSpace space;
  CsrMatrix a;
  std::vector<double> diag;
  double lambda_max = 0.0;  // Lanczos estimate on the Jacobi-scaled operator
  CsrMatrix p;              // prolongation from the next-coarser level (empty on the coarsest)
};

// Geometric multigrid ladder on the finest `n_levels` partitions of an
// agglomerate hierarchy; level 0 is the fine mesh. Move-only; immutable after
// build.
class MgHierarchy {
 public:
  std::vector<std::unique_ptr<MgLevel>> levels;  // finest first
  ChebyshevParams smoother;
  CholeskyFactor coarse_factor;
  std::vector<double> fine_rhs;  // load vector assembled on the finest level
  bool degenerate = false;       // built with a single level: direct solve only

  int n_levels() const { return int(levels.size()); }
  const CsrMatrix& fine_matrix() const { return levels.front()->a; }

  // One V-cycle applied to b with zero initial guess: pre-smooth, restrict the
  // residual by P^T, recurse, prolong the correction by P, post-smooth; direct
  // solve on the coarsest level. A fixed symmetric positive definite operator.
  std::vector<double> v_cycle(const std::vector<double>& b) const;

 private:
  void cycle(std::size_t l, const std::vector<double>& b, std::vector<double>& x) const;
};

// Builds the ladder: per-level polytopal meshes from hierarchy levels
// 0..n_levels-1, independently assembled operators (same p, family, penalty
// scaling on each level's own element diameters), injection transfers,
// Lanczos eigenvalue estimates, and the coarse factorization. n_levels = 1 is
// allowed (flagged `degenerate`). `mesh` must outlive the result.
MgHierarchy build_mg(const BackgroundMesh& mesh, const AgglomerateHierarchy& hier,
                     int n_levels, int p, BasisFamily family, const PoissonCase& pc,
                     double c_sigma = 10.0, const ChebyshevParams& smoother = {});

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  // ||r_k||_2 history, starting at ||r_0||
};

using LinearOperator = std::function<std::vector<double>(const std::vector<double>&)>;

// Preconditioned conjugate gradients from x = 0, stopping when
// ||r_k||_2 <= max(abstol, reltol * ||r_0||_2). Pass a null preconditioner for
// plain CG. Non-convergence within maxit returns converged = false with the
// full residual history; indefiniteness (p^T A p <= 0) throws.
SolveResult pcg(const CsrMatrix& a, const std::vector<double>& b,
                const LinearOperator& precond = nullptr, double abstol = 1e-12,
                double reltol = 1e-9, int maxit = 20000);

}  // namespace rtagg
