#include "rtagg/multigrid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "rtagg/mesh.hpp"
#include "rtagg/quadrature.hpp"

namespace rtagg {

namespace {

// Dense transfer block for one coarse/fine agglomerate pair: the coarse
// polynomial's coefficients in the fine basis, column-major over coarse dofs.
void injection_block(const BoxBasis& coarse, const BoxBasis& fine,
                     std::vector<double>& block) {
  const int nf = fine.size();
  const int nc = coarse.size();
  block.assign(std::size_t(nf) * nc, 0.0);
  std::vector<double> vals;
  std::vector<Vec> grads;
  if (fine.family() == BasisFamily::Tensor) {
    // Nodal basis: coefficients are point values at the fine Lagrange nodes.
    const std::vector<Vec> nodes = fine.nodes();
    for (int i = 0; i < nf; ++i) {
      coarse.eval(nodes[i], vals, grads);
      for (int j = 0; j < nc; ++j) block[std::size_t(i) * nc + j] = vals[j];
    }
    return;
  }
  // Orthonormal basis w.r.t. (2^d/|box|) dx on the fine box, so coefficients are
  // scaled inner products; mapping the integral onto the reference cube cancels
  // the scaling exactly, leaving plain [-1,1]^d tensor-Gauss weights. p+1 points
  // per axis integrate the degree-2p-per-axis integrand exactly.
  const int dim = fine.dim();
  const Aabb& box = fine.box();
  const int n1 = fine.degree() + 1;
  std::vector<double> gx, gw;
  gauss_legendre_1d(n1, gx, gw);
  std::vector<double> fvals;
  int nq = 1;
  for (int k = 0; k < dim; ++k) nq *= n1;
  for (int q = 0; q < nq; ++q) {
    Vec x{0, 0, 0};
    double w = 1.0;
    int rem = q;
    for (int k = 0; k < dim; ++k) {
      const int ik = rem % n1;
      rem /= n1;
      x[k] = 0.5 * ((1.0 - gx[ik]) * box.lo[k] + (1.0 + gx[ik]) * box.hi[k]);
      w *= gw[ik];
    }
    fine.eval(x, fvals, grads);
    coarse.eval(x, vals, grads);
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nc; ++j) block[std::size_t(i) * nc + j] += w * fvals[i] * vals[j];
  }
}

std::vector<double> residual(const CsrMatrix& a, const std::vector<double>& b,
                             const std::vector<double>& x) {
  std::vector<double> r = a.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

}  // namespace

CsrMatrix build_injection(const DgSpace& coarse, const DgSpace& fine,
                          const std::vector<int>& parent_of) {
  if (coarse.p != fine.p || coarse.family != fine.family)
    throw std::invalid_argument("injection needs matching degree and basis family");
  const int n_fine = fine.poly->n_agglomerates();
  if (int(parent_of.size()) != n_fine)
    throw std::invalid_argument("parent map size does not match the fine mesh");
  const int dim = fine.poly->fine->dim;
  std::vector<Triplet> trips;
  std::vector<double> block;
  for (int f = 0; f < n_fine; ++f) {
    const int c = parent_of[f];
    if (c < 0 || c >= coarse.poly->n_agglomerates())
      throw std::invalid_argument("parent map entry out of range");
    const Aabb& cbox = coarse.basis[c].box();
    const Aabb& fbox = fine.basis[f].box();
    double scale = 0.0;
    for (int k = 0; k < dim; ++k) scale = std::max(scale, cbox.hi[k] - cbox.lo[k]);
    if (!cbox.contains(fbox, dim, 1e-9 * (1.0 + scale)))
      throw std::invalid_argument("agglomerate " + std::to_string(f) +
                                  " is not nested in its mapped parent");
    injection_block(coarse.basis[c], fine.basis[f], block);
    const int nf = fine.basis[f].size();
    const int nc = coarse.basis[c].size();
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nc; ++j)
        trips.push_back({fine.offset[f] + i, coarse.offset[c] + j,
                         block[std::size_t(i) * nc + j]});
  }
  return CsrMatrix::from_triplets(fine.n_dofs(), coarse.n_dofs(), std::move(trips));
}

double lanczos_lambda_max(const CsrMatrix& a, const std::vector<double>& diag,
                          int iters, std::uint64_t seed) {
  const int n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("Lanczos needs a square matrix");
  if (int(diag.size()) != n) throw std::invalid_argument("diagonal size mismatch");
  std::vector<double> dis(n);  // D^{-1/2}
  for (int i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0)) throw std::invalid_argument("non-positive diagonal entry");
    dis[i] = 1.0 / std::sqrt(diag[i]);
  }
  const int m = std::min(iters, n);
  SplitMix64 rng{seed};
  std::vector<double> v(n), v_prev(n, 0.0), w(n), tmp(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_symmetric();
  scale(1.0 / norm2(v), v);

  std::vector<double> alpha, beta;
  for (int j = 0; j < m; ++j) {
    // w = D^{-1/2} A D^{-1/2} v
    for (int i = 0; i < n; ++i) tmp[i] = dis[i] * v[i];
    a.matvec(tmp, w);
    for (int i = 0; i < n; ++i) w[i] *= dis[i];
    if (j > 0) axpy(-beta.back(), v_prev, w);
    const double aj = dot(w, v);
    alpha.push_back(aj);
    axpy(-aj, v, w);
    const double bj = norm2(w);
    if (bj < 1e-13) break;  // invariant subspace: Ritz values are exact
    beta.push_back(bj);
    v_prev = v;
    for (int i = 0; i < n; ++i) v[i] = w[i] / bj;
  }

  const int k = int(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

void chebyshev_smooth(const CsrMatrix& a, const std::vector<double>& diag,
                      const std::vector<double>& b, std::vector<double>& x,
                      double lo, double hi, int degree, int steps) {
  const int n = a.rows();
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("empty smoothing interval");
  if (degree < 1 || steps < 1) throw std::invalid_argument("degree and steps must be positive");
  std::vector<double> dinv(n);
  for (int i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0)) throw std::invalid_argument("non-positive diagonal entry");
    dinv[i] = 1.0 / diag[i];
  }
  const double theta = 0.5 * (hi + lo);
  const double delta = 0.5 * (hi - lo);
  const double sigma1 = theta / delta;
  std::vector<double> r(n), d(n), ad(n);
  for (int s = 0; s < steps; ++s) {
    r = residual(a, b, x);
    double rho = 1.0 / sigma1;
    for (int i = 0; i < n; ++i) d[i] = dinv[i] * r[i] / theta;
    for (int k = 0; k < degree; ++k) {
      axpy(1.0, d, x);
      if (k + 1 == degree) break;
      a.matvec(d, ad);
      axpy(-1.0, ad, r);
      const double rho_next = 1.0 / (2.0 * sigma1 - rho);
      for (int i = 0; i < n; ++i)
        d[i] = rho_next * rho * d[i] + 2.0 * rho_next / delta * dinv[i] * r[i];
      rho = rho_next;
    }
  }
}

std::vector<double> MgHierarchy::v_cycle(const std::vector<double>& b) const {
  if (levels.empty()) throw std::logic_error("v_cycle on an empty hierarchy");
  if (int(b.size()) != levels.front()->a.rows())
    throw std::invalid_argument("v_cycle size mismatch");
  std::vector<double> x(b.size(), 0.0);
  cycle(0, b, x);
  return x;
}

void MgHierarchy::cycle(std::size_t l, const std::vector<double>& b,
                        std::vector<double>& x) const {
  const MgLevel& lev = *levels[l];
  if (lev.a.nnz() == 0) throw std::logic_error("v_cycle hit an unassembled level");
  if (l + 1 == levels.size()) {
    x = coarse_factor.solve(b);
    return;
  }
  const double hi = smoother.safety * lev.lambda_max;
  const double lo = lev.lambda_max / smoother.interval_divisor;
  chebyshev_smooth(lev.a, lev.diag, b, x, lo, hi, smoother.degree, smoother.steps);
  const std::vector<double> bc = lev.p.apply_transpose(residual(lev.a, b, x));
  std::vector<double> xc(bc.size(), 0.0);
  cycle(l + 1, bc, xc);
  axpy(1.0, lev.p.apply(xc), x);
  chebyshev_smooth(lev.a, lev.diag, b, x, lo, hi, smoother.degree, smoother.steps);
}

MgHierarchy build_mg(const BackgroundMesh& mesh, const AgglomerateHierarchy& hier,
                     int n_levels, int p, BasisFamily family, const PoissonCase& pc,
                     double c_sigma, const ChebyshevParams& smoother) {
  if (n_levels < 1) throw std::invalid_argument("n_levels must be at least 1");
  if (n_levels > hier.n_levels())
    throw std::invalid_argument("hierarchy has only " + std::to_string(hier.n_levels()) +
                                " levels, " + std::to_string(n_levels) + " requested");
  MgHierarchy mg;
  mg.smoother = smoother;
  mg.degenerate = n_levels < 2;
  for (int l = 0; l < n_levels; ++l) {
    auto lev = std::make_unique<MgLevel>();
    lev->poly = std::make_unique<PolytopalMesh>(build_polytopal_mesh(mesh, hier.levels[l]));
    lev->space = build_space(*lev->poly, p, family);
    DgSystem sys = assemble(lev->space, pc, c_sigma);
    lev->a = std::move(sys.a);
    if (l == 0) mg.fine_rhs = std::move(sys.b);
    lev->diag = lev->a.diagonal();
    mg.levels.push_back(std::move(lev));
  }
  for (int l = 0; l + 1 < n_levels; ++l) {
    mg.levels[l]->lambda_max = lanczos_lambda_max(mg.levels[l]->a, mg.levels[l]->diag,
                                                  smoother.lanczos_iters);
    mg.levels[l]->p =
        build_injection(mg.levels[l + 1]->space, mg.levels[l]->space, hier.parents[l]);
  }
  if (!mg.coarse_factor.factor(mg.levels.back()->a))
    throw std::runtime_error("coarse-level matrix is not positive definite");
  return mg;
}

SolveResult pcg(const CsrMatrix& a, const std::vector<double>& b,
                const LinearOperator& precond, double abstol, double reltol, int maxit) {
  const int n = a.rows();
  if (int(b.size()) != n) throw std::invalid_argument("pcg size mismatch");
  SolveResult out;
  out.x.assign(n, 0.0);
  std::vector<double> r = b;
  const double res0 = norm2(r);
  out.residuals.push_back(res0);
  const double tol = std::max(abstol, reltol * res0);
  if (res0 <= tol) {
    out.converged = true;
    return out;
  }
  std::vector<double> z = precond ? precond(r) : r;
  std::vector<double> d = z;
  std::vector<double> ad(n);
  double rz = dot(r, z);
  for (int it = 1; it <= maxit; ++it) {
    a.matvec(d, ad);
    const double dad = dot(d, ad);
    if (dad <= 0.0) throw std::runtime_error("conjugate-gradient breakdown: p^T A p <= 0");
    const double alpha = rz / dad;
    axpy(alpha, d, out.x);
    axpy(-alpha, ad, r);
    const double res = norm2(r);
    out.residuals.push_back(res);
    out.iterations = it;
    if (res <= tol) {
      out.converged = true;
      return out;
    }
    z = precond ? precond(r) : r;
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (int i = 0; i < n; ++i) d[i] = z[i] + beta * d[i];
  }
  return out;
}

}  // namespace rtagg
