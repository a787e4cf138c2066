#include "rtagg/dg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rtagg/mesh.hpp"
#include "rtagg/quadrature.hpp"

namespace rtagg {

namespace {

bool simplex_cell(const BackgroundMesh& mesh, int c) {
  CellKind k = mesh.cells[c].kind;
  return k == CellKind::Tri || k == CellKind::Tet;
}

// Quadrature exactness needed to integrate the assembly integrands exactly on
// cell `c`. Tensor-product bases reach total degree dim*p, and the simplex
// rules are exact by total degree only (the box rules are per-axis exact), so
// tri/tet cells need a higher request than `base` when the family is Tensor.
// Under-integrating the volume term would break the penalty-coercivity balance
// and can make the assembled operator indefinite.
int cell_exactness(const BackgroundMesh& mesh, int c, int p, BasisFamily family, int base) {
  if (family == BasisFamily::Tensor && simplex_cell(mesh, c))
    return std::max(base, 2 * mesh.dim * p);
  return base;
}

// Faces take the stronger requirement of their two adjacent cells.
int face_exactness(const BackgroundMesh& mesh, int f, int p, BasisFamily family, int base) {
  const Face& face = mesh.faces[f];
  int e = cell_exactness(mesh, face.owner, p, family, base);
  if (face.neighbor >= 0)
    e = std::max(e, cell_exactness(mesh, face.neighbor, p, family, base));
  return e;
}

}  // namespace

DgSpace build_space(const PolytopalMesh& poly, int p, BasisFamily family) {
  if (poly.n_agglomerates() == 0) throw std::invalid_argument("cannot build a space on an empty mesh");
  DgSpace space;
  space.poly = &poly;
  space.p = p;
  space.family = family;
  const int dim = poly.fine->dim;
  space.basis.reserve(poly.n_agglomerates());
  space.offset.reserve(poly.n_agglomerates() + 1);
  space.offset.push_back(0);
  for (const Agglomerate& agg : poly.agglomerates) {
    space.basis.emplace_back(dim, p, family, agg.mbr);
    space.offset.push_back(space.offset.back() + space.basis.back().size());
  }
  return space;
}

PoissonCase manufactured_case(int dim, const Vec& scale) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("manufactured case needs dim 2 or 3");
  double lap = 0.0;
  for (int k = 0; k < dim; ++k) lap += scale[k] * scale[k];
  lap *= M_PI * M_PI;
  auto u = [dim, scale](const Vec& x) {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= std::sin(M_PI * scale[k] * x[k]);
    return v;
  };
  PoissonCase pc;
  pc.exact = u;
  pc.f = [lap, u](const Vec& x) { return lap * u(x); };
  pc.g = u;
  pc.exact_grad = [dim, scale](const Vec& x) {
    Vec g{0, 0, 0};
    for (int k = 0; k < dim; ++k) {
      double d = M_PI * scale[k] * std::cos(M_PI * scale[k] * x[k]);
      for (int m = 0; m < dim; ++m)
        if (m != k) d *= std::sin(M_PI * scale[m] * x[m]);
      g[k] = d;
    }
    return g;
  };
  return pc;
}

PoissonCase constant_case() {
  PoissonCase pc;
  pc.f = [](const Vec&) { return 1.0; };
  pc.g = [](const Vec&) { return 0.0; };
  return pc;
}

double penalty_sigma(const DgSpace& space, int face, double c_sigma) {
  const PolytopalMesh& poly = *space.poly;
  const PolytopalFace& pf = poly.faces[face];
  const double p2 = double(space.p) * space.p;
  const double h_in = poly.agglomerates[pf.inner].diameter;
  if (pf.outer < 0) return c_sigma * p2 / h_in;
  return c_sigma * p2 / std::min(h_in, poly.agglomerates[pf.outer].diameter);
}

DgSystem assemble(const DgSpace& space, const PoissonCase& pc, double c_sigma) {
  const PolytopalMesh& poly = *space.poly;
  const BackgroundMesh& mesh = *poly.fine;
  const int n = space.n_dofs();
  const int exactness = 2 * space.p + 1;

  std::vector<Triplet> trips;
  std::vector<double> rhs(n, 0.0);

  // Volume terms, accumulated into one dense block per agglomerate.
  std::vector<double> vals;
  std::vector<Vec> grads;
  for (int a = 0; a < poly.n_agglomerates(); ++a) {
    const BoxBasis& basis = space.basis[a];
    const int nb = basis.size();
    const int off = space.offset[a];
    std::vector<double> block(std::size_t(nb) * nb, 0.0);
    for (int c : poly.agglomerates[a].cells) {
      QuadratureRule rule =
          cell_quadrature(mesh, c, cell_exactness(mesh, c, space.p, space.family, exactness));
      for (int q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q];
        basis.eval(rule.points[q], vals, grads);
        const double fw = w * pc.f(rule.points[q]);
        for (int i = 0; i < nb; ++i) {
          rhs[off + i] += fw * vals[i];
          for (int j = 0; j < nb; ++j) block[i * nb + j] += w * dot(grads[i], grads[j]);
        }
      }
    }
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) trips.push_back({off + i, off + j, block[i * nb + j]});
  }

  // Skeleton terms: one fine face at a time, with the normal oriented from the
  // lower (inner) to the higher (outer) agglomerate id, outward on the boundary.
  std::vector<double> vin, vout;
  std::vector<Vec> gin, gout;
  for (std::size_t fi = 0; fi < poly.faces.size(); ++fi) {
    const PolytopalFace& pf = poly.faces[fi];
    QuadratureRule rule = face_quadrature(
        mesh, pf.fine_face,
        face_exactness(mesh, pf.fine_face, space.p, space.family, exactness));
    const Vec normal = poly.face_normal(int(fi));
    const double sigma = penalty_sigma(space, int(fi), c_sigma);
    const BoxBasis& b_in = space.basis[pf.inner];
    const int n_in = b_in.size();
    const int off_in = space.offset[pf.inner];

    if (pf.outer < 0) {  // boundary face: one-sided average, jump = trace
      std::vector<double> block(std::size_t(n_in) * n_in, 0.0);
      for (int q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q];
        b_in.eval(rule.points[q], vin, gin);
        const double gw = w * pc.g(rule.points[q]);
        for (int i = 0; i < n_in; ++i) {
          const double gn_i = dot(gin[i], normal);
          rhs[off_in + i] += gw * (sigma * vin[i] - gn_i);
          for (int j = 0; j < n_in; ++j) {
            const double gn_j = dot(gin[j], normal);
            block[i * n_in + j] +=
                w * (-gn_j * vin[i] - gn_i * vin[j] + sigma * vin[i] * vin[j]);
          }
        }
      }
      for (int i = 0; i < n_in; ++i)
        for (int j = 0; j < n_in; ++j)
          trips.push_back({off_in + i, off_in + j, block[i * n_in + j]});
      continue;
    }

    const BoxBasis& b_out = space.basis[pf.outer];
    const int n_out = b_out.size();
    const int off_out = space.offset[pf.outer];
    // four dense blocks: (test side, trial side) over {in, out}
    std::vector<double> bii(std::size_t(n_in) * n_in, 0.0), bio(std::size_t(n_in) * n_out, 0.0);
    std::vector<double> boi(std::size_t(n_out) * n_in, 0.0), boo(std::size_t(n_out) * n_out, 0.0);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q];
      b_in.eval(rule.points[q], vin, gin);
      b_out.eval(rule.points[q], vout, gout);
      // jump sign: +1 on the inner side, -1 on the outer side
      for (int i = 0; i < n_in; ++i) {
        const double gni = dot(gin[i], normal);
        for (int j = 0; j < n_in; ++j)
          bii[i * n_in + j] += w * (-0.5 * dot(gin[j], normal) * vin[i] -
                                    0.5 * gni * vin[j] + sigma * vin[j] * vin[i]);
        for (int j = 0; j < n_out; ++j)
          bio[i * n_out + j] += w * (-0.5 * dot(gout[j], normal) * vin[i] +
                                     0.5 * gni * vout[j] - sigma * vout[j] * vin[i]);
      }
      for (int i = 0; i < n_out; ++i) {
        const double gni = dot(gout[i], normal);
        for (int j = 0; j < n_in; ++j)
          boi[i * n_in + j] += w * (0.5 * dot(gin[j], normal) * vout[i] -
                                    0.5 * gni * vin[j] - sigma * vin[j] * vout[i]);
        for (int j = 0; j < n_out; ++j)
          boo[i * n_out + j] += w * (0.5 * dot(gout[j], normal) * vout[i] +
                                     0.5 * gni * vout[j] + sigma * vout[j] * vout[i]);
      }
    }
    for (int i = 0; i < n_in; ++i) {
      for (int j = 0; j < n_in; ++j) trips.push_back({off_in + i, off_in + j, bii[i * n_in + j]});
      for (int j = 0; j < n_out; ++j)
        trips.push_back({off_in + i, off_out + j, bio[i * n_out + j]});
    }
    for (int i = 0; i < n_out; ++i) {
      for (int j = 0; j < n_in; ++j) trips.push_back({off_out + i, off_in + j, boi[i * n_in + j]});
      for (int j = 0; j < n_out; ++j)
        trips.push_back({off_out + i, off_out + j, boo[i * n_out + j]});
    }
  }

  DgSystem sys;
  sys.a = CsrMatrix::from_triplets(n, n, std::move(trips));
  sys.b = std::move(rhs);
  return sys;
}

ErrorPair compute_errors(const DgSpace& space, const std::vector<double>& coeffs,
                         const PoissonCase& pc) {
  if (int(coeffs.size()) != space.n_dofs())
    throw std::invalid_argument("coefficient vector length mismatch");
  if (!pc.exact || !pc.exact_grad)
    throw std::invalid_argument("error computation needs an exact solution");
  const PolytopalMesh& poly = *space.poly;
  const BackgroundMesh& mesh = *poly.fine;
  const int exactness = 2 * space.p + 2;
  double l2 = 0.0, h1 = 0.0;
  std::vector<double> vals;
  std::vector<Vec> grads;
  for (int a = 0; a < poly.n_agglomerates(); ++a) {
    const BoxBasis& basis = space.basis[a];
    const int nb = basis.size();
    const int off = space.offset[a];
    for (int c : poly.agglomerates[a].cells) {
      QuadratureRule rule =
          cell_quadrature(mesh, c, cell_exactness(mesh, c, space.p, space.family, exactness));
      for (int q = 0; q < rule.size(); ++q) {
        basis.eval(rule.points[q], vals, grads);
        double uh = 0.0;
        Vec guh{0, 0, 0};
        for (int i = 0; i < nb; ++i) {
          uh += coeffs[off + i] * vals[i];
          guh = guh + coeffs[off + i] * grads[i];
        }
        const double du = uh - pc.exact(rule.points[q]);
        const Vec dg = guh - pc.exact_grad(rule.points[q]);
        l2 += rule.weights[q] * du * du;
        h1 += rule.weights[q] * dot(dg, dg);
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

std::vector<double> evaluate_at_cell_centers(const DgSpace& space,
                                             const std::vector<double>& coeffs) {
  const PolytopalMesh& poly = *space.poly;
  const BackgroundMesh& mesh = *poly.fine;
  std::vector<double> out(mesh.n_cells(), 0.0);
  std::vector<double> vals;
  std::vector<Vec> grads;
  for (int a = 0; a < poly.n_agglomerates(); ++a) {
    const BoxBasis& basis = space.basis[a];
    const int off = space.offset[a];
    for (int c : poly.agglomerates[a].cells) {
      basis.eval(mesh.cell_centroid(c), vals, grads);
      double uh = 0.0;
      for (int i = 0; i < basis.size(); ++i) uh += coeffs[off + i] * vals[i];
      out[c] = uh;
    }
  }
  return out;
}

void write_solution_vtk(const DgSpace& space, const std::vector<double>& coeffs,
                        const std::string& path) {
  write_vtk(*space.poly->fine, path, {{"u", evaluate_at_cell_centers(space, coeffs)}});
}

}  // namespace rtagg
