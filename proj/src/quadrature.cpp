#include "rtagg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace rtagg {

namespace {

// Legendre P_n and its derivative at x, by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 1; k < n; ++k) {
    double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

int points_for(int exactness) { return std::max(1, (exactness + 2) / 2); }

// Map a [-1,1] rule to [0,1].
void unit_interval_rule(int n, std::vector<double>& t, std::vector<double>& w) {
  gauss_legendre_1d(n, t, w);
  for (int i = 0; i < n; ++i) {
    t[i] = 0.5 * (t[i] + 1.0);
    w[i] *= 0.5;
  }
}

}  // namespace

void gauss_legendre_1d(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_1d: need n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 1;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    // roots come out in descending order for ascending i
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

std::vector<double> gauss_lobatto_nodes(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_nodes: need n >= 2");
  std::vector<double> t(n);
  t.front() = -1.0;
  t.back() = 1.0;
  const int m = n - 1;  // interior nodes are the roots of P'_m
  for (int i = 1; i < m; ++i) {
    double x = std::cos(M_PI * i / m);  // Chebyshev-Lobatto initial guess
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(m, x, p, dp);
      // P''_m from the Legendre differential equation
      double ddp = (2.0 * x * dp - m * (m + 1) * p) / (1.0 - x * x);
      double dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    t[m - i] = x;  // descending guesses fill ascending slots
  }
  if (n % 2 == 1) t[n / 2] = 0.0;
  return t;
}

namespace {

QuadratureRule quad_cell_rule(const BackgroundMesh& mesh, const Cell& cell, int n) {
  std::vector<double> t, w;
  gauss_legendre_1d(n, t, w);
  const Vec& a = mesh.vertices[cell.v[0]];
  const Vec& b = mesh.vertices[cell.v[1]];
  const Vec& c = mesh.vertices[cell.v[2]];
  const Vec& d = mesh.vertices[cell.v[3]];
  QuadratureRule rule;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double xi = t[i], eta = t[j];
      const double na = 0.25 * (1 - xi) * (1 - eta), nb = 0.25 * (1 + xi) * (1 - eta);
      const double nc = 0.25 * (1 + xi) * (1 + eta), nd = 0.25 * (1 - xi) * (1 + eta);
      Vec x = na * a + nb * b + nc * c + nd * d;
      // d/dxi and d/deta of the bilinear map
      Vec xu = 0.25 * ((1 - eta) * (b - a) + (1 + eta) * (c - d));
      Vec xv = 0.25 * ((1 - xi) * (d - a) + (1 + xi) * (c - b));
      const double jac = xu[0] * xv[1] - xu[1] * xv[0];
      rule.points.push_back(x);
      rule.weights.push_back(w[i] * w[j] * std::abs(jac));
    }
  return rule;
}

QuadratureRule hex_cell_rule(const BackgroundMesh& mesh, const Cell& cell, int n) {
  std::vector<double> t, w;
  gauss_legendre_1d(n, t, w);
  const Vec* v[8];
  for (int i = 0; i < 8; ++i) v[i] = &mesh.vertices[cell.v[i]];
  // reference coordinates of the 8 vertices (bottom ring then top ring)
  static const double R[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                 {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
  QuadratureRule rule;
  rule.points.reserve(n * n * n);
  rule.weights.reserve(n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double xi[3] = {t[i], t[j], t[k]};
        Vec x{0, 0, 0}, dx0{0, 0, 0}, dx1{0, 0, 0}, dx2{0, 0, 0};
        for (int m = 0; m < 8; ++m) {
          const double f0 = 1 + R[m][0] * xi[0];
          const double f1 = 1 + R[m][1] * xi[1];
          const double f2 = 1 + R[m][2] * xi[2];
          const double s = 0.125;
          x = x + (s * f0 * f1 * f2) * (*v[m]);
          dx0 = dx0 + (s * R[m][0] * f1 * f2) * (*v[m]);
          dx1 = dx1 + (s * f0 * R[m][1] * f2) * (*v[m]);
          dx2 = dx2 + (s * f0 * f1 * R[m][2]) * (*v[m]);
        }
        const double jac = dot(dx0, cross(dx1, dx2));
        rule.points.push_back(x);
        rule.weights.push_back(w[i] * w[j] * w[k] * std::abs(jac));
      }
  return rule;
}

// Collapsed-coordinate rule over the triangle (a,b,c); the u direction carries
// the extra (1-u) Jacobian factor, so it gets one more point.
QuadratureRule tri_rule(const Vec& a, const Vec& b, const Vec& c, int n) {
  std::vector<double> tu, wu, tv, wv;
  unit_interval_rule(n + 1, tu, wu);
  unit_interval_rule(n, tv, wv);
  const Vec ab = b - a, ac = c - a;
  const double twice_area = norm(cross(ab, ac));
  QuadratureRule rule;
  for (std::size_t i = 0; i < tu.size(); ++i)
    for (std::size_t j = 0; j < tv.size(); ++j) {
      const double u = tu[i], v = tv[j];
      const double l1 = u, l2 = v * (1 - u);
      rule.points.push_back(a + l1 * ab + l2 * ac);
      rule.weights.push_back(wu[i] * wv[j] * twice_area * (1 - u));
    }
  return rule;
}

QuadratureRule tet_rule(const Vec& a, const Vec& b, const Vec& c, const Vec& d, int n) {
  std::vector<double> tu, wu, tv, wv, tw, ww;
  unit_interval_rule(n + 2, tu, wu);
  unit_interval_rule(n + 1, tv, wv);
  unit_interval_rule(n, tw, ww);
  const Vec ab = b - a, ac = c - a, ad = d - a;
  const double six_vol = std::abs(dot(ab, cross(ac, ad)));
  QuadratureRule rule;
  for (std::size_t i = 0; i < tu.size(); ++i)
    for (std::size_t j = 0; j < tv.size(); ++j)
      for (std::size_t k = 0; k < tw.size(); ++k) {
        const double u = tu[i], v = tv[j], w = tw[k];
        const double l1 = u, l2 = v * (1 - u), l3 = w * (1 - u) * (1 - v);
        rule.points.push_back(a + l1 * ab + l2 * ac + l3 * ad);
        rule.weights.push_back(wu[i] * wv[j] * ww[k] * six_vol * (1 - u) * (1 - u) * (1 - v));
      }
  return rule;
}

}  // namespace

QuadratureRule cell_quadrature(const BackgroundMesh& mesh, int c, int exactness) {
  if (c < 0 || c >= mesh.n_cells()) throw std::invalid_argument("cell index out of range");
  const Cell& cell = mesh.cells[c];
  const int n = points_for(exactness);
  auto P = [&](int i) -> const Vec& { return mesh.vertices[cell.v[i]]; };
  switch (cell.kind) {
    case CellKind::Quad:
      return quad_cell_rule(mesh, cell, n);
    case CellKind::Hex:
      return hex_cell_rule(mesh, cell, n);
    case CellKind::Tri:
      return tri_rule(P(0), P(1), P(2), n);
    case CellKind::Tet:
      return tet_rule(P(0), P(1), P(2), P(3), n);
  }
  throw std::invalid_argument("unsupported cell kind");
}

QuadratureRule face_quadrature(const BackgroundMesh& mesh, int f, int exactness) {
  if (f < 0 || f >= int(mesh.faces.size())) throw std::invalid_argument("face index out of range");
  const Face& face = mesh.faces[f];
  const int n = points_for(exactness);
  QuadratureRule rule;
  if (mesh.dim == 2) {
    const Vec& a = mesh.vertices[face.v[0]];
    const Vec& b = mesh.vertices[face.v[1]];
    std::vector<double> t, w;
    gauss_legendre_1d(n, t, w);
    const double half_len = 0.5 * distance(a, b);
    for (int i = 0; i < n; ++i) {
      rule.points.push_back(0.5 * ((1 - t[i]) * a + (1 + t[i]) * b));
      rule.weights.push_back(w[i] * half_len);
    }
    return rule;
  }
  if (face.n_vertices == 3)
    return tri_rule(mesh.vertices[face.v[0]], mesh.vertices[face.v[1]], mesh.vertices[face.v[2]],
                    n);
  // bilinear quad face embedded in 3D: pointwise surface Jacobian
  const Vec& a = mesh.vertices[face.v[0]];
  const Vec& b = mesh.vertices[face.v[1]];
  const Vec& c = mesh.vertices[face.v[2]];
  const Vec& d = mesh.vertices[face.v[3]];
  std::vector<double> t, w;
  gauss_legendre_1d(n, t, w);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double xi = t[i], eta = t[j];
      const double na = 0.25 * (1 - xi) * (1 - eta), nb = 0.25 * (1 + xi) * (1 - eta);
      const double nc = 0.25 * (1 + xi) * (1 + eta), nd = 0.25 * (1 - xi) * (1 + eta);
      Vec x = na * a + nb * b + nc * c + nd * d;
      Vec xu = 0.25 * ((1 - eta) * (b - a) + (1 + eta) * (c - d));
      Vec xv = 0.25 * ((1 - xi) * (d - a) + (1 + xi) * (c - b));
      rule.points.push_back(x);
      rule.weights.push_back(w[i] * w[j] * norm(cross(xu, xv)));
    }
  return rule;
}

}  // namespace rtagg
