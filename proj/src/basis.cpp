#include "rtagg/basis.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "rtagg/quadrature.hpp"

namespace rtagg {

namespace {

// Graded lexicographic exponent tuples with |alpha| <= p over `dim` variables.
std::vector<std::array<int, 3>> graded_exponents(int dim, int p) {
  std::vector<std::array<int, 3>> out;
  for (int deg = 0; deg <= p; ++deg) {
    if (dim == 2) {
      for (int i = deg; i >= 0; --i) out.push_back({i, deg - i, 0});
    } else {
      for (int i = deg; i >= 0; --i)
        for (int j = deg - i; j >= 0; --j) out.push_back({i, j, deg - i - j});
    }
  }
  return out;
}

// All p+1 Lagrange values and derivatives on nodes t at coordinate xi, by exact
// product-rule accumulation (stable at and away from the nodes).
void lagrange_1d(const std::vector<double>& t, double xi, std::vector<double>& val,
                 std::vector<double>& der) {
  const int n = int(t.size());
  val.assign(n, 1.0);
  der.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double v = 1.0, d = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const double inv = 1.0 / (t[j] - t[k]);
      const double f = (xi - t[k]) * inv;
      d = d * f + v * inv;
      v *= f;
    }
    val[j] = v;
    der[j] = d;
  }
}

}  // namespace

int basis_local_dim(int dim, int p, BasisFamily family) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("basis dimension must be 2 or 3");
  if (p < 1) throw std::invalid_argument("basis degree must be >= 1");
  if (family == BasisFamily::Tensor) {
    int n = 1;
    for (int k = 0; k < dim; ++k) n *= p + 1;
    return n;
  }
  // C(p+d, d)
  return dim == 2 ? (p + 1) * (p + 2) / 2 : (p + 1) * (p + 2) * (p + 3) / 6;
}

BoxBasis::BoxBasis(int dim, int p, BasisFamily family, const Aabb& box)
    : dim_(dim), p_(p), n_(basis_local_dim(dim, p, family)), family_(family), box_(box) {
  if (!box.valid()) throw std::invalid_argument("basis box is invalid");
  for (int k = 0; k < dim_; ++k)
    if (!(box.hi[k] > box.lo[k])) throw std::invalid_argument("basis box is degenerate");

  if (family_ == BasisFamily::Tensor) {
    nodes_1d_ = gauss_lobatto_nodes(p_ + 1);
    return;
  }

  // P_p: Gram matrix of the graded monomials over [-1,1]^d factors over axes
  // into 1D moments; box-independent, so conditioning is uniform across
  // agglomerates. The basis is the Cholesky-inverse combination of monomials.
  expo_ = graded_exponents(dim_, p_);
  Eigen::MatrixXd gram(n_, n_);
  auto moment = [](int a) { return a % 2 == 0 ? 2.0 / (a + 1) : 0.0; };
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      double g = 1.0;
      for (int k = 0; k < dim_; ++k) g *= moment(expo_[i][k] + expo_[j][k]);
      gram(i, j) = g;
    }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("monomial Gram matrix is not positive definite");
  Eigen::MatrixXd inv_l =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(n_, n_));  // L^{-1}, lower triangular
  transform_.assign(n_ * n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j <= i; ++j) transform_[i * n_ + j] = inv_l(i, j);
}

void BoxBasis::eval(const Vec& x, std::vector<double>& values, std::vector<Vec>& gradients) const {
  values.assign(n_, 0.0);
  gradients.assign(n_, Vec{0, 0, 0});
  // box-normalized coordinates and chain factors
  double xi[3] = {0, 0, 0}, chain[3] = {0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    const double ext = box_.hi[k] - box_.lo[k];
    xi[k] = (2.0 * x[k] - box_.lo[k] - box_.hi[k]) / ext;
    chain[k] = 2.0 / ext;
  }

  if (family_ == BasisFamily::Tensor) {
    std::vector<double> val[3], der[3];
    for (int k = 0; k < dim_; ++k) lagrange_1d(nodes_1d_, xi[k], val[k], der[k]);
    const int q = p_ + 1;
    int idx = 0;
    if (dim_ == 2) {
      for (int j = 0; j < q; ++j)
        for (int i = 0; i < q; ++i, ++idx) {
          values[idx] = val[0][i] * val[1][j];
          gradients[idx] = {der[0][i] * val[1][j] * chain[0], val[0][i] * der[1][j] * chain[1],
                            0.0};
        }
    } else {
      for (int k = 0; k < q; ++k)
        for (int j = 0; j < q; ++j)
          for (int i = 0; i < q; ++i, ++idx) {
            values[idx] = val[0][i] * val[1][j] * val[2][k];
            gradients[idx] = {der[0][i] * val[1][j] * val[2][k] * chain[0],
                              val[0][i] * der[1][j] * val[2][k] * chain[1],
                              val[0][i] * val[1][j] * der[2][k] * chain[2]};
          }
    }
    return;
  }

  // monomial values/derivatives per axis, then the triangular combination
  std::vector<double> pow_val[3], pow_der[3];
  for (int k = 0; k < dim_; ++k) {
    pow_val[k].assign(p_ + 1, 1.0);
    pow_der[k].assign(p_ + 1, 0.0);
    for (int e = 1; e <= p_; ++e) {
      pow_val[k][e] = pow_val[k][e - 1] * xi[k];
      pow_der[k][e] = pow_val[k][e - 1] * e;
    }
  }
  std::vector<double> mono(n_), dmono(n_ * 3, 0.0);
  for (int j = 0; j < n_; ++j) {
    const auto& e = expo_[j];
    double v = 1.0;
    for (int k = 0; k < dim_; ++k) v *= pow_val[k][e[k]];
    mono[j] = v;
    for (int k = 0; k < dim_; ++k) {
      double d = pow_der[k][e[k]];
      for (int m = 0; m < dim_; ++m)
        if (m != k) d *= pow_val[m][e[m]];
      dmono[j * 3 + k] = d * chain[k];
    }
  }
  for (int i = 0; i < n_; ++i) {
    double v = 0.0;
    Vec g{0, 0, 0};
    for (int j = 0; j <= i; ++j) {
      const double t = transform_[i * n_ + j];
      if (t == 0.0) continue;
      v += t * mono[j];
      for (int k = 0; k < dim_; ++k) g[k] += t * dmono[j * 3 + k];
    }
    values[i] = v;
    gradients[i] = g;
  }
}

std::vector<Vec> BoxBasis::nodes() const {
  if (family_ != BasisFamily::Tensor)
    throw std::logic_error("interpolation nodes exist only for the tensor family");
  auto to_phys = [&](double t, int k) {
    return 0.5 * ((1 - t) * box_.lo[k] + (1 + t) * box_.hi[k]);
  };
  std::vector<Vec> out;
  out.reserve(n_);
  const int q = p_ + 1;
  if (dim_ == 2) {
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < q; ++i)
        out.push_back({to_phys(nodes_1d_[i], 0), to_phys(nodes_1d_[j], 1), 0.0});
  } else {
    for (int k = 0; k < q; ++k)
      for (int j = 0; j < q; ++j)
        for (int i = 0; i < q; ++i)
          out.push_back(
              {to_phys(nodes_1d_[i], 0), to_phys(nodes_1d_[j], 1), to_phys(nodes_1d_[k], 2)});
  }
  return out;
}

}  // namespace rtagg
