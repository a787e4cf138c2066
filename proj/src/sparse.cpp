#include "rtagg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace rtagg {

CsrMatrix CsrMatrix::from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets) {
  CsrMatrix a;
  a.n_rows_ = n_rows;
  a.n_cols_ = n_cols;
  for (const Triplet& t : triplets)
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw std::invalid_argument("triplet index out of range");
  // stable sort keeps duplicate accumulation in insertion order (deterministic)
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  a.row_ptr_.assign(std::size_t(n_rows) + 1, 0);
  a.col_.reserve(triplets.size());
  a.val_.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < triplets.size() && triplets[j].row == triplets[i].row &&
           triplets[j].col == triplets[i].col)
      sum += triplets[j++].value;
    a.col_.push_back(triplets[i].col);
    a.val_.push_back(sum);
    a.row_ptr_[triplets[i].row + 1] += 1;
    i = j;
  }
  for (int r = 0; r < n_rows; ++r) a.row_ptr_[r + 1] += a.row_ptr_[r];
  return a;
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

void CsrMatrix::matvec(const std::vector<double>& x, std::vector<double>& y) const {
  if (int(x.size()) != n_cols_) throw std::invalid_argument("matvec size mismatch");
  y.assign(n_rows_, 0.0);
  for (int r = 0; r < n_rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += val_[k] * x[col_[k]];
    y[r] = s;
  }
}

std::vector<double> CsrMatrix::apply(const std::vector<double>& x) const {
  std::vector<double> y;
  matvec(x, y);
  return y;
}

std::vector<double> CsrMatrix::apply_transpose(const std::vector<double>& x) const {
  if (int(x.size()) != n_rows_) throw std::invalid_argument("transpose-apply size mismatch");
  std::vector<double> y(n_cols_, 0.0);
  for (int r = 0; r < n_rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_[k]] += val_[k] * x[r];
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t;
  t.n_rows_ = n_cols_;
  t.n_cols_ = n_rows_;
  t.row_ptr_.assign(std::size_t(n_cols_) + 1, 0);
  t.col_.resize(val_.size());
  t.val_.resize(val_.size());
  for (int c : col_) t.row_ptr_[c + 1] += 1;
  for (int r = 0; r < n_cols_; ++r) t.row_ptr_[r + 1] += t.row_ptr_[r];
  std::vector<std::size_t> cursor(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (int r = 0; r < n_rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      std::size_t slot = cursor[col_[k]]++;
      t.col_[slot] = r;
      t.val_[slot] = val_[k];
    }
  return t;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(n_rows_, n_cols_), 0.0);
  for (int r = 0; r < int(d.size()); ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (col_[k] == r) d[r] = val_[k];
  return d;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : val_) m = std::max(m, std::abs(v));
  return m;
}

double CsrMatrix::symmetry_error() const {
  if (n_rows_ != n_cols_) throw std::invalid_argument("symmetry check needs a square matrix");
  CsrMatrix t = transpose();
  double err = 0.0;
  for (int r = 0; r < n_rows_; ++r) {
    std::size_t i = row_ptr_[r], j = t.row_ptr_[r];
    const std::size_t ie = row_ptr_[r + 1], je = t.row_ptr_[r + 1];
    while (i < ie || j < je) {
      if (j >= je || (i < ie && col_[i] < t.col_[j]))
        err = std::max(err, std::abs(val_[i++]));
      else if (i >= ie || t.col_[j] < col_[i])
        err = std::max(err, std::abs(t.val_[j++]));
      else
        err = std::max(err, std::abs(val_[i++] - t.val_[j++]));
    }
  }
  return err;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::vector<double>& x) {
  for (double& v : x) v *= alpha;
}

struct CholeskyFactor::Impl {
  // Dense factorization below the threshold, sparse elimination above it.
  static constexpr int kDenseLimit = 5000;
  Eigen::LLT<Eigen::MatrixXd> dense;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> sparse;
  int n = 0;
  bool use_dense = false;
  bool ok = false;
};

CholeskyFactor::CholeskyFactor() : impl_(new Impl) {}
CholeskyFactor::~CholeskyFactor() = default;
CholeskyFactor::CholeskyFactor(CholeskyFactor&&) noexcept = default;
CholeskyFactor& CholeskyFactor::operator=(CholeskyFactor&&) noexcept = default;

bool CholeskyFactor::factor(const CsrMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("Cholesky needs a square matrix");
  impl_->n = a.rows();
  impl_->use_dense = a.rows() <= Impl::kDenseLimit;
  if (impl_->use_dense) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
      for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
        m(r, a.col()[k]) = a.val()[k];
    impl_->dense.compute(m);
    impl_->ok = impl_->dense.info() == Eigen::Success;
  } else {
    Eigen::SparseMatrix<double> m(a.rows(), a.cols());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(a.nnz());
    for (int r = 0; r < a.rows(); ++r)
      for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
        trips.emplace_back(r, a.col()[k], a.val()[k]);
    m.setFromTriplets(trips.begin(), trips.end());
    impl_->sparse.compute(m);
    impl_->ok = impl_->sparse.info() == Eigen::Success;
  }
  return impl_->ok;
}

bool CholeskyFactor::ok() const { return impl_->ok; }
int CholeskyFactor::size() const { return impl_->n; }

std::vector<double> CholeskyFactor::solve(const std::vector<double>& b) const {
  if (!impl_->ok) throw std::logic_error("solve called on a failed factorization");
  if (int(b.size()) != impl_->n) throw std::invalid_argument("solve size mismatch");
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), b.size());
  Eigen::VectorXd x = impl_->use_dense ? impl_->dense.solve(bv).eval() : impl_->sparse.solve(bv).eval();
  return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace rtagg
