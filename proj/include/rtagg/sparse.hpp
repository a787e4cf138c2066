#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace rtagg {

struct Triplet {
  int row;
  int col;
  double value;
};

// Compressed-sparse-row matrix. Columns within each row are sorted; duplicate
// triplets are summed in insertion order (deterministic assembly).
class CsrMatrix {
 public:
  CsrMatrix() = default;
  static CsrMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets);
  static CsrMatrix identity(int n);

  int rows() const { return n_rows_; }
  int cols() const { return n_cols_; }
  std::size_t nnz() const { return val_.size(); }

  void matvec(const std::vector<double>& x, std::vector<double>& y) const;  // y = A x
  std::vector<double> apply(const std::vector<double>& x) const;
  // y = A^T x, computed without materializing the transpose
  std::vector<double> apply_transpose(const std::vector<double>& x) const;

  CsrMatrix transpose() const;
  std::vector<double> diagonal() const;
  double max_abs() const;
  // max_{ij} |A_ij - A_ji| (missing entries count as zero)
  double symmetry_error() const;

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col() const { return col_; }
  const std::vector<double>& val() const { return val_; }

 private:
  int n_rows_ = 0, n_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> val_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);  // y += alpha x
void scale(double alpha, std::vector<double>& x);

// Sparse Cholesky (LL^T) factorization of a symmetric positive definite matrix;
// the factorization doubles as the SPD certificate.
class CholeskyFactor {
 public:
  CholeskyFactor();
  ~CholeskyFactor();
  CholeskyFactor(CholeskyFactor&&) noexcept;
  CholeskyFactor& operator=(CholeskyFactor&&) noexcept;

  // Returns false when the matrix is not SPD (factorization failure).
  bool factor(const CsrMatrix& a);
  bool ok() const;
  int size() const;
  std::vector<double> solve(const std::vector<double>& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rtagg
