#pragma once

#include <complex>
#include <vector>

#include "laxtop/errors.hpp"
#include "laxtop/specfun.hpp"

namespace laxtop {

// Dense complex square matrix. Sizes stay at desk scale (NM <= 64),
// so no attempt is made at sparsity or blocking.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}

  static Matrix identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int dim() const { return n_; }
  bool empty() const { return n_ == 0; }

  Complex& operator()(int r, int c) { return a_[static_cast<size_t>(r) * n_ + c]; }
  const Complex& operator()(int r, int c) const {
    return a_[static_cast<size_t>(r) * n_ + c];
  }

  Complex& at(int r, int c);
  const Complex& at(int r, int c) const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(Complex s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);

  Complex trace() const;
  Matrix adjoint() const;  // conjugate transpose

  const std::vector<Complex>& data() const { return a_; }
  std::vector<Complex>& data() { return a_; }

 private:
  int n_ = 0;
  std::vector<Complex> a_;
};

Matrix commutator(const Matrix& a, const Matrix& b);
std::vector<Complex> apply(const Matrix& m, const std::vector<Complex>& v);

// Max-abs entry; the norm used for every residual in the project.
double matnorm(const Matrix& m);

// Linear operator on C^n (x) C^n with components R_{ij,kl} acting as
// sum R_{ij,kl} E_ij (x) E_kl. Stored as the n^2 x n^2 matrix with row
// index (i,k) and column index (j,l).
class TensorOp {
 public:
  TensorOp() = default;
  explicit TensorOp(int n) : n_(n), m_(n * n) {}
  TensorOp(int n, Matrix m) : n_(n), m_(std::move(m)) {}

  static TensorOp identity(int n) { return TensorOp(n, Matrix::identity(n * n)); }

  int site_dim() const { return n_; }

  Complex& comp(int i, int j, int k, int l) { return m_(i * n_ + k, j * n_ + l); }
  const Complex& comp(int i, int j, int k, int l) const {
    return m_(i * n_ + k, j * n_ + l);
  }

  const Matrix& mat() const { return m_; }
  Matrix& mat() { return m_; }

  TensorOp& operator+=(const TensorOp& o);
  TensorOp& operator-=(const TensorOp& o);
  TensorOp& operator*=(Complex s);
  friend TensorOp operator+(TensorOp a, const TensorOp& b) { return a += b; }
  friend TensorOp operator-(TensorOp a, const TensorOp& b) { return a -= b; }
  friend TensorOp operator*(TensorOp a, Complex s) { return a *= s; }
  friend TensorOp operator*(Complex s, TensorOp a) { return a *= s; }

 private:
  int n_ = 0;
  Matrix m_;
};

// P_{ij,kl} = delta_il delta_jk, the permutation operator.
TensorOp permutation_op(int n);

// a (x) b as a TensorOp: components a_{ij} b_{kl}.
TensorOp tensor_product(const Matrix& a, const Matrix& b);

// tr_2(A_{12} S_2): result_{ij} = sum_{kl} A_{ij,kl} S_{lk}.
Matrix tr2_contract(const TensorOp& a, const Matrix& s);

// Operator product on C^n (x) C^n.
TensorOp compose(const TensorOp& a, const TensorOp& b);

// A_{21}: both index pairs swapped, (A21)_{ij,kl} = A_{kl,ij}.
TensorOp swap_spaces(const TensorOp& a);

double matnorm(const TensorOp& a);

// Operator on the three-fold tensor space, row (i,k,m), col (j,l,p).
class ThreeOp {
 public:
  ThreeOp() = default;
  explicit ThreeOp(int n) : n_(n), m_(n * n * n) {}
  ThreeOp(int n, Matrix m) : n_(n), m_(std::move(m)) {}

  static ThreeOp identity(int n) { return ThreeOp(n, Matrix::identity(n * n * n)); }

  int site_dim() const { return n_; }
  int row(int i, int k, int m) const { return (i * n_ + k) * n_ + m; }

  const Matrix& mat() const { return m_; }
  Matrix& mat() { return m_; }

  ThreeOp& operator+=(const ThreeOp& o);
  ThreeOp& operator-=(const ThreeOp& o);
  ThreeOp& operator*=(Complex s);
  friend ThreeOp operator+(ThreeOp a, const ThreeOp& b) { return a += b; }
  friend ThreeOp operator-(ThreeOp a, const ThreeOp& b) { return a -= b; }
  friend ThreeOp operator*(ThreeOp a, Complex s) { return a *= s; }
  friend ThreeOp operator*(Complex s, ThreeOp a) { return a *= s; }

 private:
  int n_ = 0;
  Matrix m_;
};

// Embed a two-space operator into spaces (12), (13) or (23) of the
// three-fold product.
ThreeOp act_space(const TensorOp& a, int which);

ThreeOp compose(const ThreeOp& a, const ThreeOp& b);

// Trace out one space (1, 2 or 3); the result acts on the remaining
// two spaces in their original order.
TensorOp partial_trace(const ThreeOp& x, int space);

double matnorm(const ThreeOp& a);

// NM x NM complex matrix organized as an M x M grid of N x N blocks.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(int N, int M)
      : N_(N), M_(M), blocks_(static_cast<size_t>(M) * M, Matrix(N)) {}

  int block_dim() const { return N_; }
  int grid_dim() const { return M_; }

  const Matrix& block(int i, int j) const;
  void set_block(int i, int j, Matrix b);

  BlockMatrix& operator+=(const BlockMatrix& o);
  BlockMatrix& operator-=(const BlockMatrix& o);
  BlockMatrix& operator*=(Complex s);
  friend BlockMatrix operator+(BlockMatrix a, const BlockMatrix& b) { return a += b; }
  friend BlockMatrix operator-(BlockMatrix a, const BlockMatrix& b) { return a -= b; }
  friend BlockMatrix operator*(BlockMatrix a, Complex s) { return a *= s; }
  friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);

  Complex trace() const;

 private:
  int N_ = 0, M_ = 0;
  std::vector<Matrix> blocks_;
};

BlockMatrix commutator(const BlockMatrix& a, const BlockMatrix& b);

// Flatten to the NM x NM matrix and back.
Matrix assemble(const BlockMatrix& b);
BlockMatrix extract_blocks(const Matrix& m, int N, int M);

double matnorm(const BlockMatrix& b);

}  // namespace laxtop
