#include "laxtop/tensorops.hpp"

#include <cmath>
#include <sstream>

namespace laxtop {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch " << a << " vs " << b;
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

Complex& Matrix::at(int r, int c) {
  if (r < 0 || r >= n_ || c < 0 || c >= n_)
    throw IndexOutOfRange("Matrix::at index out of range");
  return (*this)(r, c);
}

const Complex& Matrix::at(int r, int c) const {
  if (r < 0 || r >= n_ || c < 0 || c >= n_)
    throw IndexOutOfRange("Matrix::at index out of range");
  return (*this)(r, c);
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_dim(n_, o.n_, "Matrix +=");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_dim(n_, o.n_, "Matrix -=");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

Matrix& Matrix::operator*=(Complex s) {
  for (auto& v : a_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_dim(a.n_, b.n_, "Matrix *");
  const int n = a.n_;
  Matrix c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Complex Matrix::trace() const {
  Complex t{};
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

Matrix Matrix::adjoint() const {
  Matrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(i, j) = std::conj((*this)(j, i));
  return r;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

std::vector<Complex> apply(const Matrix& m, const std::vector<Complex>& v) {
  require_same_dim(m.dim(), static_cast<int>(v.size()), "Matrix apply");
  std::vector<Complex> r(v.size());
  for (int i = 0; i < m.dim(); ++i) {
    Complex acc{};
    for (int j = 0; j < m.dim(); ++j) acc += m(i, j) * v[j];
    r[i] = acc;
  }
  return r;
}

double matnorm(const Matrix& m) {
  double best = 0.0;
  for (const auto& v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

TensorOp& TensorOp::operator+=(const TensorOp& o) {
  require_same_dim(n_, o.n_, "TensorOp +=");
  m_ += o.m_;
  return *this;
}

TensorOp& TensorOp::operator-=(const TensorOp& o) {
  require_same_dim(n_, o.n_, "TensorOp -=");
  m_ -= o.m_;
  return *this;
}

TensorOp& TensorOp::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

TensorOp permutation_op(int n) {
  if (n < 1) throw DimensionMismatch("permutation_op requires n >= 1");
  TensorOp p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.comp(i, j, j, i) = 1.0;
  return p;
}

TensorOp tensor_product(const Matrix& a, const Matrix& b) {
  require_same_dim(a.dim(), b.dim(), "tensor_product");
  const int n = a.dim();
  TensorOp t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) t.comp(i, j, k, l) = a(i, j) * b(k, l);
  return t;
}

Matrix tr2_contract(const TensorOp& a, const Matrix& s) {
  require_same_dim(a.site_dim(), s.dim(), "tr2_contract");
  const int n = s.dim();
  Matrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex acc{};
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) acc += a.comp(i, j, k, l) * s(l, k);
      r(i, j) = acc;
    }
  return r;
}

TensorOp compose(const TensorOp& a, const TensorOp& b) {
  require_same_dim(a.site_dim(), b.site_dim(), "compose");
  return TensorOp(a.site_dim(), a.mat() * b.mat());
}

TensorOp swap_spaces(const TensorOp& a) {
  const int n = a.site_dim();
  TensorOp r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) r.comp(i, j, k, l) = a.comp(k, l, i, j);
  return r;
}

double matnorm(const TensorOp& a) { return matnorm(a.mat()); }

ThreeOp& ThreeOp::operator+=(const ThreeOp& o) {
  require_same_dim(n_, o.n_, "ThreeOp +=");
  m_ += o.m_;
  return *this;
}

ThreeOp& ThreeOp::operator-=(const ThreeOp& o) {
  require_same_dim(n_, o.n_, "ThreeOp -=");
  m_ -= o.m_;
  return *this;
}

ThreeOp& ThreeOp::operator*=(Complex s) {
  m_ *= s;
  return *this;
}

ThreeOp act_space(const TensorOp& a, int which) {
  const int n = a.site_dim();
  ThreeOp x(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const Complex v = a.comp(i, j, k, l);
          if (v == Complex{}) continue;
          switch (which) {
            case 12:
              for (int m = 0; m < n; ++m)
                x.mat()(x.row(i, k, m), x.row(j, l, m)) = v;
              break;
            case 13:
              for (int m = 0; m < n; ++m)
                x.mat()(x.row(i, m, k), x.row(j, m, l)) = v;
              break;
            case 23:
              for (int m = 0; m < n; ++m)
                x.mat()(x.row(m, i, k), x.row(m, j, l)) = v;
              break;
            default:
              throw IndexOutOfRange("act_space: which must be 12, 13 or 23");
          }
        }
  return x;
}

ThreeOp compose(const ThreeOp& a, const ThreeOp& b) {
  require_same_dim(a.site_dim(), b.site_dim(), "compose(ThreeOp)");
  return ThreeOp(a.site_dim(), a.mat() * b.mat());
}

TensorOp partial_trace(const ThreeOp& x, int space) {
  const int n = x.site_dim();
  TensorOp r(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Complex acc{};
          switch (space) {
            case 1:
              for (int m = 0; m < n; ++m)
                acc += x.mat()(x.row(m, a, c), x.row(m, b, d));
              break;
            case 2:
              for (int m = 0; m < n; ++m)
                acc += x.mat()(x.row(a, m, c), x.row(b, m, d));
              break;
            case 3:
              for (int m = 0; m < n; ++m)
                acc += x.mat()(x.row(a, c, m), x.row(b, d, m));
              break;
            default:
              throw IndexOutOfRange("partial_trace: space must be 1, 2 or 3");
          }
          r.comp(a, b, c, d) = acc;
        }
  return r;
}

double matnorm(const ThreeOp& a) { return matnorm(a.mat()); }

const Matrix& BlockMatrix::block(int i, int j) const {
  if (i < 0 || i >= M_ || j < 0 || j >= M_)
    throw IndexOutOfRange("BlockMatrix::block index out of range");
  return blocks_[static_cast<size_t>(i) * M_ + j];
}

void BlockMatrix::set_block(int i, int j, Matrix b) {
  if (i < 0 || i >= M_ || j < 0 || j >= M_)
    throw IndexOutOfRange("BlockMatrix::set_block index out of range");
  require_same_dim(b.dim(), N_, "BlockMatrix::set_block");
  blocks_[static_cast<size_t>(i) * M_ + j] = std::move(b);
}

BlockMatrix& BlockMatrix::operator+=(const BlockMatrix& o) {
  require_same_dim(N_, o.N_, "BlockMatrix +=");
  require_same_dim(M_, o.M_, "BlockMatrix +=");
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
  return *this;
}

BlockMatrix& BlockMatrix::operator-=(const BlockMatrix& o) {
  require_same_dim(N_, o.N_, "BlockMatrix -=");
  require_same_dim(M_, o.M_, "BlockMatrix -=");
  for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
  return *this;
}

BlockMatrix& BlockMatrix::operator*=(Complex s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
  require_same_dim(a.N_, b.N_, "BlockMatrix *");
  require_same_dim(a.M_, b.M_, "BlockMatrix *");
  BlockMatrix c(a.N_, a.M_);
  for (int i = 0; i < a.M_; ++i)
    for (int j = 0; j < a.M_; ++j) {
      Matrix acc(a.N_);
      for (int k = 0; k < a.M_; ++k) acc += a.block(i, k) * b.block(k, j);
      c.set_block(i, j, std::move(acc));
    }
  return c;
}

Complex BlockMatrix::trace() const {
  Complex t{};
  for (int i = 0; i < M_; ++i) t += block(i, i).trace();
  return t;
}

BlockMatrix commutator(const BlockMatrix& a, const BlockMatrix& b) {
  return a * b - b * a;
}

Matrix assemble(const BlockMatrix& b) {
  const int N = b.block_dim(), M = b.grid_dim();
  Matrix m(N * M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c) m(i * N + a, j * N + c) = b.block(i, j)(a, c);
  return m;
}

BlockMatrix extract_blocks(const Matrix& m, int N, int M) {
  require_same_dim(m.dim(), N * M, "extract_blocks");
  BlockMatrix b(N, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      Matrix blk(N);
      for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c) blk(a, c) = m(i * N + a, j * N + c);
      b.set_block(i, j, std::move(blk));
    }
  return b;
}

double matnorm(const BlockMatrix& b) {
  double best = 0.0;
  for (int i = 0; i < b.grid_dim(); ++i)
    for (int j = 0; j < b.grid_dim(); ++j)
      best = std::max(best, matnorm(b.block(i, j)));
  return best;
}

}  // namespace laxtop
