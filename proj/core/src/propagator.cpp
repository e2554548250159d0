#include "dickesim/propagator.hpp"

#include <algorithm>
#include <cmath>

#include "dickesim/expm.hpp"

namespace dicke {

SparseCsr SparseCsr::from_dense(const Matrix& a, double drop_tol) {
  SparseCsr m;
  m.rows = a.rows();
  m.cols = a.cols();
  m.row_ptr.assign(m.rows + 1, 0);
  double cutoff = 0.0;
  if (drop_tol > 0.0 && a.size() > 0)
    cutoff = drop_tol * a.cwiseAbs().maxCoeff();
  for (Index r = 0; r < m.rows; ++r) {
    for (Index c = 0; c < m.cols; ++c) {
      const Complex v = a(r, c);
      if (v != Complex(0.0) && std::abs(v) >= cutoff) {
        m.col.push_back(int(c));
        m.val.push_back(v);
      }
    }
    m.row_ptr[r + 1] = int(m.col.size());
  }
  return m;
}

SparseCsr SparseCsr::from_triplets(
    Index rows, Index cols, std::vector<std::tuple<int, int, Complex>> t) {
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                            : std::get<1>(a) < std::get<1>(b);
  });
  SparseCsr m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  int prev_r = -1, prev_c = -1;
  for (const auto& [r, c, v] : t) {
    if (r == prev_r && c == prev_c) {
      m.val.back() += v;  // merge duplicates
      continue;
    }
    m.col.push_back(c);
    m.val.push_back(v);
    m.row_ptr[r + 1] = int(m.col.size());
    prev_r = r;
    prev_c = c;
  }
  for (Index r = 1; r <= rows; ++r)
    m.row_ptr[r] = std::max(m.row_ptr[r], m.row_ptr[r - 1]);
  return m;
}

void SparseCsr::apply(const Vector& x, Vector& y) const {
  if (x.size() != cols) throw std::invalid_argument("csr apply: size mismatch");
  y.resize(rows);
  for (Index r = 0; r < rows; ++r) {
    Complex acc(0.0);
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
    y[r] = acc;
  }
}

Vector SparseCsr::apply(const Vector& x) const {
  Vector y;
  apply(x, y);
  return y;
}

Matrix SparseCsr::to_dense() const {
  Matrix a = Matrix::Zero(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) a(r, col[k]) += val[k];
  return a;
}

double SparseCsr::fill() const {
  if (rows == 0 || cols == 0) return 0.0;
  return double(val.size()) / (double(rows) * double(cols));
}

namespace {

// Worth storing sparse only while the row loop beats Eigen's dense matvec.
constexpr double kSparseFillLimit = 0.35;
constexpr double kDropTol = 1e-15;

}  // namespace

void SteppedPropagator::Stored::apply(const Vector& x, Vector& y) const {
  if (sparse)
    csr.apply(x, y);
  else
    y.noalias() = dense * x;
}

SteppedPropagator::SteppedPropagator(const Matrix& h, double dt,
                                     int steps_per_block)
    : dt_(dt), steps_(steps_per_block), dim_(h.rows()) {
  if (h.rows() != h.cols()) throw std::invalid_argument("h must be square");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (steps_per_block < 1) throw std::invalid_argument("steps_per_block < 1");

  Matrix u = expm(Complex(0.0, -dt) * h);
  Matrix ub;
  if (steps_ > 1) {
    // binary powering; the propagator is a contraction, so repeated
    // squaring stays well conditioned
    ub = Matrix::Identity(dim_, dim_);
    Matrix base = u;
    for (int k = steps_; k > 0; k >>= 1) {
      if (k & 1) ub = ub * base;
      if (k > 1) base = base * base;
    }
  } else {
    ub = u;
  }

  auto pack = [](Matrix m, Stored& out) {
    SparseCsr csr = SparseCsr::from_dense(m, kDropTol);
    if (csr.fill() <= kSparseFillLimit) {
      out.sparse = true;
      out.csr = std::move(csr);
    } else {
      out.sparse = false;
      out.dense = std::move(m);
    }
  };
  pack(std::move(u), fine_);
  pack(std::move(ub), block_);
}

void SteppedPropagator::fine(const Vector& x, Vector& y) const {
  fine_.apply(x, y);
}

void SteppedPropagator::block(const Vector& x, Vector& y) const {
  block_.apply(x, y);
}

}  // namespace dicke
