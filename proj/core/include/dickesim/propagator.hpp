#pragma once

#include <vector>

#include "dickesim/common.hpp"

namespace dicke {

// Minimal CSR matrix. The propagators and full-space spin operators are
// band- or column-sparse, and Eigen's dense kernels waste most of their
// work on structural zeros at the sizes we run.
struct SparseCsr {
  Index rows = 0, cols = 0;
  std::vector<int> row_ptr;  // size rows + 1
  std::vector<int> col;
  std::vector<Complex> val;

  // Keeps entries with |a_ij| >= drop_tol * max|a|; drop_tol = 0 keeps all
  // nonzeros exactly.
  static SparseCsr from_dense(const Matrix& a, double drop_tol = 0.0);
  static SparseCsr from_triplets(Index rows, Index cols,
                                 std::vector<std::tuple<int, int, Complex>> t);

  void apply(const Vector& x, Vector& y) const;
  Vector apply(const Vector& x) const;
  Matrix to_dense() const;
  double fill() const;
  std::size_t nnz() const { return val.size(); }
};

// One-step and one-block propagators for a (generally non-Hermitian)
// Hamiltonian: fine() advances by dt via U = expm(-i H dt), block() by
// K dt via U^K. Between jumps the norm of the evolving state only
// decreases, so callers can test the jump threshold once per block and
// rescan a block at dt resolution only when it actually crosses.
// Each operator is stored sparse when thresholding leaves it sparse
// enough to win, dense otherwise.
class SteppedPropagator {
 public:
  SteppedPropagator() = default;
  SteppedPropagator(const Matrix& h, double dt, int steps_per_block);

  void fine(const Vector& x, Vector& y) const;
  void block(const Vector& x, Vector& y) const;

  double dt() const { return dt_; }
  int steps_per_block() const { return steps_; }
  Index dim() const { return dim_; }

 private:
  struct Stored {
    bool sparse = false;
    SparseCsr csr;
    Matrix dense;
    void apply(const Vector& x, Vector& y) const;
  };
  Stored fine_, block_;
  double dt_ = 0.0;
  int steps_ = 1;
  Index dim_ = 0;
};

}  // namespace dicke
