#include "dickesim/collective.hpp"

#include <cmath>

namespace dicke {

CollectiveOperators build_collective_ops(int n_spins) {
  if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
  const Index dim = n_spins + 1;
  const double j = 0.5 * n_spins;

  CollectiveOperators ops;
  ops.n_spins = n_spins;
  ops.j = j;
  ops.ladder_up.resize(n_spins);
  ops.jz = Matrix::Zero(dim, dim);
  ops.jplus = Matrix::Zero(dim, dim);
  ops.jplus_jminus = Matrix::Zero(dim, dim);

  for (Index n = 0; n < dim; ++n) {
    const double m = n - j;
    ops.jz(n, n) = m;
    ops.jplus_jminus(n, n) = (j + m) * (j - m + 1.0);
    if (n + 1 < dim) {
      const double c = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
      ops.ladder_up[n] = c;
      ops.jplus(n + 1, n) = c;
    }
  }
  ops.jminus = ops.jplus.adjoint();
  ops.jx = 0.5 * (ops.jplus + ops.jminus);
  ops.jy = Complex(0.0, -0.5) * (ops.jplus - ops.jminus);
  return ops;
}

void validate(const HamiltonianSpec& spec) {
  if (spec.n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
  if (!(spec.kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  if (!std::isfinite(spec.omega0) || !std::isfinite(spec.omega_z))
    throw std::invalid_argument("non-finite Hamiltonian coefficient");
}

Matrix build_hamiltonian(const CollectiveOperators& ops,
                         const HamiltonianSpec& spec) {
  validate(spec);
  if (ops.n_spins != spec.n_spins)
    throw std::invalid_argument("operator set built for a different n_spins");
  Matrix h = spec.omega0 * ops.jx;
  if (spec.omega_z != 0.0) h += spec.omega_z * ops.jz * ops.jz;
  return h;
}

Matrix build_nonhermitian_h(const CollectiveOperators& ops,
                            const HamiltonianSpec& spec) {
  Matrix h = build_hamiltonian(ops, spec);
  h += Complex(0.0, -0.5 * spec.kappa / ops.j) * ops.jplus_jminus;
  return h;
}

Complex expectation(const Matrix& op, const Vector& psi) {
  if (op.rows() != op.cols() || op.cols() != psi.size())
    throw std::invalid_argument("operator/state dimension mismatch");
  return psi.dot(op * psi);  // Eigen's dot conjugates the left argument
}

Complex expectation(const Matrix& op, const Matrix& rho) {
  if (op.rows() != op.cols() || rho.rows() != rho.cols() ||
      op.cols() != rho.rows())
    throw std::invalid_argument("operator/state dimension mismatch");
  return (op * rho).trace();
}

}  // namespace dicke
