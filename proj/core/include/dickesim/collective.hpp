#pragma once

#include "dickesim/common.hpp"

namespace dicke {

// Collective spin operators for N spins restricted to the maximal-spin
// ladder, dimension N+1. Index n corresponds to M = n - J with J = N/2,
// so raising moves up in index: <n+1| J+ |n> = sqrt(J(J+1) - M(M+1)).
struct CollectiveOperators {
  int n_spins = 0;
  double j = 0.0;  // total spin J = N/2
  Matrix jx, jy, jz;
  Matrix jplus, jminus;
  Matrix jplus_jminus;  // diagonal: (J+M)(J-M+1)
  // Ladder coefficients, ladder_up[n] = <n+1| J+ |n>, length N.
  RealVector ladder_up;
};

CollectiveOperators build_collective_ops(int n_spins);

// All rates in units of the collective decay rate unless kappa is changed.
struct HamiltonianSpec {
  int n_spins = 0;
  double omega0 = 0.0;   // transverse drive along x
  double omega_z = 0.0;  // collective Jz^2 shift
  double kappa = 1.0;    // collective decay rate, must be > 0
};

void validate(const HamiltonianSpec& spec);

// H = omega0 Jx + omega_z Jz^2 (kappa enters only through the dissipator).
Matrix build_hamiltonian(const CollectiveOperators& ops,
                         const HamiltonianSpec& spec);

// H_nj = H - i (kappa / 2J) J+ J-, the generator of no-jump evolution.
Matrix build_nonhermitian_h(const CollectiveOperators& ops,
                            const HamiltonianSpec& spec);

Complex expectation(const Matrix& op, const Vector& psi);
Complex expectation(const Matrix& op, const Matrix& rho);

}  // namespace dicke
