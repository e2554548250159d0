#pragma once

#include <vector>

#include "dickesim/common.hpp"
#include "dickesim/collective.hpp"

namespace dicke {

// Reduced density matrix of the first n_a spins of a permutation-symmetric
// N-spin pure state given by ladder amplitudes c (length N+1). Returned
// matrix has dimension n_a + 1 and is positive semidefinite by
// construction (Gram form). Works far beyond full-space sizes; the
// binomial weights are evaluated in log space.
Matrix dicke_reduced_density(const Vector& amplitudes, int n_spins, int n_a);

// Partial trace of a full product-space pure state onto an arbitrary set
// of sites (each in [0, N), no duplicates). Dimension 2^|sites|.
Matrix full_reduced_density(const Vector& amplitudes, int n_spins,
                            const std::vector<int>& sites);

// Von Neumann entropy in nats; eigenvalues below 1e-14 are dropped, which
// also discards the small negatives roundoff can produce.
double entropy(const Matrix& rho);

// Half-chain entanglement entropy of a ladder-basis pure state,
// n_a = floor(N/2).
double half_chain_entropy(const Vector& amplitudes, int n_spins);

struct FisherResult {
  double fisher = 0.0;   // F_Q, optimized over collective rotation axes
  double density = 0.0;  // f_Q = F_Q / N
  Eigen::Matrix3d direction_matrix = Eigen::Matrix3d::Zero();
};

// Pure-state quantum Fisher information from the covariance matrix of
// (Jx, Jy, Jz): M_ab = 2<{Ja,Jb}> - 4<Ja><Jb>, F_Q = max eigenvalue.
FisherResult qfi_pure(const CollectiveOperators& ops, const Vector& psi);

// Same quantity from pre-applied vectors ya = Ja psi, for backends whose
// operators are not the ladder-basis dense set.
FisherResult qfi_pure_applied(const Vector& psi, const Vector& yx,
                              const Vector& yy, const Vector& yz,
                              int n_spins);

// Mixed-state QFI via the spectral formula
//   M_ab = 2 sum_kl (l_k - l_l)^2 / (l_k + l_l) <k|Ja|l><l|Jb|k>,
// pairs with l_k + l_l < 1e-12 skipped.
FisherResult qfi_mixed(const CollectiveOperators& ops, const Matrix& rho);

}  // namespace dicke
