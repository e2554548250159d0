#pragma once

#include <cstdint>
#include <vector>

#include "dickesim/common.hpp"
#include "dickesim/propagator.hpp"
#include "dickesim/quantum_jump.hpp"

namespace dicke {

// Ring chain with power-law Ising couplings and collective decay. Full
// product space, site 0 = least significant bit, bit value 0 = spin up.
struct PowerlawSpec {
  int n_spins = 2;  // 2..14 (dense full-space cap)
  double omega0 = 0.0;
  double omega_z = 0.0;  // interaction strength
  double alpha = 0.0;    // coupling decay exponent, >= 0
  double kappa = 1.0;
};

void validate(const PowerlawSpec& spec);

int ring_distance(int n_spins, int i, int j);

// Z = (1/N) sum_{i != j} d(i,j)^(-alpha); keeps the interaction term
// extensive at every range. alpha = 0 gives N - 1, alpha -> inf gives 2.
double kac_factor(int n_spins, double alpha);

// H = omega0 Jx + (omega_z / Z) sum_{j > i} sigma^z_i sigma^z_j / d(i,j)^alpha.
Matrix build_powerlaw_hamiltonian(const PowerlawSpec& spec);

// J- = sum_i sigma_i^- in the full space; restricted to the symmetric
// sector it reproduces the ladder-basis matrix elements.
Matrix build_collective_lowering_full(int n_spins);

// Sparse full-space collective operators (the dense builders above wrap
// these; trajectories and sector projections use them directly).
SparseCsr full_jminus_sparse(int n_spins);
SparseCsr full_jx_sparse(int n_spins);
SparseCsr full_jy_sparse(int n_spins);
SparseCsr full_jz_sparse(int n_spins);
SparseCsr powerlaw_h_sparse(const PowerlawSpec& spec);

// Basis of the subspace invariant under all ring translations and the
// reflection: one vector per dihedral orbit of computational states, the
// uniform sum over the orbit. The drive, interactions, and collective
// lowering all commute with the ring symmetry and the polarized initial
// states live here, so the dynamics never leaves this sector; it is a
// few hundred dimensions where the full space has a few thousand.
struct SymmetricSector {
  int n_spins = 0;
  Index dim = 0;          // number of orbits
  std::vector<std::uint32_t> representative;  // per orbit, minimal element
  std::vector<double> weight;      // per full state, 1/sqrt(orbit size)
  std::vector<std::int32_t> orbit_of;  // per full state, its orbit index

  Vector to_full(const Vector& sector_amplitudes) const;
  // Sector matrix of a full-space operator that commutes with the
  // dihedral symmetry (no check; callers pass symmetric operators).
  Matrix project(const SparseCsr& full_op) const;
};

SymmetricSector build_symmetric_sector(int n_spins);

// QJ backend running in the symmetric sector, with entropy evaluated by
// expanding back to the full space and tracing out half the ring.
QjBackend make_powerlaw_qj_backend(const PowerlawSpec& spec,
                                   const QjConfig& config);

}  // namespace dicke
