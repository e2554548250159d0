#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dickesim/collective.hpp"
#include "dickesim/records.hpp"
#include "dickesim/rng.hpp"
#include "dickesim/states.hpp"

namespace dicke {

struct QsdConfig {
  HamiltonianSpec hamiltonian_spec;
  double eta = 1.0;  // detector efficiency in [0, 1]
  double dt = 5e-3;
  double t_final = 400.0;
  double sample_every = 0.1;
  std::uint64_t seed = 0;
  std::string initial_state = "up";
  bool record_entropy = true;
  bool record_fisher = false;
  bool record_increments = false;  // keep the full per-step homodyne record
  // Forces the generic density-matrix stepper even where a specialized
  // path exists (eta = 1 pure evolution, eta = 0 deterministic average).
  bool force_density_path = false;
};

// One completely-positive update:
//   rho' ~ M rho M† + (1 - eta) (kappa dt / J) J- rho J+,
//   M = 1 - iH dt - (kappa dt / 2J) J+J- + a (dw + 2 a <Jx> dt) J-,
// with a = sqrt(kappa eta / J) and <Jx> taken on the input state, then
// symmetrized and normalized to unit trace. dw must be Gaussian with
// variance dt. Averaging over dw recovers the Lindblad generator to
// O(dt). Throws on eta outside [0,1] or an eigenvalue of rho' below
// -1e-8 (dt too large).
MixedState qsd_step(const MixedState& rho, const CollectiveOperators& ops,
                    const HamiltonianSpec& spec, double eta, double dt,
                    double dw);

// Iterates the diffusive update, recording dI = (kappa/J) <Jx> + a dw with
// the same dw the step consumes. eta = 1 from a pure initial state runs a
// pure-state stepper (the mixing term vanishes); eta = 0 advances the
// deterministic average with an exact exponential stepper when the
// dimension allows. Entropy is the half-partition entanglement entropy
// when the state stays pure, the von Neumann entropy of the conditional
// density matrix otherwise.
std::pair<TrajectoryRecord, HomodyneRecord> run_qsd_trajectory(
    const QsdConfig& config, CounterRng& rng);

struct LindbladResult {
  RealVector times;
  RealVector jx, jy, jz;
  Matrix final_state;
  std::vector<Matrix> states;  // sampled, only when requested
};

// Classic RK4 for rho_dot = -i[H, rho] + (kappa/J)(J- rho J+ -
// {J+J-, rho}/2), symmetrized each step. The generator is traceless, so
// trace drift beyond 1e-6 (or entries beyond 1e6) means the step is
// unstable and raises an error suggesting a smaller dt.
LindbladResult lindblad_evolve(const HamiltonianSpec& spec,
                               const MixedState& initial, double dt,
                               double t_final, double sample_every,
                               bool store_states = false);

Matrix lindblad_rhs(const CollectiveOperators& ops, const Matrix& h,
                    double kappa, const Matrix& rho);

// Column-major-vec superoperator of the same generator; dimension
// (N+1)^2 square. Feasible for moderate N only.
Matrix lindblad_superoperator(const CollectiveOperators& ops, const Matrix& h,
                              double kappa);

}  // namespace dicke
