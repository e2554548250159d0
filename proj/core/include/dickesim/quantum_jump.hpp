#pragma once

#include <functional>
#include <string>

#include "dickesim/collective.hpp"
#include "dickesim/propagator.hpp"
#include "dickesim/records.hpp"
#include "dickesim/rng.hpp"
#include "dickesim/states.hpp"

namespace dicke {

struct QjConfig {
  HamiltonianSpec hamiltonian_spec;
  double dt = 0.0;  // 0 picks the default 0.002 / (N kappa)
  double t_final = 400.0;
  double sample_every = 0.1;
  std::uint64_t seed = 0;  // master seed; trajectories use derived streams
  std::string initial_state = "up";
  bool record_entropy = true;
  bool record_fisher = false;
};

double default_qj_dt(const HamiltonianSpec& spec);

// What a trajectory runs against: propagators for the no-jump evolution,
// the jump operator, observables, and optional per-sample callbacks on
// the normalized state. Basis-agnostic; factories fill it for the ladder
// or for a full/symmetry-reduced product space.
struct QjBackend {
  SteppedPropagator prop;
  SparseCsr jminus;
  SparseCsr obs_jx, obs_jy, obs_jz;
  std::function<double(const Vector&)> entropy_fn;  // empty = not recorded
  std::function<double(const Vector&)> fisher_fn;
  Vector initial;  // normalized
  double j = 0.0;  // total spin, sets the jump rate scale
  double kappa = 1.0;
};

QjBackend make_dicke_qj_backend(const QjConfig& config,
                                const PureState& initial);

// J- |psi>, normalized. Throws when the state is annihilated (dark state);
// the engine never hits that because the jump probability vanishes there.
PureState apply_jump(const PureState& state, const Matrix& jminus);
Vector apply_jump_normalized(const SparseCsr& jminus, const Vector& psi);

// delta_p = kappa dt <J+J-> / J clipped to [0, 1]. Diagnostic only; the
// engine draws waiting times instead of stepping Bernoulli trials.
double jump_probability(const PureState& state, const CollectiveOperators& ops,
                        double kappa, double dt);

// Waiting-time algorithm: draw r ~ U(0,1), evolve the unnormalized state
// with U(dt) until its squared norm first drops to <= r, jump, redraw.
// The threshold test runs once per sampling block (the norm between jumps
// never increases), and a crossed block is rescanned at dt resolution.
// Deterministic in (config, rng stream).
TrajectoryRecord run_qj_trajectory(const QjConfig& config,
                                   const QjBackend& backend, CounterRng& rng);

}  // namespace dicke
