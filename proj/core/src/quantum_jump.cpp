#include "dickesim/quantum_jump.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "dickesim/entanglement.hpp"

namespace dicke {

double default_qj_dt(const HamiltonianSpec& spec) {
  return 0.002 / (spec.n_spins * spec.kappa);
}

PureState apply_jump(const PureState& state, const Matrix& jminus) {
  if (jminus.rows() != jminus.cols() ||
      jminus.cols() != state.amplitudes.size())
    throw std::invalid_argument("jump operator/state dimension mismatch");
  PureState out = state;
  out.amplitudes = jminus * state.amplitudes;
  const double norm = out.amplitudes.norm();
  if (norm < 1e-12)
    throw std::runtime_error("jump applied to a dark state (J- annihilates it)");
  out.amplitudes /= norm;
  out.decaying = false;
  return out;
}

Vector apply_jump_normalized(const SparseCsr& jminus, const Vector& psi) {
  Vector out = jminus.apply(psi);
  const double norm = out.norm();
  if (norm < 1e-12)
    throw std::runtime_error("jump applied to a dark state (J- annihilates it)");
  out /= norm;
  return out;
}

double jump_probability(const PureState& state, const CollectiveOperators& ops,
                        double kappa, double dt) {
  if (state.amplitudes.size() != ops.n_spins + 1)
    throw std::invalid_argument("state/operator dimension mismatch");
  const double jpjm =
      expectation(ops.jplus_jminus, state.amplitudes).real();
  const double p = kappa * dt * jpjm / ops.j;
  return std::clamp(p, 0.0, 1.0);
}

QjBackend make_dicke_qj_backend(const QjConfig& config,
                                const PureState& initial) {
  const HamiltonianSpec& spec = config.hamiltonian_spec;
  validate(spec);
  if (initial.basis != StateBasis::DickeLadder)
    throw std::invalid_argument("ladder backend needs a ladder-basis state");
  if (initial.amplitudes.size() != spec.n_spins + 1)
    throw std::invalid_argument("initial state has the wrong dimension");

  const double dt = config.dt > 0.0 ? config.dt : default_qj_dt(spec);
  const int steps = std::max(1, int(std::lround(config.sample_every / dt)));

  CollectiveOperators ops = build_collective_ops(spec.n_spins);
  QjBackend b;
  b.j = ops.j;
  b.kappa = spec.kappa;
  b.prop = SteppedPropagator(build_nonhermitian_h(ops, spec), dt, steps);
  b.jminus = SparseCsr::from_dense(ops.jminus);
  b.obs_jx = SparseCsr::from_dense(ops.jx);
  b.obs_jy = SparseCsr::from_dense(ops.jy);
  b.obs_jz = SparseCsr::from_dense(ops.jz);
  b.initial = initial.amplitudes.normalized();
  const int n = spec.n_spins;
  if (config.record_entropy && n >= 2)
    b.entropy_fn = [n](const Vector& psi) { return half_chain_entropy(psi, n); };
  if (config.record_fisher) {
    auto shared_ops = std::make_shared<CollectiveOperators>(std::move(ops));
    b.fisher_fn = [shared_ops](const Vector& psi) {
      return qfi_pure(*shared_ops, psi).density;
    };
  }
  return b;
}

namespace {

double quadratic_form(const SparseCsr& op, const Vector& psi, Vector& scratch) {
  op.apply(psi, scratch);
  return psi.dot(scratch).real();
}

}  // namespace

TrajectoryRecord run_qj_trajectory(const QjConfig& config,
                                   const QjBackend& backend, CounterRng& rng) {
  const SteppedPropagator& prop = backend.prop;
  const Index dim = prop.dim();
  if (backend.initial.size() != dim)
    throw std::invalid_argument("backend initial state/propagator mismatch");
  const double dt = prop.dt();
  const int steps = prop.steps_per_block();
  const double stride = steps * dt;
  const long n_blocks = std::max(1L, std::lround(config.t_final / stride));

  TrajectoryRecord rec;
  rec.seed = rng.stream();
  rec.sample_times.resize(n_blocks + 1);
  rec.jx.resize(n_blocks + 1);
  rec.jy.resize(n_blocks + 1);
  rec.jz.resize(n_blocks + 1);
  if (backend.entropy_fn) rec.entropy_half.resize(n_blocks + 1);
  if (backend.fisher_fn) rec.fisher_density.resize(n_blocks + 1);

  Vector psi = backend.initial;  // unnormalized between samples of a decay
  Vector cand(dim), scratch(dim), unit(dim);

  auto sample = [&](long idx, double t) {
    unit = psi / psi.norm();
    rec.sample_times[idx] = t;
    rec.jx[idx] = quadratic_form(backend.obs_jx, unit, scratch);
    rec.jy[idx] = quadratic_form(backend.obs_jy, unit, scratch);
    rec.jz[idx] = quadratic_form(backend.obs_jz, unit, scratch);
    if (backend.entropy_fn) rec.entropy_half[idx] = backend.entropy_fn(unit);
    if (backend.fisher_fn) rec.fisher_density[idx] = backend.fisher_fn(unit);
  };
  sample(0, 0.0);

  double r = rng.uniform_open();
  // The squared norm never grows between jumps, so one test per block
  // suffices; a block that crosses the threshold is rescanned at dt
  // resolution to place the jump.
  for (long blk = 0; blk < n_blocks; ++blk) {
    const double t0 = blk * stride;
    prop.block(psi, cand);
    const double norm2 = cand.squaredNorm();
    if (!std::isfinite(norm2))
      throw NumericError("no-jump propagation produced non-finite norm",
                         t0 + stride);
    if (norm2 > r) {
      psi.swap(cand);
    } else {
      for (int k = 1; k <= steps; ++k) {
        prop.fine(psi, cand);
        psi.swap(cand);
        const double n2 = psi.squaredNorm();
        if (!std::isfinite(n2))
          throw NumericError("no-jump propagation produced non-finite norm",
                             t0 + k * dt);
        if (n2 <= r) {
          psi = apply_jump_normalized(backend.jminus, psi);
          rec.jump_times.push_back(t0 + k * dt);
          r = rng.uniform_open();
        }
      }
    }
    sample(blk + 1, (blk + 1) * stride);
  }
  return rec;
}

}  // namespace dicke
