#include "dickesim/state_diffusion.hpp"

#include <cmath>

#include "dickesim/entanglement.hpp"
#include "dickesim/expm.hpp"

namespace dicke {

namespace {

double jx_mean_pure(const RealVector& c_up, const Vector& psi) {
  // <Jx> = Re <J+>; J+ couples n -> n+1 with weight c_up[n]
  Complex acc(0.0);
  for (Index n = 0; n + 1 < psi.size(); ++n)
    acc += std::conj(psi[n + 1]) * c_up[n] * psi[n];
  return acc.real();
}

double jx_mean_density(const RealVector& c_up, const Matrix& rho) {
  double acc = 0.0;
  for (Index n = 0; n + 1 < rho.rows(); ++n)
    acc += c_up[n] * rho(n, n + 1).real();
  return acc;
}

// rho <- normalize(M rho M^dag + mix J- rho J+), symmetrized. The full
// positivity audit is the caller's business (an eigendecomposition every
// step is what this routine exists to avoid in loops).
void cp_update(Matrix& rho, const Matrix& a_op, const RealVector& c_up,
               double beta, double mix, Matrix& m, Matrix& t1, Matrix& t2) {
  const Index d = rho.rows();
  m = a_op;
  for (Index n = 0; n + 1 < d; ++n) m(n, n + 1) += beta * c_up[n];
  if (mix != 0.0) {
    // J- rho J+ shifts the matrix up-left with ladder weights; uses the
    // input state, so build it before rho is overwritten
    t2 = Matrix::Zero(d, d);
    for (Index r = 0; r + 1 < d; ++r)
      for (Index c = 0; c + 1 < d; ++c)
        t2(r, c) = mix * c_up[r] * c_up[c] * rho(r + 1, c + 1);
  }
  t1.noalias() = m * rho;
  rho.noalias() = t1 * m.adjoint();
  if (mix != 0.0) rho += t2;
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr))
    throw std::runtime_error("state lost its trace");
  rho /= tr;
}

}  // namespace

MixedState qsd_step(const MixedState& rho_in, const CollectiveOperators& ops,
                    const HamiltonianSpec& spec, double eta, double dt,
                    double dw) {
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("eta must lie in [0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const Index d = ops.n_spins + 1;
  if (rho_in.rho.rows() != d || rho_in.rho.cols() != d)
    throw std::invalid_argument("state/operator dimension mismatch");

  const Matrix h = build_hamiltonian(ops, spec);
  const double j = ops.j, kappa = spec.kappa;
  const double a = std::sqrt(kappa * eta / j);

  // exact no-signal factor; the first-order truncation drags the coherent
  // phase by ~t w^2 dt/2, which dominates the weak error on long runs
  Matrix a_op = expm(Complex(0.0, -dt) * h -
                     (0.5 * kappa * dt / j) * ops.jplus_jminus);
  const double jxm = jx_mean_density(ops.ladder_up, rho_in.rho);
  const double beta = a * (dw + 2.0 * a * jxm * dt);

  Matrix rho = rho_in.rho, m, t1, t2;
  cp_update(rho, a_op, ops.ladder_up, beta, (1.0 - eta) * kappa * dt / j, m,
            t1, t2);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8)
    throw std::runtime_error(
        "diffusive step lost positivity; reduce dt");

  MixedState out = rho_in;
  out.rho = std::move(rho);
  return out;
}

Matrix lindblad_rhs(const CollectiveOperators& ops, const Matrix& h,
                    double kappa, const Matrix& rho) {
  const double g = kappa / ops.j;
  Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
  out.noalias() += g * (ops.jminus * rho * ops.jplus);
  out.noalias() -= (0.5 * g) * (ops.jplus_jminus * rho);
  out.noalias() -= (0.5 * g) * (rho * ops.jplus_jminus);
  return out;
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Matrix lindblad_superoperator(const CollectiveOperators& ops, const Matrix& h,
                              double kappa) {
  const Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  const double g = kappa / ops.j;
  // column-major vec: vec(A rho B) = (B^T kron A) vec(rho)
  Matrix l = Complex(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
  l += g * kron(ops.jplus.transpose(), ops.jminus);
  l -= (0.5 * g) * kron(id, ops.jplus_jminus);
  l -= (0.5 * g) * kron(ops.jplus_jminus.transpose(), id);
  return l;
}

LindbladResult lindblad_evolve(const HamiltonianSpec& spec,
                               const MixedState& initial, double dt,
                               double t_final, double sample_every,
                               bool store_states) {
  validate(spec);
  if (!(dt > 0.0) || !(t_final > 0.0) || dt > t_final)
    throw std::invalid_argument("need 0 < dt <= t_final");
  if (initial.basis != StateBasis::DickeLadder)
    throw std::invalid_argument("lindblad solver runs in the ladder basis");
  const Index d = spec.n_spins + 1;
  if (initial.rho.rows() != d || initial.rho.cols() != d)
    throw std::invalid_argument("initial state has the wrong dimension");

  CollectiveOperators ops = build_collective_ops(spec.n_spins);
  const Matrix h = build_hamiltonian(ops, spec);
  const int steps = std::max(1, int(std::lround(sample_every / dt)));
  const double stride = steps * dt;
  const long n_blocks = std::max(1L, std::lround(t_final / stride));

  LindbladResult res;
  res.times.resize(n_blocks + 1);
  res.jx.resize(n_blocks + 1);
  res.jy.resize(n_blocks + 1);
  res.jz.resize(n_blocks + 1);
  if (store_states) res.states.reserve(n_blocks + 1);

  Matrix rho = initial.rho;
  rho = 0.5 * (rho + rho.adjoint()).eval();

  auto sample = [&](long idx, double t) {
    res.times[idx] = t;
    res.jx[idx] = (ops.jx * rho).trace().real();
    res.jy[idx] = (ops.jy * rho).trace().real();
    res.jz[idx] = (ops.jz * rho).trace().real();
    if (store_states) res.states.push_back(rho);
  };
  sample(0, 0.0);

  Matrix k1, k2, k3, k4, tmp;
  for (long blk = 0; blk < n_blocks; ++blk) {
    for (int s = 0; s < steps; ++s) {
      k1 = lindblad_rhs(ops, h, spec.kappa, rho);
      tmp = rho + (0.5 * dt) * k1;
      k2 = lindblad_rhs(ops, h, spec.kappa, tmp);
      tmp = rho + (0.5 * dt) * k2;
      k3 = lindblad_rhs(ops, h, spec.kappa, tmp);
      tmp = rho + dt * k3;
      k4 = lindblad_rhs(ops, h, spec.kappa, tmp);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      rho = 0.5 * (rho + rho.adjoint()).eval();

      const double t_now = blk * stride + (s + 1) * dt;
      const double drift = std::abs(rho.trace().real() - 1.0);
      if (!(drift <= 1e-6) || rho.cwiseAbs().maxCoeff() > 1e6)
        throw NumericError(
            "lindblad step unstable (trace drift); use a smaller dt", t_now);
    }
    sample(blk + 1, (blk + 1) * stride);
  }
  res.final_state = std::move(rho);
  return res;
}

namespace {

struct SampleSinks {
  TrajectoryRecord* rec;
  const CollectiveOperators* ops;
  bool entropy, fisher;
  int n_spins;
};

void sample_pure(const SampleSinks& s, long idx, double t, const Vector& psi) {
  s.rec->sample_times[idx] = t;
  s.rec->jx[idx] = expectation(s.ops->jx, psi).real();
  s.rec->jy[idx] = expectation(s.ops->jy, psi).real();
  s.rec->jz[idx] = expectation(s.ops->jz, psi).real();
  if (s.entropy)
    s.rec->entropy_half[idx] = half_chain_entropy(psi, s.n_spins);
  if (s.fisher) s.rec->fisher_density[idx] = qfi_pure(*s.ops, psi).density;
}

void sample_density(const SampleSinks& s, long idx, double t,
                    const Matrix& rho, double eta) {
  s.rec->sample_times[idx] = t;
  s.rec->jx[idx] = (s.ops->jx * rho).trace().real();
  s.rec->jy[idx] = (s.ops->jy * rho).trace().real();
  s.rec->jz[idx] = (s.ops->jz * rho).trace().real();
  const bool need_eig = s.entropy;
  if (!need_eig && !s.fisher) return;

  if (need_eig) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(rho);
    const RealVector& lam = eig.eigenvalues();
    if (lam.minCoeff() < -1e-8)
      throw NumericError("conditional state lost positivity; reduce dt", t);
    double purity = 0.0;
    for (Index i = 0; i < lam.size(); ++i) purity += lam[i] * lam[i];
    if (eta == 1.0 && purity > 1.0 - 1e-6) {
      // conditionally pure: report the entanglement entropy of the
      // dominant eigenvector, consistent with the pure-state path
      Vector top = eig.eigenvectors().col(lam.size() - 1);
      s.rec->entropy_half[idx] = half_chain_entropy(top, s.n_spins);
    } else {
      double vn = 0.0;
      for (Index i = 0; i < lam.size(); ++i)
        if (lam[i] > 1e-14) vn -= lam[i] * std::log(lam[i]);
      s.rec->entropy_half[idx] = vn;
    }
  }
  if (s.fisher) s.rec->fisher_density[idx] = qfi_mixed(*s.ops, rho).density;
}

}  // namespace

std::pair<TrajectoryRecord, HomodyneRecord> run_qsd_trajectory(
    const QsdConfig& config, CounterRng& rng) {
  const HamiltonianSpec& spec = config.hamiltonian_spec;
  validate(spec);
  if (config.eta < 0.0 || config.eta > 1.0)
    throw std::invalid_argument("eta must lie in [0, 1]");
  if (!(config.dt > 0.0) || !(config.t_final > 0.0))
    throw std::invalid_argument("dt and t_final must be > 0");

  const int n = spec.n_spins;
  const Index d = n + 1;
  const double dt = config.dt, kappa = spec.kappa;
  const int steps = std::max(1, int(std::lround(config.sample_every / dt)));
  const double stride = steps * dt;
  const long n_blocks = std::max(1L, std::lround(config.t_final / stride));
  const long n_steps = n_blocks * steps;

  CollectiveOperators ops = build_collective_ops(n);
  const Matrix h = build_hamiltonian(ops, spec);
  const PureState initial = parse_initial_state(config.initial_state, n);
  const double j = ops.j;
  const double a = std::sqrt(kappa * config.eta / j);

  TrajectoryRecord rec;
  rec.seed = rng.stream();
  rec.sample_times.resize(n_blocks + 1);
  rec.jx.resize(n_blocks + 1);
  rec.jy.resize(n_blocks + 1);
  rec.jz.resize(n_blocks + 1);
  const bool want_entropy = config.record_entropy && n >= 2;
  if (want_entropy) rec.entropy_half.resize(n_blocks + 1);
  if (config.record_fisher) rec.fisher_density.resize(n_blocks + 1);

  HomodyneRecord hom;
  hom.sample_times.resize(n_blocks);
  hom.sampled_di.resize(n_blocks);
  if (config.record_increments) {
    hom.step_times.resize(n_steps);
    hom.increments.resize(n_steps);
  }

  SampleSinks sinks{&rec, &ops, want_entropy, config.record_fisher, n};

  const bool pure_path =
      !config.force_density_path && config.eta == 1.0;
  const bool superop_path = !config.force_density_path && config.eta == 0.0 &&
                            d * d <= 4096;

  auto handle_di = [&](long step_idx, double t, double di) {
    hom.integrated += di;
    if (step_idx % steps == 0) {
      const long blk = step_idx / steps;
      hom.sample_times[blk] = t;
      hom.sampled_di[blk] = di;
    }
    if (config.record_increments) {
      hom.step_times[step_idx] = t;
      hom.increments[step_idx] = di;
    }
  };

  if (pure_path) {
    // eta = 1 keeps the conditional state pure; the update is the M
    // operator alone, tridiagonal in the ladder basis.
    Vector psi = initial.amplitudes.normalized();
    Vector next(d);
    std::vector<Complex> a_diag(d);
    for (Index i = 0; i < d; ++i) {
      const double m = double(i) - j;
      const double hd = spec.omega_z * m * m;
      a_diag[i] = Complex(1.0, 0.0) - Complex(0.0, dt) * hd -
                  0.5 * kappa * dt / j * ops.jplus_jminus(i, i).real();
    }
    const Complex drive(0.0, -0.5 * dt * spec.omega0);
    const RealVector& c = ops.ladder_up;

    sample_pure(sinks, 0, 0.0, psi);
    for (long step = 0; step < n_steps; ++step) {
      const double t = step * dt;
      const double jxm = jx_mean_pure(c, psi);
      const double dw = std::sqrt(dt) * rng.normal();
      const double beta = a * dw + 2.0 * a * a * jxm * dt;
      handle_di(step, t, kappa / j * jxm + a * dw);

      for (Index i = 0; i < d; ++i) {
        Complex acc = a_diag[i] * psi[i];
        if (i + 1 < d) acc += (drive + beta) * (c[i] * psi[i + 1]);
        if (i > 0) acc += drive * (c[i - 1] * psi[i - 1]);
        next[i] = acc;
      }
      const double norm = next.norm();
      if (!std::isfinite(norm) || norm == 0.0)
        throw NumericError("diffusive update produced non-finite state",
                           t + dt);
      psi = next / norm;
      if ((step + 1) % steps == 0)
        sample_pure(sinks, (step + 1) / steps, t + dt, psi);
    }
  } else if (superop_path) {
    // eta = 0 is the unconditional average: advance with the exact
    // exponential of the Lindblad generator, one step per dt. No noise is
    // consumed, so any seed gives the identical record.
    const Matrix prop = expm(dt * lindblad_superoperator(ops, h, kappa));
    Matrix rho = (initial.amplitudes * initial.amplitudes.adjoint());
    Eigen::Map<Vector> rho_vec(rho.data(), d * d);
    Vector next(d * d);

    sample_density(sinks, 0, 0.0, rho, config.eta);
    for (long step = 0; step < n_steps; ++step) {
      const double t = step * dt;
      handle_di(step, t, kappa / j * jx_mean_density(ops.ladder_up, rho));
      next.noalias() = prop * rho_vec;
      rho_vec = next;
      const double tr = rho.trace().real();
      if (!std::isfinite(tr) || std::abs(tr - 1.0) > 1e-6)
        throw NumericError("superoperator step lost the trace", t + dt);
      if ((step + 1) % steps == 0)
        sample_density(sinks, (step + 1) / steps, t + dt, rho, config.eta);
    }
  } else {
    Matrix rho = initial.amplitudes * initial.amplitudes.adjoint();
    // exact no-signal factor, built once; see qsd_step
    const Matrix a_op = expm(Complex(0.0, -dt) * h -
                             (0.5 * kappa * dt / j) * ops.jplus_jminus);
    const double mix = (1.0 - config.eta) * kappa * dt / j;
    Matrix m, t1, t2;

    sample_density(sinks, 0, 0.0, rho, config.eta);
    for (long step = 0; step < n_steps; ++step) {
      const double t = step * dt;
      const double jxm = jx_mean_density(ops.ladder_up, rho);
      const double dw = std::sqrt(dt) * rng.normal();
      const double beta = a * (dw + 2.0 * a * jxm * dt);
      handle_di(step, t, kappa / j * jxm + a * dw);
      try {
        cp_update(rho, a_op, ops.ladder_up, beta, mix, m, t1, t2);
      } catch (const std::runtime_error& e) {
        throw NumericError(e.what(), t + dt);
      }
      if (rho.diagonal().real().minCoeff() < -1e-8)
        throw NumericError("diffusive step lost positivity; reduce dt",
                           t + dt);
      if ((step + 1) % steps == 0)
        sample_density(sinks, (step + 1) / steps, t + dt, rho, config.eta);
    }
  }
  return {std::move(rec), std::move(hom)};
}

}  // namespace dicke
