#include "dickesim/state_diffusion.hpp"

#include <cmath>

#include "dickesim/expm.hpp"
#include "dickesim/states.hpp"
#include "doctest.h"

using dicke::build_collective_ops;
using dicke::build_hamiltonian;
using dicke::Complex;
using dicke::CounterRng;
using dicke::HamiltonianSpec;
using dicke::Matrix;
using dicke::MixedState;
using dicke::QsdConfig;
using dicke::Vector;

namespace {

HamiltonianSpec spec_of(int n, double omega0, double omega_z = 0.0) {
  HamiltonianSpec s;
  s.n_spins = n;
  s.omega0 = omega0;
  s.omega_z = omega_z;
  return s;
}

double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

}  // namespace

TEST_CASE("diffusive step validates its arguments") {
  auto ops = build_collective_ops(4);
  auto rho = dicke::to_mixed(dicke::polarized_state(4));
  auto spec = spec_of(4, 1.0);
  CHECK_THROWS_AS(dicke::qsd_step(rho, ops, spec, -0.1, 1e-3, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(dicke::qsd_step(rho, ops, spec, 1.1, 1e-3, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(dicke::qsd_step(rho, ops, spec, 0.5, 0.0, 0.0),
                  std::invalid_argument);
  auto wrong = dicke::to_mixed(dicke::polarized_state(5));
  CHECK_THROWS_AS(dicke::qsd_step(wrong, ops, spec, 0.5, 1e-3, 0.0),
                  std::invalid_argument);
}

TEST_CASE("unmonitored step is a first-order lindblad step") {
  const int n = 4;
  auto ops = build_collective_ops(n);
  auto spec = spec_of(n, 1.2, 0.3);
  Matrix h = build_hamiltonian(ops, spec);
  auto rho = dicke::to_mixed(dicke::polarized_state(n));

  const double dt = 1e-4;
  MixedState stepped = dicke::qsd_step(rho, ops, spec, 0.0, dt, 0.123);
  Matrix euler = rho.rho + dt * dicke::lindblad_rhs(ops, h, 1.0, rho.rho);
  CHECK((stepped.rho - euler).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(stepped.rho.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("perfect monitoring keeps the conditional state pure") {
  const int n = 6;
  auto ops = build_collective_ops(n);
  auto spec = spec_of(n, 0.8);
  MixedState rho = dicke::to_mixed(dicke::polarized_state(n));
  CounterRng rng(3u, 0u);
  const double dt = 2e-3;
  for (int step = 0; step < 50; ++step) {
    const double dw = std::sqrt(dt) * rng.normal();
    rho = dicke::qsd_step(rho, ops, spec, 1.0, dt, dw);
    CHECK(std::abs(purity(rho.rho) - 1.0) < 1e-10);
  }
  // imperfect monitoring mixes the state
  MixedState lossy = dicke::to_mixed(dicke::polarized_state(n));
  for (int step = 0; step < 50; ++step) {
    const double dw = std::sqrt(dt) * rng.normal();
    lossy = dicke::qsd_step(lossy, ops, spec, 0.5, dt, dw);
  }
  CHECK(purity(lossy.rho) < 1.0 - 1e-4);
  CHECK(std::abs(lossy.rho.trace().real() - 1.0) < 1e-12);
  CHECK((lossy.rho - lossy.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("unconditional trajectory reproduces the master equation") {
  // eta = 0 runs the exact exponential stepper: equal to lindblad_evolve
  // at every sample time and independent of the seed
  QsdConfig config;
  config.hamiltonian_spec = spec_of(6, 1.5);
  config.eta = 0.0;
  config.dt = 5e-3;
  config.t_final = 10.0;
  config.record_entropy = false;

  CounterRng r1(1u, 0u), r2(77u, 5u);
  auto [rec1, hom1] = dicke::run_qsd_trajectory(config, r1);
  auto [rec2, hom2] = dicke::run_qsd_trajectory(config, r2);
  for (long i = 0; i < rec1.jz.size(); ++i) {
    CHECK(rec1.jz[i] == rec2.jz[i]);  // no randomness consumed
    CHECK(hom1.sampled_di.size() == hom2.sampled_di.size());
  }

  auto lind = dicke::lindblad_evolve(config.hamiltonian_spec,
                                     dicke::to_mixed(dicke::polarized_state(6)),
                                     1e-3, 10.0, 0.1);
  REQUIRE(lind.times.size() == rec1.sample_times.size());
  for (long i = 0; i < rec1.jz.size(); ++i) {
    CHECK(std::abs(rec1.jz[i] - lind.jz[i]) < 1e-6);
    CHECK(std::abs(rec1.jx[i] - lind.jx[i]) < 1e-6);
  }
}

TEST_CASE("pure path and density path tell the same story") {
  // same noise, different schemes: the pure path truncates the no-signal
  // factor at first order, the density path exponentiates it exactly, so
  // agreement is at the accumulated O(dt^2)-per-step scale, amplified by
  // the trajectory's sensitivity to its own record over the horizon
  QsdConfig config;
  config.hamiltonian_spec = spec_of(6, 1.0);
  config.eta = 1.0;
  config.dt = 1e-3;
  config.t_final = 3.0;

  CounterRng r1(42u, 7u), r2(42u, 7u);
  auto [pure_rec, pure_hom] = dicke::run_qsd_trajectory(config, r1);
  config.force_density_path = true;
  auto [dens_rec, dens_hom] = dicke::run_qsd_trajectory(config, r2);

  REQUIRE(pure_rec.jz.size() == dens_rec.jz.size());
  for (long i = 0; i < pure_rec.jz.size(); ++i) {
    const double tol = pure_rec.sample_times[i] <= 0.2 ? 5e-4 : 1e-2;
    CHECK(std::abs(pure_rec.jz[i] - dens_rec.jz[i]) < tol);
    CHECK(std::abs(pure_rec.jx[i] - dens_rec.jx[i]) < tol);
    CHECK(std::abs(pure_rec.entropy_half[i] - dens_rec.entropy_half[i]) <
          tol);
  }
  // the shared noise cancels in the difference of integrated records; what
  // remains is the drift part, bounded by n_steps * (kappa/j) * max |d<Jx>|
  CHECK(std::abs(pure_hom.integrated - dens_hom.integrated) < 2.0);
}

TEST_CASE("homodyne record shapes and bookkeeping") {
  QsdConfig config;
  config.hamiltonian_spec = spec_of(4, 0.5);
  config.eta = 0.7;
  config.dt = 0.02;
  config.sample_every = 0.1;  // 5 steps per block
  config.t_final = 2.0;
  config.record_increments = true;

  CounterRng rng(9u, 1u);
  auto [rec, hom] = dicke::run_qsd_trajectory(config, rng);
  REQUIRE(rec.sample_times.size() == 21);
  REQUIRE(hom.sampled_di.size() == 20);
  REQUIRE(hom.increments.size() == 100);

  double total = 0.0;
  for (long i = 0; i < hom.increments.size(); ++i) total += hom.increments[i];
  CHECK(std::abs(total - hom.integrated) < 1e-12);
  for (int blk = 0; blk < 20; ++blk) {
    CHECK(hom.sampled_di[blk] == hom.increments[blk * 5]);
    CHECK(std::abs(hom.sample_times[blk] - 0.1 * blk) < 1e-12);
  }

  // conditional state is mixed: entropy present, late-time jz bounded
  for (long i = 0; i < rec.jz.size(); ++i) {
    CHECK(rec.jz[i] <= 2.0 + 1e-9);
    CHECK(rec.jz[i] >= -2.0 - 1e-9);
  }

  CounterRng rng2(9u, 1u);
  auto [rec2, hom2] = dicke::run_qsd_trajectory(config, rng2);
  for (long i = 0; i < rec.jz.size(); ++i) CHECK(rec.jz[i] == rec2.jz[i]);
  CHECK(hom.integrated == hom2.integrated);
}

TEST_CASE("trajectory config validation") {
  QsdConfig config;
  config.hamiltonian_spec = spec_of(4, 1.0);
  config.eta = 1.5;
  CounterRng rng(1u, 0u);
  CHECK_THROWS_AS(dicke::run_qsd_trajectory(config, rng),
                  std::invalid_argument);
  config.eta = 1.0;
  config.dt = 0.0;
  CHECK_THROWS_AS(dicke::run_qsd_trajectory(config, rng),
                  std::invalid_argument);
}

TEST_CASE("lindblad superoperator matches the right-hand side") {
  const int n = 5;
  auto ops = build_collective_ops(n);
  auto spec = spec_of(n, 1.3, -0.2);
  Matrix h = build_hamiltonian(ops, spec);
  Matrix l = dicke::lindblad_superoperator(ops, h, 1.0);

  // random hermitian unit-trace test matrix
  Matrix x = Matrix::Random(n + 1, n + 1);
  Matrix rho = x * x.adjoint();
  rho /= rho.trace().real();

  Matrix rhs = dicke::lindblad_rhs(ops, h, 1.0, rho);
  Eigen::Map<Vector> rho_vec(rho.data(), (n + 1) * (n + 1));
  Vector lv = l * rho_vec;
  Eigen::Map<Vector> rhs_vec(rhs.data(), (n + 1) * (n + 1));
  CHECK((lv - rhs_vec).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rk4 matches the exact exponential of the generator") {
  const int n = 4;
  auto ops = build_collective_ops(n);
  auto spec = spec_of(n, 0.9);
  Matrix h = build_hamiltonian(ops, spec);
  auto init = dicke::to_mixed(dicke::polarized_state(n));

  auto res = dicke::lindblad_evolve(spec, init, 1e-3, 2.0, 2.0);
  Matrix l = dicke::lindblad_superoperator(ops, h, 1.0);
  Matrix u = dicke::expm(2.0 * l);
  Matrix rho0 = init.rho;
  Eigen::Map<Vector> v0(rho0.data(), 25);
  Vector vT = u * v0;
  Eigen::Map<Matrix> rhoT(vT.data(), 5, 5);
  CHECK((res.final_state - rhoT).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dark state is stationary under undriven decay") {
  auto spec = spec_of(6, 0.0);
  auto init = dicke::to_mixed(dicke::polarized_state(6, false));
  auto res = dicke::lindblad_evolve(spec, init, 2e-3, 5.0, 0.5);
  for (long i = 0; i < res.jz.size(); ++i)
    CHECK(std::abs(res.jz[i] + 3.0) < 1e-12);
  CHECK(std::abs(res.final_state.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("driven steady state approaches the mean-field branch") {
  // below the transition <Jz>/J -> -sqrt(1 - (omega0/kappa)^2)
  const int n = 32;
  auto spec = spec_of(n, 0.5);
  auto res = dicke::lindblad_evolve(
      spec, dicke::to_mixed(dicke::polarized_state(n)), 5e-3, 15.0, 1.0);
  const double mz = res.jz[res.jz.size() - 1] / (0.5 * n);
  CHECK(std::abs(mz + std::sqrt(1.0 - 0.25)) < 0.1);
}

TEST_CASE("trace stays pinned over long evolutions") {
  auto spec = spec_of(8, 1.0, 0.1);
  auto res = dicke::lindblad_evolve(
      spec, dicke::to_mixed(dicke::polarized_state(8)), 2.5e-3, 20.0, 1.0);
  CHECK(std::abs(res.final_state.trace().real() - 1.0) < 1e-10);
  CHECK((res.final_state - res.final_state.adjoint()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("oversized steps raise a numeric error with the failing time") {
  auto spec = spec_of(8, 0.0);
  bool threw = false;
  try {
    dicke::lindblad_evolve(spec, dicke::to_mixed(dicke::polarized_state(8)),
                           2.0, 40.0, 2.0);
  } catch (const dicke::NumericError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("smaller dt") != std::string::npos);
    CHECK(std::string(e.what()).find("at t") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("lindblad solver validates its inputs") {
  auto spec = spec_of(4, 1.0);
  auto init = dicke::to_mixed(dicke::polarized_state(4));
  CHECK_THROWS_AS(dicke::lindblad_evolve(spec, init, 0.0, 1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(dicke::lindblad_evolve(spec, init, 2.0, 1.0, 0.1),
                  std::invalid_argument);
  auto wrong = dicke::to_mixed(dicke::polarized_state(5));
  CHECK_THROWS_AS(dicke::lindblad_evolve(spec, wrong, 1e-3, 1.0, 0.1),
                  std::invalid_argument);
}
