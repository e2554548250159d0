#include "dickesim/quantum_jump.hpp"

#include <cmath>

#include "dickesim/entanglement.hpp"
#include "dickesim/expm.hpp"
#include "dickesim/states.hpp"
#include "doctest.h"

using dicke::build_collective_ops;
using dicke::Complex;
using dicke::CounterRng;
using dicke::Matrix;
using dicke::PureState;
using dicke::QjBackend;
using dicke::QjConfig;
using dicke::SparseCsr;
using dicke::SteppedPropagator;
using dicke::Vector;

TEST_CASE("jump lowers one ladder rung") {
  auto ops = build_collective_ops(2);
  PureState top = dicke::polarized_state(2);
  PureState lowered = dicke::apply_jump(top, ops.jminus);
  CHECK(std::abs(lowered.amplitudes[1] - 1.0) < 1e-14);

  // equal ladder coefficients survive normalization unchanged
  PureState sup;
  sup.n_spins = 2;
  sup.amplitudes = Vector::Zero(3);
  sup.amplitudes[2] = sup.amplitudes[1] = 1.0 / std::sqrt(2.0);
  PureState jumped = dicke::apply_jump(sup, ops.jminus);
  CHECK(std::abs(jumped.amplitudes[1] - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(jumped.amplitudes[0] - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(jumped.amplitudes[2]) < 1e-14);

  PureState dark = dicke::polarized_state(2, false);
  CHECK_THROWS_AS(dicke::apply_jump(dark, ops.jminus), std::runtime_error);
}

TEST_CASE("jump probability on four spins") {
  auto ops = build_collective_ops(4);
  const double x = 3e-4;  // kappa * dt
  PureState top = dicke::polarized_state(4);
  CHECK(std::abs(dicke::jump_probability(top, ops, 1.0, x) - 2 * x) < 1e-18);

  PureState dark = dicke::polarized_state(4, false);
  CHECK(dicke::jump_probability(dark, ops, 1.0, x) == 0.0);

  PureState sup;
  sup.n_spins = 4;
  sup.amplitudes = Vector::Zero(5);
  sup.amplitudes[4] = sup.amplitudes[0] = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(dicke::jump_probability(sup, ops, 1.0, x) - x) < 1e-18);

  // clipped at 1 for absurd steps
  CHECK(dicke::jump_probability(top, ops, 1.0, 10.0) == 1.0);
}

TEST_CASE("default step honors kappa dt = 0.002 / N") {
  QjConfig config;
  config.hamiltonian_spec.n_spins = 6;
  config.hamiltonian_spec.omega0 = 1.0;
  QjBackend b =
      dicke::make_dicke_qj_backend(config, dicke::polarized_state(6));
  CHECK(std::abs(b.prop.dt() - 0.002 / 6) < 1e-18);
  CHECK(b.prop.steps_per_block() == 300);  // 0.1 stride
}

TEST_CASE("sampling grid snaps the stride to whole steps") {
  QjConfig config;
  config.hamiltonian_spec.n_spins = 4;
  config.hamiltonian_spec.omega0 = 0.7;
  config.dt = 0.03;
  config.sample_every = 0.1;  // snaps to 3 steps = 0.09
  config.t_final = 1.0;
  config.record_entropy = false;
  QjBackend b =
      dicke::make_dicke_qj_backend(config, dicke::polarized_state(4));
  CounterRng rng(1u, 0u);
  auto rec = dicke::run_qj_trajectory(config, b, rng);
  REQUIRE(rec.sample_times.size() == 12);
  CHECK(std::abs(rec.sample_times[1] - 0.09) < 1e-15);
  CHECK(std::abs(rec.sample_times[11] - 0.99) < 1e-12);
  for (int i = 1; i < 12; ++i)
    CHECK(rec.sample_times[i] > rec.sample_times[i - 1]);
}

TEST_CASE("zero dissipation reduces to unitary evolution") {
  const int n = 6;
  auto ops = build_collective_ops(n);
  Matrix h = 1.3 * ops.jx + 0.2 * ops.jz * ops.jz;
  const double dt = 1e-3;

  QjBackend b;
  b.prop = SteppedPropagator(h, dt, 100);
  b.jminus = SparseCsr::from_dense(Matrix::Zero(n + 1, n + 1));
  b.obs_jx = SparseCsr::from_dense(ops.jx);
  b.obs_jy = SparseCsr::from_dense(ops.jy);
  b.obs_jz = SparseCsr::from_dense(ops.jz);
  b.initial = dicke::polarized_state(n).amplitudes;
  b.j = ops.j;
  b.kappa = 0.0;

  QjConfig config;
  config.hamiltonian_spec.n_spins = n;
  config.hamiltonian_spec.omega0 = 1.3;
  config.hamiltonian_spec.omega_z = 0.2;
  config.t_final = 5.0;
  config.sample_every = 0.1;

  CounterRng rng(11u, 2u);
  auto rec = dicke::run_qj_trajectory(config, b, rng);
  CHECK(rec.jump_times.empty());

  for (long i = 0; i < rec.sample_times.size(); ++i) {
    Vector phi = dicke::expm(Complex(0, -1) * rec.sample_times[i] * h) *
                 b.initial;
    CHECK(std::abs(rec.jx[i] - phi.dot(ops.jx * phi).real()) < 1e-8);
    CHECK(std::abs(rec.jz[i] - phi.dot(ops.jz * phi).real()) < 1e-8);
  }
}

TEST_CASE("undriven decay hops down the ladder exactly N times") {
  const int n = 6;
  QjConfig config;
  config.hamiltonian_spec.n_spins = n;
  config.hamiltonian_spec.omega0 = 0.0;
  config.t_final = 40.0;
  config.record_entropy = false;
  QjBackend b =
      dicke::make_dicke_qj_backend(config, dicke::polarized_state(n));
  CounterRng rng(314159u, 0u);
  auto rec = dicke::run_qj_trajectory(config, b, rng);

  CHECK(rec.jump_times.size() == n);
  for (std::size_t i = 1; i < rec.jump_times.size(); ++i)
    CHECK(rec.jump_times[i] > rec.jump_times[i - 1]);
  CHECK(rec.jump_times.back() <= config.t_final);

  // H_nj is diagonal, so between jumps the state sits on one rung and
  // <Jz> is an exact integer for even N
  for (long i = 0; i < rec.jz.size(); ++i) {
    CHECK(std::abs(rec.jz[i] - std::round(rec.jz[i])) < 1e-9);
    CHECK(rec.jz[i] >= -3.0 - 1e-12);
    CHECK(rec.jz[i] <= 3.0 + 1e-12);
  }
  CHECK(std::abs(rec.jz[rec.jz.size() - 1] + 3.0) < 1e-9);
}

TEST_CASE("identical config and stream reproduce the record bitwise") {
  QjConfig config;
  config.hamiltonian_spec.n_spins = 8;
  config.hamiltonian_spec.omega0 = 1.5;
  config.t_final = 10.0;
  QjBackend b =
      dicke::make_dicke_qj_backend(config, dicke::polarized_state(8));

  CounterRng r1(5u, 3u), r2(5u, 3u);
  auto a = dicke::run_qj_trajectory(config, b, r1);
  auto c = dicke::run_qj_trajectory(config, b, r2);
  CHECK(a.jump_times == c.jump_times);
  CHECK(a.seed == c.seed);
  REQUIRE(a.jz.size() == c.jz.size());
  for (long i = 0; i < a.jz.size(); ++i) {
    CHECK(a.jz[i] == c.jz[i]);
    CHECK(a.entropy_half[i] == c.entropy_half[i]);
  }

  // a different stream gives different jump times
  CounterRng r3(5u, 4u);
  auto d = dicke::run_qj_trajectory(config, b, r3);
  CHECK(a.jump_times != d.jump_times);
}

TEST_CASE("driven run crosses the transition with entropy recorded") {
  QjConfig config;
  config.hamiltonian_spec.n_spins = 10;
  config.hamiltonian_spec.omega0 = 1.0;
  config.t_final = 20.0;
  config.record_fisher = true;
  QjBackend b =
      dicke::make_dicke_qj_backend(config, dicke::polarized_state(10));
  CounterRng rng(17u, 5u);
  auto rec = dicke::run_qj_trajectory(config, b, rng);

  CHECK(rec.jump_times.size() > 0);
  REQUIRE(rec.entropy_half.size() == rec.sample_times.size());
  REQUIRE(rec.fisher_density.size() == rec.sample_times.size());
  CHECK(rec.entropy_half[0] < 1e-12);  // product state start
  double late = 0.0;
  for (long i = rec.entropy_half.size() / 2; i < rec.entropy_half.size(); ++i)
    late = std::max(late, rec.entropy_half[i]);
  CHECK(late > 0.1);  // entanglement builds up at the critical drive
  for (long i = 0; i < rec.fisher_density.size(); ++i)
    CHECK(rec.fisher_density[i] >= -1e-12);
}

TEST_CASE("backend factory rejects mismatched input") {
  QjConfig config;
  config.hamiltonian_spec.n_spins = 4;
  config.hamiltonian_spec.omega0 = 1.0;
  CHECK_THROWS_AS(
      dicke::make_dicke_qj_backend(config, dicke::polarized_state(5)),
      std::invalid_argument);
  PureState full = dicke::ladder_to_full(dicke::polarized_state(4));
  CHECK_THROWS_AS(dicke::make_dicke_qj_backend(config, full),
                  std::invalid_argument);
}
