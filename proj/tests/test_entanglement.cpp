#include "dickesim/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dickesim/collective.hpp"
#include "dickesim/states.hpp"
#include "doctest.h"

using dicke::Complex;
using dicke::Matrix;
using dicke::PureState;
using dicke::Vector;

namespace {

Vector random_ladder_state(int n_spins, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Vector v(n_spins + 1);
  for (int i = 0; i <= n_spins; ++i) v[i] = Complex(d(gen), d(gen));
  return v / v.norm();
}

std::vector<double> spectrum(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  std::vector<double> s(es.eigenvalues().data(),
                        es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_CASE("half partition of the four-spin middle rung") {
  // |J=2, M=0>: reduced two-spin ladder spectrum {1/6, 2/3, 1/6}
  PureState s = dicke::excitation_state(4, 2);
  Matrix rho = dicke::dicke_reduced_density(s.amplitudes, 4, 2);
  auto spec = spectrum(rho);
  REQUIRE(spec.size() == 3);
  CHECK(std::abs(spec[0] - 1.0 / 6) < 1e-12);
  CHECK(std::abs(spec[1] - 1.0 / 6) < 1e-12);
  CHECK(std::abs(spec[2] - 2.0 / 3) < 1e-12);

  const double expect =
      -(2.0 * (1.0 / 6) * std::log(1.0 / 6) + (2.0 / 3) * std::log(2.0 / 3));
  CHECK(std::abs(dicke::entropy(rho) - expect) < 1e-12);
  CHECK(std::abs(expect - 0.8675632284814612) < 1e-12);
}

TEST_CASE("ladder reduced density matches the full-space partial trace") {
  for (int n : {4, 6, 8, 10}) {
    const int n_a = n / 2;
    std::vector<int> sites(n_a);
    for (int i = 0; i < n_a; ++i) sites[i] = i;
    for (int rep = 0; rep < 10; ++rep) {
      PureState s;
      s.amplitudes = random_ladder_state(n, 1000u * n + rep);
      s.n_spins = n;
      PureState full = dicke::ladder_to_full(s);
      Matrix small = dicke::dicke_reduced_density(s.amplitudes, n, n_a);
      Matrix big = dicke::full_reduced_density(full.amplitudes, n, sites);
      auto sa = spectrum(small);
      auto sb = spectrum(big);
      // the 2^{n_a} spectrum carries extra exact zeros
      REQUIRE(sb.size() >= sa.size());
      double err = 0.0;
      for (std::size_t i = 0; i < sa.size(); ++i)
        err = std::max(err,
                       std::abs(sa[sa.size() - 1 - i] - sb[sb.size() - 1 - i]));
      for (std::size_t i = 0; i + sa.size() < sb.size(); ++i)
        err = std::max(err, std::abs(sb[i]));
      CHECK(err < 1e-10);
      CHECK(std::abs(dicke::entropy(small) - dicke::entropy(big)) < 1e-10);
    }
  }
}

TEST_CASE("product states carry no entanglement") {
  for (int n : {2, 5, 9}) {
    PureState up = dicke::polarized_state(n);
    CHECK(std::abs(dicke::half_chain_entropy(up.amplitudes, n)) < 1e-12);
  }
}

TEST_CASE("ghz state in the product space has one bit of entropy") {
  const int n = 6;
  Vector psi = Vector::Zero(1 << n);
  psi[0] = 1.0 / std::sqrt(2.0);
  psi[(1 << n) - 1] = 1.0 / std::sqrt(2.0);
  Matrix rho = dicke::full_reduced_density(psi, n, {0, 1, 2});
  CHECK(std::abs(dicke::entropy(rho) - std::log(2.0)) < 1e-12);
}

TEST_CASE("partial trace validates its site list") {
  Vector psi = Vector::Zero(4);
  psi[0] = 1.0;
  CHECK_THROWS_AS(dicke::full_reduced_density(psi, 2, {0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(dicke::full_reduced_density(psi, 2, {2}),
                  std::invalid_argument);
}

TEST_CASE("entropy of a classical mixture") {
  Matrix rho = Matrix::Zero(3, 3);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  CHECK(std::abs(dicke::entropy(rho) - std::log(2.0)) < 1e-13);
  Matrix pure = Matrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  CHECK(dicke::entropy(pure) < 1e-12);
}

TEST_CASE("fisher information of product and ghz states") {
  auto ops = dicke::build_collective_ops(4);
  // coherent |J,J>: max variance J/2 -> F_Q = 2J = N
  PureState up = dicke::polarized_state(4);
  auto f1 = dicke::qfi_pure(ops, up.amplitudes);
  CHECK(std::abs(f1.fisher - 4.0) < 1e-10);
  CHECK(std::abs(f1.density - 1.0) < 1e-10);

  // ghz in the ladder: (|J,J> + |J,-J>)/sqrt(2), Var Jz = J^2 -> F_Q = N^2
  Vector ghz = Vector::Zero(5);
  ghz[0] = ghz[4] = 1.0 / std::sqrt(2.0);
  auto f2 = dicke::qfi_pure(ops, ghz);
  CHECK(std::abs(f2.fisher - 16.0) < 1e-10);
  CHECK(std::abs(f2.density - 4.0) < 1e-10);
}

TEST_CASE("pure and mixed fisher agree on pure states") {
  auto ops = dicke::build_collective_ops(6);
  for (int rep = 0; rep < 20; ++rep) {
    Vector psi = random_ladder_state(6, 300u + rep);
    auto fp = dicke::qfi_pure(ops, psi);
    Matrix rho = psi * psi.adjoint();
    auto fm = dicke::qfi_mixed(ops, rho);
    CHECK(std::abs(fp.fisher - fm.fisher) < 1e-8);
  }
}

TEST_CASE("pre-applied fisher equals the operator form") {
  auto ops = dicke::build_collective_ops(5);
  Vector psi = random_ladder_state(5, 7u);
  auto direct = dicke::qfi_pure(ops, psi);
  auto applied = dicke::qfi_pure_applied(psi, ops.jx * psi, ops.jy * psi,
                                         ops.jz * psi, 5);
  CHECK(std::abs(direct.fisher - applied.fisher) < 1e-11);
}

TEST_CASE("maximally mixed state carries no fisher information") {
  auto ops = dicke::build_collective_ops(3);
  Matrix rho = Matrix::Identity(4, 4) / 4.0;
  CHECK(std::abs(dicke::qfi_mixed(ops, rho).fisher) < 1e-10);
}
