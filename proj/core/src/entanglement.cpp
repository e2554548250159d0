#include "dickesim/entanglement.hpp"

#include <algorithm>
#include <cmath>

namespace dicke {

namespace {

constexpr double kEigFloor = 1e-14;

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

Matrix dicke_reduced_density(const Vector& amplitudes, int n_spins, int n_a) {
  if (n_spins < 2) throw std::invalid_argument("need n_spins >= 2 to bipartition");
  if (amplitudes.size() != n_spins + 1)
    throw std::invalid_argument("amplitude count != n_spins + 1");
  if (n_a < 1 || n_a > n_spins - 1)
    throw std::invalid_argument("block size outside 1..n_spins-1");

  const int n_b = n_spins - n_a;
  // A symmetric state splits as |N, n> = sum_k A(k, n-k) |n_a, k>|n_b, n-k>
  // with A(k, m)^2 = C(n_a, k) C(n_b, m) / C(N, k+m). The reduced density
  // matrix is then the Gram matrix of the rows of B(k, m) = c_{k+m} A(k, m),
  // which keeps it positive semidefinite by construction.
  Matrix b = Matrix::Zero(n_a + 1, n_b + 1);
  for (int k = 0; k <= n_a; ++k) {
    const double la = log_choose(n_a, k);
    for (int m = 0; m <= n_b; ++m) {
      const Complex c = amplitudes[k + m];
      if (c == Complex(0.0)) continue;
      const double lw =
          0.5 * (la + log_choose(n_b, m) - log_choose(n_spins, k + m));
      b(k, m) = c * std::exp(lw);
    }
  }
  return b * b.adjoint();
}

Matrix full_reduced_density(const Vector& amplitudes, int n_spins,
                            const std::vector<int>& sites) {
  if (n_spins < 2 || n_spins > 24)
    throw std::invalid_argument("full basis supports 2..24 spins");
  if (amplitudes.size() != (Index(1) << n_spins))
    throw std::invalid_argument("amplitude count != 2^n_spins");
  const int n_a = int(sites.size());
  if (n_a < 1 || n_a > n_spins - 1)
    throw std::invalid_argument("block size outside 1..n_spins-1");
  std::uint32_t block_mask = 0;
  for (int s : sites) {
    if (s < 0 || s >= n_spins) throw std::invalid_argument("site out of range");
    if (block_mask & (1u << s)) throw std::invalid_argument("duplicate site");
    block_mask |= 1u << s;
  }

  // Scatter the block / environment sub-indices into full-space indices,
  // then the state is a matrix Psi(a, e) and rho_A = Psi Psi^dagger.
  const int n_e = n_spins - n_a;
  std::vector<std::uint32_t> block_sites, env_sites;
  for (int s = 0; s < n_spins; ++s)
    (block_mask >> s & 1u ? block_sites : env_sites).push_back(s);

  auto scatter = [](const std::vector<std::uint32_t>& positions,
                    std::uint32_t bits) {
    std::uint32_t out = 0;
    for (std::size_t i = 0; i < positions.size(); ++i)
      if (bits >> i & 1u) out |= 1u << positions[i];
    return out;
  };

  const Index da = Index(1) << n_a, de = Index(1) << n_e;
  Matrix psi(da, de);
  for (Index a = 0; a < da; ++a) {
    const std::uint32_t sa = scatter(block_sites, std::uint32_t(a));
    for (Index e = 0; e < de; ++e)
      psi(a, e) = amplitudes[sa | scatter(env_sites, std::uint32_t(e))];
  }
  return psi * psi.adjoint();
}

double entropy(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("rho not square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index i = 0; i < rho.rows(); ++i) {
    const double l = eig.eigenvalues()[i];
    if (l > kEigFloor) s -= l * std::log(l);
  }
  return s;
}

double half_chain_entropy(const Vector& amplitudes, int n_spins) {
  return entropy(dicke_reduced_density(amplitudes, n_spins, n_spins / 2));
}

namespace {

FisherResult finish_fisher(Eigen::Matrix3d m, int n_spins) {
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m, Eigen::EigenvaluesOnly);
  FisherResult r;
  r.direction_matrix = m;
  r.fisher = eig.eigenvalues().maxCoeff();
  r.density = r.fisher / n_spins;
  return r;
}

}  // namespace

FisherResult qfi_pure_applied(const Vector& psi, const Vector& yx,
                              const Vector& yy, const Vector& yz,
                              int n_spins) {
  const Vector* y[3] = {&yx, &yy, &yz};
  Complex first[3];
  for (int a = 0; a < 3; ++a) first[a] = psi.dot(*y[a]);
  Eigen::Matrix3d m;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      // 2<{Ja,Jb}> - 4<Ja><Jb>, with <{Ja,Jb}> = 2 Re <Ja psi|Jb psi>
      m(a, b) = 4.0 * (y[a]->dot(*y[b])).real() -
                4.0 * (first[a] * first[b]).real();
  return finish_fisher(m, n_spins);
}

FisherResult qfi_pure(const CollectiveOperators& ops, const Vector& psi) {
  if (psi.size() != ops.n_spins + 1)
    throw std::invalid_argument("state/operator dimension mismatch");
  return qfi_pure_applied(psi, ops.jx * psi, ops.jy * psi, ops.jz * psi,
                          ops.n_spins);
}

FisherResult qfi_mixed(const CollectiveOperators& ops, const Matrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() != ops.n_spins + 1)
    throw std::invalid_argument("state/operator dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (rho + rho.adjoint()));
  const RealVector& lam = eig.eigenvalues();
  const Matrix& v = eig.eigenvectors();
  const Matrix a[3] = {v.adjoint() * ops.jx * v, v.adjoint() * ops.jy * v,
                       v.adjoint() * ops.jz * v};
  const Index d = rho.rows();
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (Index k = 0; k < d; ++k) {
    for (Index l = 0; l < d; ++l) {
      const double sum = lam[k] + lam[l];
      if (sum < 1e-12) continue;
      const double w = 2.0 * (lam[k] - lam[l]) * (lam[k] - lam[l]) / sum;
      if (w == 0.0) continue;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          m(p, q) += w * (a[p](k, l) * std::conj(a[q](k, l))).real();
    }
  }
  return finish_fisher(m, ops.n_spins);
}

}  // namespace dicke
