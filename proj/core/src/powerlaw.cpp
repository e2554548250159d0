#include "dickesim/powerlaw.hpp"

#include <bit>
#include <cmath>
#include <memory>
#include <numeric>

#include "dickesim/entanglement.hpp"
#include "dickesim/states.hpp"

namespace dicke {

void validate(const PowerlawSpec& spec) {
  if (spec.n_spins < 2 || spec.n_spins > 14)
    throw std::invalid_argument("powerlaw model supports 2..14 spins");
  if (!(spec.alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!(spec.kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  if (!std::isfinite(spec.omega0) || !std::isfinite(spec.omega_z))
    throw std::invalid_argument("non-finite Hamiltonian coefficient");
}

int ring_distance(int n_spins, int i, int j) {
  const int d = std::abs(i - j);
  return std::min(d, n_spins - d);
}

double kac_factor(int n_spins, double alpha) {
  if (n_spins < 2) throw std::invalid_argument("need n_spins >= 2");
  double z = 0.0;
  for (int i = 0; i < n_spins; ++i)
    for (int j = 0; j < n_spins; ++j)
      if (i != j) z += std::pow(double(ring_distance(n_spins, i, j)), -alpha);
  return z / n_spins;
}

namespace {

void check_full_cap(int n_spins) {
  if (n_spins < 1 || n_spins > 14)
    throw std::invalid_argument("full product space supports 1..14 spins");
}

}  // namespace

SparseCsr full_jminus_sparse(int n_spins) {
  check_full_cap(n_spins);
  const std::uint32_t dim = 1u << n_spins;
  std::vector<std::tuple<int, int, Complex>> t;
  t.reserve(std::size_t(dim) * n_spins / 2);
  // bit value 0 is spin-up; sigma_i^- flips up to down
  for (std::uint32_t s = 0; s < dim; ++s)
    for (int i = 0; i < n_spins; ++i)
      if (!(s >> i & 1u)) t.emplace_back(int(s | (1u << i)), int(s), 1.0);
  return SparseCsr::from_triplets(dim, dim, std::move(t));
}

SparseCsr full_jx_sparse(int n_spins) {
  check_full_cap(n_spins);
  const std::uint32_t dim = 1u << n_spins;
  std::vector<std::tuple<int, int, Complex>> t;
  for (std::uint32_t s = 0; s < dim; ++s)
    for (int i = 0; i < n_spins; ++i)
      t.emplace_back(int(s ^ (1u << i)), int(s), 0.5);
  return SparseCsr::from_triplets(dim, dim, std::move(t));
}

SparseCsr full_jy_sparse(int n_spins) {
  check_full_cap(n_spins);
  const std::uint32_t dim = 1u << n_spins;
  std::vector<std::tuple<int, int, Complex>> t;
  for (std::uint32_t s = 0; s < dim; ++s)
    for (int i = 0; i < n_spins; ++i) {
      if (s >> i & 1u)  // down: raising part, coefficient -i/2
        t.emplace_back(int(s & ~(1u << i)), int(s), Complex(0.0, -0.5));
      else  // up: lowering part, coefficient +i/2
        t.emplace_back(int(s | (1u << i)), int(s), Complex(0.0, 0.5));
    }
  return SparseCsr::from_triplets(dim, dim, std::move(t));
}

SparseCsr full_jz_sparse(int n_spins) {
  check_full_cap(n_spins);
  const std::uint32_t dim = 1u << n_spins;
  std::vector<std::tuple<int, int, Complex>> t;
  t.reserve(dim);
  for (std::uint32_t s = 0; s < dim; ++s)
    t.emplace_back(int(s), int(s), 0.5 * n_spins - double(std::popcount(s)));
  return SparseCsr::from_triplets(dim, dim, std::move(t));
}

SparseCsr powerlaw_h_sparse(const PowerlawSpec& spec) {
  validate(spec);
  const int n = spec.n_spins;
  const std::uint32_t dim = 1u << n;
  const double z = kac_factor(n, spec.alpha);

  std::vector<double> pair_w(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pair_w[std::size_t(i) * n + j] =
          spec.omega_z / z *
          std::pow(double(ring_distance(n, i, j)), -spec.alpha);

  std::vector<std::tuple<int, int, Complex>> t;
  for (std::uint32_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      const double zi = (s >> i & 1u) ? -1.0 : 1.0;
      for (int j = i + 1; j < n; ++j) {
        const double zj = (s >> j & 1u) ? -1.0 : 1.0;
        diag += pair_w[std::size_t(i) * n + j] * zi * zj;
      }
    }
    if (diag != 0.0) t.emplace_back(int(s), int(s), diag);
    if (spec.omega0 != 0.0)
      for (int i = 0; i < n; ++i)
        t.emplace_back(int(s ^ (1u << i)), int(s), 0.5 * spec.omega0);
  }
  return SparseCsr::from_triplets(dim, dim, std::move(t));
}

Matrix build_powerlaw_hamiltonian(const PowerlawSpec& spec) {
  return powerlaw_h_sparse(spec).to_dense();
}

Matrix build_collective_lowering_full(int n_spins) {
  return full_jminus_sparse(n_spins).to_dense();
}

SymmetricSector build_symmetric_sector(int n_spins) {
  check_full_cap(n_spins);
  const int n = n_spins;
  const std::uint32_t dim = 1u << n;
  const std::uint32_t mask = dim - 1;

  auto rotate = [&](std::uint32_t s) {
    return ((s << 1) | (s >> (n - 1))) & mask;
  };
  auto reflect = [&](std::uint32_t s) {
    std::uint32_t r = 0;
    for (int i = 0; i < n; ++i)
      if (s >> i & 1u) r |= 1u << (n - 1 - i);
    return r;
  };

  SymmetricSector sec;
  sec.n_spins = n;
  sec.orbit_of.assign(dim, -1);
  sec.weight.assign(dim, 0.0);

  std::vector<std::uint32_t> members;
  for (std::uint32_t s = 0; s < dim; ++s) {
    if (sec.orbit_of[s] >= 0) continue;
    members.clear();
    std::uint32_t x = s;
    for (int r = 0; r < n; ++r) {
      if (sec.orbit_of[x] < 0) {
        sec.orbit_of[x] = int(sec.representative.size());
        members.push_back(x);
      }
      const std::uint32_t y = reflect(x);
      if (sec.orbit_of[y] < 0) {
        sec.orbit_of[y] = int(sec.representative.size());
        members.push_back(y);
      }
      x = rotate(x);
    }
    const double w = 1.0 / std::sqrt(double(members.size()));
    for (std::uint32_t m : members) sec.weight[m] = w;
    sec.representative.push_back(s);
  }
  sec.dim = Index(sec.representative.size());
  return sec;
}

Vector SymmetricSector::to_full(const Vector& sector_amplitudes) const {
  if (sector_amplitudes.size() != dim)
    throw std::invalid_argument("sector amplitude count mismatch");
  Vector full(Index(1) << n_spins);
  for (Index f = 0; f < full.size(); ++f)
    full[f] = sector_amplitudes[orbit_of[f]] * weight[f];
  return full;
}

Matrix SymmetricSector::project(const SparseCsr& full_op) const {
  const Index full_dim = Index(1) << n_spins;
  if (full_op.rows != full_dim || full_op.cols != full_dim)
    throw std::invalid_argument("operator is not full-space sized");
  Matrix out = Matrix::Zero(dim, dim);
  Vector basis_vec = Vector::Zero(full_dim), image(full_dim);
  for (Index p = 0; p < dim; ++p) {
    for (Index f = 0; f < full_dim; ++f)
      basis_vec[f] = orbit_of[f] == p ? weight[f] : 0.0;
    full_op.apply(basis_vec, image);
    for (Index f = 0; f < full_dim; ++f)
      if (image[f] != Complex(0.0)) out(orbit_of[f], p) += image[f] * weight[f];
  }
  return out;
}

QjBackend make_powerlaw_qj_backend(const PowerlawSpec& spec,
                                   const QjConfig& config) {
  validate(spec);
  const int n = spec.n_spins;
  const double j = 0.5 * n;
  const double dt =
      config.dt > 0.0 ? config.dt : 0.002 / (n * spec.kappa);
  const int steps = std::max(1, int(std::lround(config.sample_every / dt)));

  auto sector =
      std::make_shared<const SymmetricSector>(build_symmetric_sector(n));
  const Matrix jm = sector->project(full_jminus_sparse(n));
  Matrix h_nj = sector->project(powerlaw_h_sparse(spec));
  h_nj += Complex(0.0, -0.5 * spec.kappa / j) * (jm.adjoint() * jm);

  QjBackend b;
  b.j = j;
  b.kappa = spec.kappa;
  b.prop = SteppedPropagator(h_nj, dt, steps);
  b.jminus = SparseCsr::from_dense(jm);
  b.obs_jx = SparseCsr::from_dense(sector->project(full_jx_sparse(n)));
  b.obs_jy = SparseCsr::from_dense(sector->project(full_jy_sparse(n)));
  b.obs_jz = SparseCsr::from_dense(sector->project(full_jz_sparse(n)));

  // Presets are permutation symmetric, so they live in the sector exactly;
  // gather the full-space amplitudes orbit by orbit.
  const PureState full =
      ladder_to_full(parse_initial_state(config.initial_state, n));
  Vector init = Vector::Zero(sector->dim);
  for (Index f = 0; f < full.amplitudes.size(); ++f)
    init[sector->orbit_of[f]] += full.amplitudes[f] * sector->weight[f];
  b.initial = init.normalized();

  if (config.record_entropy) {
    std::vector<int> block(n / 2);
    std::iota(block.begin(), block.end(), 0);
    b.entropy_fn = [sector, n, block](const Vector& psi) {
      return entropy(full_reduced_density(sector->to_full(psi), n, block));
    };
  }
  if (config.record_fisher) {
    auto jx = std::make_shared<const SparseCsr>(b.obs_jx);
    auto jy = std::make_shared<const SparseCsr>(b.obs_jy);
    auto jz = std::make_shared<const SparseCsr>(b.obs_jz);
    b.fisher_fn = [jx, jy, jz, n](const Vector& psi) {
      return qfi_pure_applied(psi, jx->apply(psi), jy->apply(psi),
                              jz->apply(psi), n)
          .density;
    };
  }
  return b;
}

}  // namespace dicke
