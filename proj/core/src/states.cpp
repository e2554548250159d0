#include "dickesim/states.hpp"

#include <bit>
#include <cmath>

namespace dicke {

namespace {

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

PureState polarized_state(int n_spins, bool up, StateBasis basis) {
  return excitation_state(n_spins, up ? n_spins : 0, basis);
}

PureState excitation_state(int n_spins, int n_up, StateBasis basis) {
  if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
  if (n_up < 0 || n_up > n_spins)
    throw std::invalid_argument("excitation count outside 0..n_spins");
  PureState s;
  s.n_spins = n_spins;
  s.basis = StateBasis::DickeLadder;
  s.amplitudes = Vector::Zero(n_spins + 1);
  s.amplitudes[n_up] = 1.0;
  if (basis == StateBasis::FullProduct) return ladder_to_full(s);
  return s;
}

PureState ladder_to_full(const PureState& state) {
  if (state.basis != StateBasis::DickeLadder)
    throw std::invalid_argument("state is not in the ladder basis");
  const int n = state.n_spins;
  if (n < 1 || state.amplitudes.size() != n + 1)
    throw std::invalid_argument("ladder amplitude count != n_spins + 1");
  if (n > 24) throw std::invalid_argument("full basis too large (n_spins > 24)");

  PureState out;
  out.n_spins = n;
  out.basis = StateBasis::FullProduct;
  out.amplitudes = Vector::Zero(Index(1) << n);
  // Each ladder amplitude spreads uniformly over the C(N, n_up) product
  // states with that many up spins; bit value 0 means up.
  std::vector<double> spread(n + 1);
  for (int k = 0; k <= n; ++k) spread[k] = std::exp(-0.5 * log_choose(n, k));
  for (std::uint32_t s = 0; s < (std::uint32_t(1) << n); ++s) {
    const int n_up = n - std::popcount(s);
    out.amplitudes[s] = state.amplitudes[n_up] * spread[n_up];
  }
  return out;
}

MixedState to_mixed(const PureState& state) {
  MixedState m;
  m.n_spins = state.n_spins;
  m.basis = state.basis;
  m.rho = state.amplitudes * state.amplitudes.adjoint();
  return m;
}

PureState parse_initial_state(const std::string& preset, int n_spins,
                              StateBasis basis) {
  if (preset == "up") return polarized_state(n_spins, true, basis);
  if (preset == "down") return polarized_state(n_spins, false, basis);
  if (preset.rfind("dicke:", 0) == 0) {
    std::size_t used = 0;
    int n_up = -1;
    try {
      n_up = std::stoi(preset.substr(6), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad excitation count in '" + preset + "'");
    }
    if (used != preset.size() - 6)
      throw std::invalid_argument("bad excitation count in '" + preset + "'");
    return excitation_state(n_spins, n_up, basis);
  }
  throw std::invalid_argument("unknown initial state '" + preset +
                              "' (want up, down, or dicke:<n_up>)");
}

}  // namespace dicke
