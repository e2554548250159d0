#pragma once

#include "dickesim/common.hpp"

namespace dicke {

// Basis a state vector lives in: the maximal-spin ladder (dimension N+1,
// index n = 0..N meaning magnetization M = n - N/2) or the full product
// space (dimension 2^N, site 0 = least-significant bit, bit value 0 = up).
enum class StateBasis { DickeLadder, FullProduct };

struct PureState {
  Vector amplitudes;
  StateBasis basis = StateBasis::DickeLadder;
  int n_spins = 0;
  // The no-jump evolution carries an intentionally decaying norm; states
  // handed across module boundaries are normalized unless this is set.
  bool decaying = false;
};

struct MixedState {
  Matrix rho;
  StateBasis basis = StateBasis::DickeLadder;
  int n_spins = 0;
};

// Fully polarized along +z (all spins up, M = +J) or -z (M = -J).
PureState polarized_state(int n_spins, bool up = true,
                          StateBasis basis = StateBasis::DickeLadder);

// Symmetric state with a definite number of up spins (ladder index n).
PureState excitation_state(int n_spins, int n_up,
                           StateBasis basis = StateBasis::DickeLadder);

// Expand a ladder-basis state into the full product space:
// amplitude c_n spreads uniformly over the C(N, n) states with n spins up.
PureState ladder_to_full(const PureState& state);

MixedState to_mixed(const PureState& state);

// Parse an initial-state preset: "up", "down", or "dicke:<n_up>".
PureState parse_initial_state(const std::string& preset, int n_spins,
                              StateBasis basis = StateBasis::DickeLadder);

}  // namespace dicke
