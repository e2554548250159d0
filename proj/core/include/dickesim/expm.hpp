#pragma once

#include "dickesim/common.hpp"

namespace dicke {

// Dense matrix exponential by scaling-and-squaring with the order-13 diagonal
// Pade approximant; the scaling power is chosen from the 1-norm so that the
// scaled matrix satisfies ||A/2^s||_1 <= theta_13. Handles general (including
// non-normal) complex matrices. Throws std::invalid_argument for non-square
// or non-finite input.
Matrix expm(const Matrix& a);

}  // namespace dicke
