#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dicke {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thrown when propagation produces non-finite numbers or an unphysical state;
// carries the simulation time at which the problem was detected.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double time)
      : std::runtime_error(what + " (at t = " + std::to_string(time) + ")"),
        time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace dicke
