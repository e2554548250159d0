#pragma once

#include <string>
#include <vector>

#include "dickesim/common.hpp"
#include "dickesim/records.hpp"

namespace dicke {

// Trapezoid average of a sampled series over [t_final - window, t_final],
// divided by the window. Throws if the series does not cover the window.
double time_window_average(const RealVector& times, const RealVector& values,
                           double t_final, double window);

struct SeriesStats {
  RealVector mean;
  RealVector var;  // population variance (divides by the trajectory count)
};

struct EnsembleStats {
  RealVector times;
  SeriesStats jx, jy, jz, entropy, fisher;
  long n_trajectories = 0;
};

// Mean and population variance across trajectories, per sample time. All
// records must share the same time grid and config fingerprint; series
// left empty in every record come back empty. Variances are raw; divide
// by J^2 where a dimensionless curve is wanted.
EnsembleStats ensemble_stats(const std::vector<TrajectoryRecord>& records);

// Streaming per-slot moments (Welford). merge() lets partial accumulations
// combine, but floating-point addition makes the merged result depend on
// merge order at the ulp level; the trajectory farm avoids that by always
// reducing in trajectory-index order.
class OnlineMoments {
 public:
  void add(const RealVector& sample);
  void merge(const OnlineMoments& other);
  long count() const { return count_; }
  RealVector mean() const;
  RealVector variance() const;  // population variance

 private:
  long count_ = 0;
  RealVector mean_, m2_;
};

// Gaussian smoothing with sigma measured in samples; the kernel is
// truncated at 4 sigma and renormalized near the ends. sigma <= 0 returns
// the input unchanged.
RealVector gaussian_filter(const RealVector& values, double sigma_samples);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(const RealVector& x, const RealVector& y);

// Three-point central difference on a possibly nonuniform grid; endpoints
// are one-sided two-point differences.
RealVector central_derivative(const RealVector& x, const RealVector& y);

struct SaturationFit {
  double tau = 0.0;
  std::string method;        // "intersection" or "filtered-exponential"
  double fit_quality = 0.0;  // R^2 for the exponential fit, 1 for a crossing
  double plateau_value = 0.0;
};

// Saturation time near the transition: first time the (optionally
// smoothed, sigma in samples) rising series reaches the plateau level,
// linearly interpolated between samples. The plateau is the caller's
// long-time window average. Throws if the series never gets there.
SaturationFit saturation_time_critical(const RealVector& times,
                                       const RealVector& values,
                                       double plateau,
                                       double smooth_sigma = 0.0);

// Saturation time for oscillatory relaxation: Gaussian-filter the series
// (radius in samples), then least-squares fit a + b exp(-t/tau), scanning
// tau with a linear solve for (a, b) at each candidate and golden-section
// refinement. fit_quality is R^2; a constant series comes back with
// fit_quality 0 (tau meaningless in that branch).
SaturationFit saturation_time_oscillatory(const RealVector& times,
                                          const RealVector& values,
                                          double filter_radius = 20.0);

// Mean total decay time of the fully inverted undriven state:
// tau = (2J/kappa) sum_{k=1..N} 1 / (k (N - k + 1)), which grows like
// 2 ln(N) / kappa.
double analytic_tau(int n_spins, double kappa = 1.0);

// Fraction of trajectories a jump-record post-selection keeps when the
// record is binned at bin_width up to tau: 2^(-tau / bin_width).
double postselection_overhead(double tau, double bin_width = 1.0);

}  // namespace dicke
