#include "dickesim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dicke {

double time_window_average(const RealVector& times, const RealVector& values,
                           double t_final, double window) {
  const Index n = times.size();
  if (n != values.size()) throw std::invalid_argument("series length mismatch");
  if (n < 2) throw std::invalid_argument("need at least two samples");
  if (!(window > 0.0) || window > t_final)
    throw std::invalid_argument("window must lie in (0, t_final]");
  const double t0 = t_final - window;
  const double slack = 1e-9 * std::max(1.0, std::abs(t_final));
  if (times[0] > t0 + slack || times[n - 1] < t_final - slack)
    throw std::invalid_argument("series does not cover the averaging window");

  // trapezoid over [t0, t_final] with linear interpolation at the edges
  double acc = 0.0;
  for (Index i = 0; i + 1 < n; ++i) {
    double a = times[i], b = times[i + 1];
    if (b <= t0 || a >= t_final) continue;
    double va = values[i], vb = values[i + 1];
    const double slope = (vb - va) / (b - a);
    if (a < t0) {
      va += slope * (t0 - a);
      a = t0;
    }
    if (b > t_final) {
      vb -= slope * (b - t_final);
      b = t_final;
    }
    acc += 0.5 * (va + vb) * (b - a);
  }
  return acc / window;
}

namespace {

void check_grid(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.sample_times.size() != b.sample_times.size() ||
      (a.sample_times - b.sample_times).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("records sampled on different time grids");
  if (a.config_fingerprint != b.config_fingerprint)
    throw std::invalid_argument("records from different configs");
}

SeriesStats reduce(const std::vector<TrajectoryRecord>& rec,
                   RealVector TrajectoryRecord::* series) {
  OnlineMoments acc;
  for (const auto& r : rec) {
    const RealVector& v = r.*series;
    if (v.size() == 0) {
      if (acc.count() > 0)
        throw std::invalid_argument("series recorded in some records only");
      continue;
    }
    acc.add(v);
  }
  SeriesStats out;
  if (acc.count() > 0) {
    out.mean = acc.mean();
    out.var = acc.variance();
  }
  return out;
}

}  // namespace

EnsembleStats ensemble_stats(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no records");
  for (const auto& r : records) check_grid(records.front(), r);
  EnsembleStats s;
  s.times = records.front().sample_times;
  s.n_trajectories = long(records.size());
  s.jx = reduce(records, &TrajectoryRecord::jx);
  s.jy = reduce(records, &TrajectoryRecord::jy);
  s.jz = reduce(records, &TrajectoryRecord::jz);
  s.entropy = reduce(records, &TrajectoryRecord::entropy_half);
  s.fisher = reduce(records, &TrajectoryRecord::fisher_density);
  return s;
}

void OnlineMoments::add(const RealVector& sample) {
  if (count_ == 0) {
    mean_ = sample;
    m2_ = RealVector::Zero(sample.size());
    count_ = 1;
    return;
  }
  if (sample.size() != mean_.size())
    throw std::invalid_argument("sample length changed mid-accumulation");
  ++count_;
  for (Index i = 0; i < sample.size(); ++i) {
    const double d = sample[i] - mean_[i];
    mean_[i] += d / count_;
    m2_[i] += d * (sample[i] - mean_[i]);
  }
}

void OnlineMoments::merge(const OnlineMoments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.mean_.size() != mean_.size())
    throw std::invalid_argument("merging accumulators of different widths");
  const long n = count_ + other.count_;
  for (Index i = 0; i < mean_.size(); ++i) {
    const double d = other.mean_[i] - mean_[i];
    m2_[i] += other.m2_[i] + d * d * double(count_) * double(other.count_) / n;
    mean_[i] += d * double(other.count_) / n;
  }
  count_ = n;
}

RealVector OnlineMoments::mean() const {
  if (count_ == 0) throw std::logic_error("empty accumulator");
  return mean_;
}

RealVector OnlineMoments::variance() const {
  if (count_ == 0) throw std::logic_error("empty accumulator");
  return m2_ / double(count_);
}

RealVector gaussian_filter(const RealVector& values, double sigma_samples) {
  if (sigma_samples <= 0.0) return values;
  const Index n = values.size();
  const Index half = Index(std::ceil(4.0 * sigma_samples));
  RealVector kernel(2 * half + 1);
  for (Index k = -half; k <= half; ++k)
    kernel[k + half] = std::exp(-0.5 * double(k * k) /
                                (sigma_samples * sigma_samples));
  RealVector out(n);
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0, wsum = 0.0;
    const Index lo = std::max(Index(0), i - half);
    const Index hi = std::min(n - 1, i + half);
    for (Index j = lo; j <= hi; ++j) {
      const double w = kernel[j - i + half];
      acc += w * values[j];
      wsum += w;
    }
    out[i] = acc / wsum;
  }
  return out;
}

LinearFit linear_fit(const RealVector& x, const RealVector& y) {
  const Index n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("need >= 2 points");
  const double xm = x.mean(), ym = y.mean();
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (Index i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  if (sxx == 0.0) throw std::invalid_argument("degenerate abscissa");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  const double sse = syy - f.slope * sxy;
  f.r2 = syy > 0.0 ? std::max(0.0, 1.0 - sse / syy) : 1.0;
  return f;
}

RealVector central_derivative(const RealVector& x, const RealVector& y) {
  const Index n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("need >= 2 points");
  RealVector d(n);
  d[0] = (y[1] - y[0]) / (x[1] - x[0]);
  d[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  for (Index i = 1; i + 1 < n; ++i) {
    const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
    // exact for quadratics on nonuniform grids
    d[i] = (hm * hm * y[i + 1] - hp * hp * y[i - 1] +
            (hp * hp - hm * hm) * y[i]) /
           (hm * hp * (hm + hp));
  }
  return d;
}

SaturationFit saturation_time_critical(const RealVector& times,
                                       const RealVector& values,
                                       double plateau, double smooth_sigma) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("need >= 2 samples");
  const RealVector v = gaussian_filter(values, smooth_sigma);
  SaturationFit fit;
  fit.method = "intersection";
  fit.fit_quality = 1.0;
  fit.plateau_value = plateau;

  // The first decay cascade can spike the entropy above its long-time
  // plateau before the slow growth even starts. A crossing counts only if
  // the series never falls back below half the plateau afterwards (the
  // crescent branch into the plateau, not the transient); if no crossing
  // sustains, fall back to the plain first crossing.
  const Index n = v.size();
  RealVector suffix_min(n);
  suffix_min[n - 1] = v[n - 1];
  for (Index i = n - 2; i >= 0; --i)
    suffix_min[i] = std::min(v[i], suffix_min[i + 1]);
  Index first = -1, sustained = -1;
  for (Index i = 0; i < n; ++i) {
    if (v[i] < plateau) continue;
    if (first < 0) first = i;
    if (suffix_min[i] >= 0.5 * plateau) {
      sustained = i;
      break;
    }
  }
  const Index j = sustained >= 0 ? sustained : first;
  if (j < 0) throw std::runtime_error("series never reaches the plateau value");
  if (j == 0) {
    fit.tau = times[0];
  } else {
    // v[j-1] < plateau here: an at-plateau predecessor with an acceptable
    // suffix would itself have been the sustained crossing
    const double f = (plateau - v[j - 1]) / (v[j] - v[j - 1]);
    fit.tau = times[j - 1] + f * (times[j] - times[j - 1]);
  }
  return fit;
}

namespace {

// Least-squares residual of a + b phi with (a, b) solved exactly.
double basis_fit_sse(const RealVector& phi, const RealVector& y,
                     double* a_out = nullptr, double* b_out = nullptr) {
  const Index n = phi.size();
  double se = 0.0, see = 0.0, sy = 0.0, sey = 0.0;
  for (Index i = 0; i < n; ++i) {
    se += phi[i];
    see += phi[i] * phi[i];
    sy += y[i];
    sey += phi[i] * y[i];
  }
  const double det = n * see - se * se;
  double a, b;
  if (std::abs(det) < 1e-30 * double(n) * double(n)) {
    a = sy / n;
    b = 0.0;
  } else {
    b = (n * sey - se * sy) / det;
    a = (sy - b * se) / n;
  }
  if (a_out) *a_out = a;
  if (b_out) *b_out = b;
  double sse = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double r = y[i] - a - b * phi[i];
    sse += r * r;
  }
  return sse;
}

}  // namespace

SaturationFit saturation_time_oscillatory(const RealVector& times,
                                          const RealVector& values,
                                          double filter_radius) {
  const Index n = times.size();
  if (n != values.size() || n < 4) throw std::invalid_argument("need >= 4 samples");
  if (!(filter_radius > 0.0))
    throw std::invalid_argument("filter radius must be > 0");
  const RealVector y = gaussian_filter(values, filter_radius);

  const double ym = y.mean();
  double syy = 0.0;
  for (Index i = 0; i < n; ++i) syy += (y[i] - ym) * (y[i] - ym);

  SaturationFit fit;
  fit.method = "filtered-exponential";
  fit.plateau_value = ym;
  if (syy < 1e-24 * std::max(1.0, ym * ym) * n) {
    // constant series: b is pinned to 0 and tau means nothing
    fit.tau = times[n - 1] - times[0];
    fit.fit_quality = 0.0;
    return fit;
  }

  // The exponential basis goes through the same filter as the data, so the
  // truncated-kernel distortion near the ends cancels instead of biasing tau.
  auto filtered_exp = [&](double tau) {
    RealVector e(n);
    for (Index i = 0; i < n; ++i) e[i] = std::exp(-times[i] / tau);
    return gaussian_filter(e, filter_radius);
  };
  auto sse_at = [&](double tau) { return basis_fit_sse(filtered_exp(tau), y); };

  const double span = times[n - 1] - times[0];
  const double lo = std::max(span * 1e-3, times[1] - times[0]);
  const double hi = 10.0 * span;
  double best_tau = lo, best_sse = std::numeric_limits<double>::infinity();
  const int grid = 160;
  for (int g = 0; g <= grid; ++g) {
    const double tau = lo * std::pow(hi / lo, double(g) / grid);
    const double sse = sse_at(tau);
    if (sse < best_sse) {
      best_sse = sse;
      best_tau = tau;
    }
  }
  // golden-section polish around the best grid point
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_tau * std::pow(hi / lo, -1.5 / grid);
  double b = best_tau * std::pow(hi / lo, 1.5 / grid);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = sse_at(x1), f2 = sse_at(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-10 * b; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = sse_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = sse_at(x2);
    }
  }
  double pa = 0.0, pb = 0.0;
  const double tau = 0.5 * (a + b);
  const double sse = basis_fit_sse(filtered_exp(tau), y, &pa, &pb);
  if (!std::isfinite(tau) || !std::isfinite(pa) || !std::isfinite(pb))
    throw std::runtime_error("exponential saturation fit diverged");
  fit.tau = tau;
  fit.plateau_value = pa;
  fit.fit_quality = std::max(0.0, 1.0 - sse / syy);
  return fit;
}

double analytic_tau(int n_spins, double kappa) {
  if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  // Rate out of ladder level M is (kappa/2J)(J+M)(J-M+1); summing the mean
  // waiting times from M = J down to M = -J+1 gives, with k = J - M + 1,
  // tau = (2J/kappa) sum_k 1 / (k (N - k + 1)).
  double sum = 0.0;
  for (int k = n_spins; k >= 1; --k)
    sum += 1.0 / (double(k) * double(n_spins - k + 1));
  return n_spins * sum / kappa;
}

double postselection_overhead(double tau, double bin_width) {
  if (!(tau > 0.0) || !(bin_width > 0.0))
    throw std::invalid_argument("tau and bin width must be > 0");
  return std::exp2(-tau / bin_width);
}

}  // namespace dicke
