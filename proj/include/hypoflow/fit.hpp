#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace hypoflow {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares over the points with x in [x_lo, x_hi].
FitResult fit_line(std::span<const double> xs, std::span<const double> ys, double x_lo, double x_hi);

enum class DecayKind { Exponential, Algebraic };

struct DecayFit {
  DecayKind kind = DecayKind::Exponential;
  double rate = 0.0;  ///< exponential: λ in e^{−λt}; algebraic: slope of log-norm vs log(1+t)
  double t0 = 0.0;
  double t1 = 0.0;
  double residual = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

/// Exponential fit of log(values) against t on [t0, t1]; rate is the negated slope.
DecayFit fit_exponential(std::span<const double> ts, std::span<const double> values, double t0, double t1);

/// Algebraic fit of log(values) against log(1+t) on [t0, t1]; rate is the slope.
DecayFit fit_algebraic(std::span<const double> ts, std::span<const double> values, double t0, double t1);

}  // namespace hypoflow
