#include "hypoflow/fit.hpp"

#include <cmath>
#include <vector>

#include "hypoflow/errors.hpp"

namespace hypoflow {

FitResult fit_line(std::span<const double> xs, std::span<const double> ys, double x_lo, double x_hi) {
  if (xs.size() != ys.size()) throw DomainError("fit_line: length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] >= x_lo && xs[i] <= x_hi) {
      x.push_back(xs[i]);
      y.push_back(ys[i]);
    }
  }
  if (x.size() < 3) throw DomainError("fit_line: fewer than 3 points in window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DomainError("fit_line: degenerate abscissae");
  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    ss += e * e;
  }
  r.rms_residual = std::sqrt(ss / n);
  r.x_lo = x_lo;
  r.x_hi = x_hi;
  r.points = x.size();
  return r;
}

namespace {

std::vector<double> safe_log(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw NumericError("decay fit: non-positive value in window");
    out[i] = std::log(v[i]);
  }
  return out;
}

}  // namespace

DecayFit fit_exponential(std::span<const double> ts, std::span<const double> values, double t0, double t1) {
  std::vector<double> tw, vw;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] >= t0 && ts[i] <= t1) {
      tw.push_back(ts[i]);
      vw.push_back(values[i]);
    }
  const auto ly = safe_log(vw);
  const FitResult f = fit_line(tw, ly, t0, t1);
  DecayFit d;
  d.kind = DecayKind::Exponential;
  d.rate = -f.slope;
  d.t0 = t0;
  d.t1 = t1;
  d.residual = f.rms_residual;
  return d;
}

DecayFit fit_algebraic(std::span<const double> ts, std::span<const double> values, double t0, double t1) {
  std::vector<double> lx, vw;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] >= t0 && ts[i] <= t1) {
      lx.push_back(std::log1p(ts[i]));
      vw.push_back(values[i]);
    }
  const auto ly = safe_log(vw);
  const FitResult f = fit_line(lx, ly, std::log1p(t0), std::log1p(t1));
  DecayFit d;
  d.kind = DecayKind::Algebraic;
  d.rate = f.slope;
  d.t0 = t0;
  d.t1 = t1;
  d.residual = f.rms_residual;
  return d;
}

}  // namespace hypoflow
