#pragma once

namespace rwl {

/// C-infinity transition: 0 for t <= 0, 1 for t >= 1, glued from exp(-1/t).
double smooth_step(double t);

/// Frequency and spatial cut-offs driven by a single scale delta.
///
/// psi(r) = S(log(r/a)/log 2) * S(log(b/r)/log 2) is supported in (a, b) and
/// equals 1 on [2a, b/2] whenever 4a <= b. phi(rho) = S((R + w - rho)/w)
/// equals 1 for |x_h| <= R and vanishes beyond R + w. Vertical modes with
/// |n| > K are discarded.
struct CutoffSpec {
  double a = 0.1;
  double b = 10.0;
  double R = 10.0;
  double w = 5.0;
  int K = 10;

  /// a = delta, b = 1/delta, R = 1/delta, w = R/2, K = floor(1/delta).
  static CutoffSpec from_delta(double delta);
  /// Pure band-pass in |xi| with no spatial truncation.
  static CutoffSpec band(double a, double b, int K);

  double psi(double r) const;
  double phi(double rho) const;

  void validate() const;
};

}  // namespace rwl
