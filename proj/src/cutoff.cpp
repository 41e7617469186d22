#include "rwl/cutoff.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rwl/error.hpp"

namespace rwl {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double f0 = std::exp(-1.0 / t);
  const double f1 = std::exp(-1.0 / (1.0 - t));
  return f0 / (f0 + f1);
}

CutoffSpec CutoffSpec::from_delta(double delta) {
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::InvalidArgument,
          "cutoff scale delta must be positive, got " + std::to_string(delta));
  CutoffSpec c;
  c.a = delta;
  c.b = 1.0 / delta;
  c.R = 1.0 / delta;
  c.w = 0.5 * c.R;
  c.K = static_cast<int>(std::floor(1.0 / delta));
  return c;
}

CutoffSpec CutoffSpec::band(double a, double b, int K) {
  CutoffSpec c;
  c.a = a;
  c.b = b;
  c.R = std::numeric_limits<double>::infinity();
  c.w = 1.0;
  c.K = K;
  c.validate();
  return c;
}

double CutoffSpec::psi(double r) const {
  if (r <= a || r >= b) return 0.0;
  const double ln2 = std::log(2.0);
  return smooth_step(std::log(r / a) / ln2) * smooth_step(std::log(b / r) / ln2);
}

double CutoffSpec::phi(double rho) const {
  if (std::isinf(R)) return 1.0;
  return smooth_step((R + w - rho) / w);
}

void CutoffSpec::validate() const {
  require(a > 0.0 && b > 0.0, ErrorCode::InvalidArgument, "cutoff radii must be positive");
  require(R > 0.0 && w > 0.0, ErrorCode::InvalidArgument,
          "spatial plateau and taper must be positive");
  require(K >= 0, ErrorCode::InvalidArgument, "vertical mode bound must be >= 0");
}

}  // namespace rwl
