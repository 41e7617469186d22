#include "rwl/pressure.hpp"

#include <cmath>
#include <string>

#include "rwl/error.hpp"

namespace rwl {

PressureLaw::PressureLaw(double gamma) : gamma_(gamma) {
  require(std::isfinite(gamma) && gamma > 1.5, ErrorCode::InvalidArgument,
          "gamma must exceed 3/2, got " + std::to_string(gamma));
}

double PressureLaw::p(double rho) const { return std::pow(rho, gamma_) / gamma_; }

double PressureLaw::dp(double rho) const { return std::pow(rho, gamma_ - 1.0); }

double PressureLaw::H(double rho) const {
  return (std::pow(rho, gamma_) - rho) / (gamma_ * (gamma_ - 1.0));
}

double PressureLaw::dH(double rho) const {
  return (gamma_ * std::pow(rho, gamma_ - 1.0) - 1.0) / (gamma_ * (gamma_ - 1.0));
}

double PressureLaw::d2H(double rho) const { return std::pow(rho, gamma_ - 2.0); }

double PressureLaw::taylor_remainder(double y) const {
  require(y > -1.0, ErrorCode::Vacuum, "density must stay positive");
  if (std::abs(y) > 0.1) return std::expm1(gamma_ * std::log1p(y)) - gamma_ * y;
  // Binomial series from the quadratic term on; |y| <= 0.1 makes 40 terms
  // far more than enough.
  double coeff = gamma_ * (gamma_ - 1.0) / 2.0;
  double pw = y * y;
  double sum = 0.0;
  for (int k = 2; k < 42 && coeff != 0.0; ++k) {
    const double term = coeff * pw;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    coeff *= (gamma_ - k) / (k + 1.0);
    pw *= y;
  }
  return sum;
}

double PressureLaw::pressure_remainder(double sigma, double eps) const {
  return taylor_remainder(eps * sigma) / (gamma_ * eps * eps);
}

double PressureLaw::free_energy_distance(double rho, double r) const {
  require(rho > 0.0 && r > 0.0, ErrorCode::Vacuum, "free energy needs positive densities");
  // The linear part of H drops out of the Bregman distance.
  return std::pow(r, gamma_) * taylor_remainder(rho / r - 1.0) / (gamma_ * (gamma_ - 1.0));
}

}  // namespace rwl
