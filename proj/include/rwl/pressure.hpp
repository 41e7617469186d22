#pragma once

namespace rwl {

/// Barotropic law p(rho) = rho^gamma / gamma, normalized so that p'(1) = 1,
/// with the free-energy density H(rho) = rho * int_1^rho p(z)/z^2 dz.
class PressureLaw {
 public:
  /// Throws Error(InvalidArgument) unless gamma > 3/2.
  explicit PressureLaw(double gamma);

  double gamma() const { return gamma_; }

  double p(double rho) const;
  double dp(double rho) const;
  double H(double rho) const;
  double dH(double rho) const;
  double d2H(double rho) const;

  /// (1 + y)^gamma - 1 - gamma y without cancellation for small |y|.
  double taylor_remainder(double y) const;

  /// [p(1 + eps sigma) - p(1) - eps sigma] / eps^2.
  double pressure_remainder(double sigma, double eps) const;

  /// Bregman distance H(rho) - H'(r)(rho - r) - H(r) for rho, r > 0.
  double free_energy_distance(double rho, double r) const;

 private:
  double gamma_;
};

}  // namespace rwl
