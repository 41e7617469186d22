#include "rwl/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rwl/error.hpp"

namespace rwl {

SlabGrid SlabGrid::make(double L, int nx, int ny, int nz) {
  require(std::isfinite(L) && L > 0.0, ErrorCode::InvalidArgument,
          "grid half-width L must be positive, got " + std::to_string(L));
  auto check = [](int n, const char* name) {
    require(n >= 4 && n % 2 == 0, ErrorCode::InvalidArgument,
            std::string("grid size ") + name + " must be even and >= 4, got " +
                std::to_string(n));
  };
  check(nx, "nx");
  check(ny, "ny");
  check(nz, "nz");
  return SlabGrid(L, nx, ny, nz);
}

double SlabGrid::dxi() const { return std::numbers::pi / L_; }

namespace {

std::vector<double> axis(int n, double quantum, bool zero_nyquist) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = (zero_nyquist && SlabGrid::is_nyquist(i, n))
                 ? 0.0
                 : quantum * SlabGrid::signed_mode(i, n);
  }
  return out;
}

}  // namespace

std::vector<double> SlabGrid::raw_xi1() const { return axis(nx_, dxi(), false); }
std::vector<double> SlabGrid::raw_xi2() const { return axis(ny_, dxi(), false); }
std::vector<double> SlabGrid::raw_kappa() const { return axis(nz_, std::numbers::pi, false); }
std::vector<double> SlabGrid::xi1() const { return axis(nx_, dxi(), true); }
std::vector<double> SlabGrid::xi2() const { return axis(ny_, dxi(), true); }
std::vector<double> SlabGrid::kappa() const { return axis(nz_, std::numbers::pi, true); }

}  // namespace rwl
