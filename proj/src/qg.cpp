#include "rwl/qg.hpp"

#include <cmath>
#include <sstream>

#include "rwl/error.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"

namespace rwl {
namespace {

void require_planar(const ScalarField& f) {
  require(f.layout() == Layout::Planar, ErrorCode::InvalidArgument,
          "QG fields live on the horizontal grid");
}

SpectralField pv_hat(const SpectralField& qh) { return laplace_h(qh) - qh; }

// dP/dt in spectral space from dealiased P_hat.
SpectralField rhs_hat(const SpectralField& Ph) {
  const SpectralField qh = invert_helmholtz(Ph);
  const std::vector<SpectralField> vh = perp_grad_h(qh);
  const ScalarField v1 = inverse_transform(vh[0]);
  const ScalarField v2 = inverse_transform(vh[1]);
  const ScalarField p1 = inverse_transform(d_x1(Ph));
  const ScalarField p2 = inverse_transform(d_x2(Ph));
  ScalarField adv(v1.grid(), Layout::Planar);
  for (std::size_t n = 0; n < adv.size(); ++n) adv[n] = -(v1[n] * p1[n] + v2[n] * p2[n]);
  SpectralField out = forward_transform(adv);
  dealias(out);
  return out;
}

double max_speed_hat(const SpectralField& qh) {
  const std::vector<SpectralField> vh = perp_grad_h(qh);
  const ScalarField v1 = inverse_transform(vh[0]);
  const ScalarField v2 = inverse_transform(vh[1]);
  double m = 0.0;
  for (std::size_t n = 0; n < v1.size(); ++n) m = std::max(m, std::hypot(v1[n], v2[n]));
  return m;
}

void check_cfl(const SpectralField& Ph, double dt, double cfl) {
  const SlabGrid& g = Ph.grid();
  const double vmax = max_speed_hat(invert_helmholtz(Ph));
  const double dx = std::min(g.dx(), g.dy());
  if (vmax > 0.0 && dt > cfl * dx / vmax) {
    std::ostringstream os;
    os << "QG step violates CFL: dt = " << dt << ", max|v| = " << vmax << ", limit "
       << cfl * dx / vmax;
    fail(ErrorCode::CflViolation, os.str());
  }
}

void filter(SpectralField& Ph) {
  const Shape& s = Ph.shape();
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j) {
      const double a = std::abs(SlabGrid::signed_mode(i, s.nx())) / (s.nx() / 3.0);
      const double b = std::abs(SlabGrid::signed_mode(j, s.ny())) / (s.ny() / 3.0);
      Ph.at(i, j) *= std::exp(-36.0 * std::pow(std::max(a, b), 36));
    }
}

SpectralField rk4(const SpectralField& P, double dt) {
  const SpectralField k1 = rhs_hat(P);
  const SpectralField k2 = rhs_hat(P + cplx(0.5 * dt) * k1);
  const SpectralField k3 = rhs_hat(P + cplx(0.5 * dt) * k2);
  const SpectralField k4 = rhs_hat(P + cplx(dt) * k3);
  SpectralField out = P;
  const double w = dt / 6.0;
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] += w * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
  return out;
}

double energy_hat(const SpectralField& qh) {
  const Shape& s = qh.shape();
  const auto xi1 = s.grid.xi1();
  const auto xi2 = s.grid.xi2();
  double e = 0.0;
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      e += (1.0 + xi1[i] * xi1[i] + xi2[j] * xi2[j]) * std::norm(qh.at(i, j));
  return e;
}

bool finite(const SpectralField& f) {
  for (const cplx& z : f.values())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace

ScalarField potential_vorticity(const ScalarField& q) {
  require_planar(q);
  return inverse_transform(pv_hat(forward_transform(q)), q.parity());
}

SpectralField invert_helmholtz(const SpectralField& P) {
  const Shape& s = P.shape();
  const auto xi1 = s.grid.xi1();
  const auto xi2 = s.grid.xi2();
  SpectralField q(s.grid, s.layout);
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      for (int l = 0; l < s.nz(); ++l)
        q.at(i, j, l) = -P.at(i, j, l) / (1.0 + xi1[i] * xi1[i] + xi2[j] * xi2[j]);
  return q;
}

ScalarField invert_helmholtz(const ScalarField& P) {
  return inverse_transform(invert_helmholtz(forward_transform(P)), P.parity());
}

ScalarField qg_rhs(const ScalarField& q) {
  require_planar(q);
  SpectralField Ph = pv_hat(forward_transform(q));
  dealias(Ph);
  return inverse_transform(rhs_hat(Ph));
}

ScalarField qg_rhs_laplacian_form(const ScalarField& q) {
  require_planar(q);
  SpectralField qh = forward_transform(q);
  dealias(qh);
  const std::vector<SpectralField> vh = perp_grad_h(qh);
  const SpectralField lap = laplace_h(qh);
  const ScalarField v1 = inverse_transform(vh[0]);
  const ScalarField v2 = inverse_transform(vh[1]);
  const ScalarField l1 = inverse_transform(d_x1(lap));
  const ScalarField l2 = inverse_transform(d_x2(lap));
  ScalarField adv(q.grid(), Layout::Planar);
  for (std::size_t n = 0; n < adv.size(); ++n) adv[n] = -(v1[n] * l1[n] + v2[n] * l2[n]);
  SpectralField out = forward_transform(adv);
  dealias(out);
  return inverse_transform(out);
}

double qg_energy(const ScalarField& q) {
  require_planar(q);
  return energy_hat(forward_transform(q));
}

double qg_max_speed(const ScalarField& q) {
  require_planar(q);
  return max_speed_hat(forward_transform(q));
}

double qg_tail_fraction(const ScalarField& q) {
  require_planar(q);
  const SpectralField qh = forward_transform(q);
  const Shape& s = qh.shape();
  const auto xi1 = s.grid.xi1();
  const auto xi2 = s.grid.xi2();
  double tail = 0.0, total = 0.0;
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j) {
      const double e = (1.0 + xi1[i] * xi1[i] + xi2[j] * xi2[j]) * std::norm(qh.at(i, j));
      total += e;
      const double a = std::abs(SlabGrid::signed_mode(i, s.nx())) / (s.nx() / 3.0);
      const double b = std::abs(SlabGrid::signed_mode(j, s.ny())) / (s.ny() / 3.0);
      const double m = std::max(a, b);
      if (m > 5.0 / 6.0 && m <= 1.0) tail += e;
    }
  return total > 0.0 ? tail / total : 0.0;
}

ScalarField qg_step(const ScalarField& q, double dt, const QGOptions& opt) {
  require_planar(q);
  require(dt > 0.0, ErrorCode::InvalidArgument, "QG step needs dt > 0");
  SpectralField Ph = pv_hat(forward_transform(q));
  dealias(Ph);
  check_cfl(Ph, dt, opt.cfl);
  SpectralField next = rk4(Ph, dt);
  if (opt.filter) filter(next);
  return inverse_transform(invert_helmholtz(next), Parity::Even);
}

double QGTrajectory::energy_drift() const {
  double m = 0.0;
  for (double e : energy) m = std::max(m, std::abs(e - energy.front()) / energy.front());
  return m;
}

double QGTrajectory::pv_l2_drift() const {
  double m = 0.0;
  for (double e : pv_l2) m = std::max(m, std::abs(e - pv_l2.front()) / pv_l2.front());
  return m;
}

QGTrajectory run_qg(const ScalarField& q0, double T, double dt, int stride,
                    const QGOptions& opt) {
  require_planar(q0);
  require(T >= 0.0 && dt > 0.0 && stride >= 1, ErrorCode::InvalidArgument,
          "run_qg needs T >= 0, dt > 0 and stride >= 1");
  const int steps = T > 0.0 ? static_cast<int>(std::ceil(T / dt - 1e-9)) : 0;
  QGTrajectory tr;
  tr.dt = steps > 0 ? T / steps : dt;

  SpectralField Ph = pv_hat(forward_transform(q0));
  dealias(Ph);
  auto record = [&](double t) {
    const SpectralField qh = invert_helmholtz(Ph);
    const ScalarField P = inverse_transform(Ph);
    tr.times.push_back(t);
    tr.energy.push_back(energy_hat(qh));
    tr.pv_l2.push_back(l2_norm(P));
    tr.pv_l4.push_back(lp_norm(P, 4.0));
    tr.pv_mean.push_back(mean(P));
    const ScalarField q = inverse_transform(qh, Parity::Even);
    const double tail = qg_tail_fraction(q);
    tr.tail_fraction.push_back(tail);
    if (tail > 1e-6) tr.under_resolved = true;
    return q;
  };
  auto snapshot = [&](double t, ScalarField q) {
    tr.snapshot_times.push_back(t);
    tr.snapshots.push_back(std::move(q));
  };

  snapshot(0.0, record(0.0));
  for (int n = 1; n <= steps; ++n) {
    check_cfl(Ph, tr.dt, opt.cfl);
    SpectralField next = Ph;
    bool ok = true;
    try {
      next = rk4(Ph, tr.dt);
      if (opt.filter) filter(next);
      ok = finite(next);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFinite) throw;
      ok = false;
    }
    if (!ok) {
      tr.aborted = true;
      tr.message = "non-finite potential vorticity at step " + std::to_string(n);
      break;
    }
    Ph = std::move(next);
    const double t = n * tr.dt;
    ScalarField q = record(t);
    if (n % stride == 0 || n == steps) snapshot(t, std::move(q));
  }
  return tr;
}

}  // namespace rwl
