#include "rwl/ns.hpp"

#include <cmath>
#include <sstream>

#include "rwl/diagnostics.hpp"
#include "rwl/error.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"

namespace rwl {
namespace {

SpectralField d_axis(const SpectralField& f, int axis) {
  switch (axis) {
    case 0: return d_x1(f);
    case 1: return d_x2(f);
    default: return d_x3(f);
  }
}

WaveSpectrum to_hat(const FluidState& s) {
  require(s.m.dim() == 3, ErrorCode::InvalidArgument, "momentum must have three components");
  require(s.sigma.layout() == Layout::Volume, ErrorCode::InvalidArgument,
          "compressible state must be a volume field");
  return WaveSpectrum{{forward_transform(s.sigma), forward_transform(s.m[0]),
                       forward_transform(s.m[1]), forward_transform(s.m[2])}};
}

FluidState from_hat(const WaveSpectrum& w, double eps) {
  FluidState s{inverse_transform(w.c[0], Parity::Even), VectorField{}, eps};
  s.m.c.push_back(inverse_transform(w.c[1], Parity::Even));
  s.m.c.push_back(inverse_transform(w.c[2], Parity::Even));
  s.m.c.push_back(inverse_transform(w.c[3], Parity::Odd));
  return s;
}

WaveSpectrum zero_spectrum(const SlabGrid& g) {
  return WaveSpectrum{{SpectralField(g, Layout::Volume), SpectralField(g, Layout::Volume),
                       SpectralField(g, Layout::Volume), SpectralField(g, Layout::Volume)}};
}

// Coefficients of f(x_h, -x3) are those of f with n -> -n.
void enforce_parity(SpectralField& f, double sign) {
  const Shape& s = f.shape();
  const int nz = s.nz();
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      for (int l = 0; l <= nz / 2; ++l) {
        const int lr = (nz - l) % nz;
        const cplx a = f.at(i, j, l);
        const cplx b = f.at(i, j, lr);
        f.at(i, j, l) = 0.5 * (a + sign * b);
        f.at(i, j, lr) = 0.5 * (b + sign * a);
      }
}

ScalarField density_of(const ScalarField& sigma, double eps, double rho_min) {
  ScalarField rho(sigma.grid(), Layout::Volume, Parity::Even);
  double lo = 1e300;
  for (std::size_t n = 0; n < rho.size(); ++n) {
    rho[n] = 1.0 + eps * sigma[n];
    lo = std::min(lo, rho[n]);
  }
  if (!(lo > rho_min)) {
    std::ostringstream os;
    os << "vacuum: min density " << lo << " <= " << rho_min;
    fail(ErrorCode::Vacuum, os.str());
  }
  return rho;
}

VectorField velocity_of(const VectorField& m, const ScalarField& rho) {
  VectorField u = m;
  for (ScalarField& c : u.c)
    for (std::size_t n = 0; n < c.size(); ++n) c[n] /= rho[n];
  return u;
}

// Viscous rate integral of S(grad u) : grad u = (mu/2) |grad u + grad^t u - (2/3) div u I|^2.
double dissipation_from_hat(const std::vector<SpectralField>& uh, double mu) {
  if (mu == 0.0) return 0.0;
  const SlabGrid& g = uh[0].grid();
  ScalarField grads[3][3] = {{ScalarField(g, Layout::Volume), ScalarField(g, Layout::Volume),
                              ScalarField(g, Layout::Volume)},
                             {ScalarField(g, Layout::Volume), ScalarField(g, Layout::Volume),
                              ScalarField(g, Layout::Volume)},
                             {ScalarField(g, Layout::Volume), ScalarField(g, Layout::Volume),
                              ScalarField(g, Layout::Volume)}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) grads[i][j] = inverse_transform(d_axis(uh[i], j));
  const double cell = grads[0][0].shape().cell();
  double sum = 0.0;
  for (std::size_t n = 0; n < grads[0][0].size(); ++n) {
    const double div = grads[0][0][n] + grads[1][1][n] + grads[2][2][n];
    double e2 = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double e = grads[i][j][n] + grads[j][i][n];
        if (i == j) e -= 2.0 / 3.0 * div;
        e2 += e * e;
      }
    sum += e2;
  }
  return 0.5 * mu * sum * cell;
}

std::vector<SpectralField> hats(const VectorField& v) {
  std::vector<SpectralField> out;
  for (const ScalarField& c : v.c) out.push_back(forward_transform(c));
  return out;
}

VectorField grad3(const ScalarField& G) {
  const SpectralField Gh = forward_transform(G);
  VectorField out;
  for (int a = 0; a < 3; ++a) out.c.push_back(inverse_transform(d_axis(Gh, a)));
  return out;
}

ScalarField pointwise(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid(), a.layout());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = a[n] * b[n];
  return out;
}

bool finite(const WaveSpectrum& w) {
  for (const SpectralField& f : w.c)
    for (const cplx& z : f.values())
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace

FluidState FluidState::from_primitive(const ScalarField& rho1, const VectorField& u, double eps) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  require(u.dim() == 3, ErrorCode::InvalidArgument, "velocity must have three components");
  require_same_shape(rho1.shape(), u.shape());
  FluidState s{rho1, u, eps};
  s.sigma.set_parity(Parity::Even);
  for (int a = 0; a < 3; ++a)
    for (std::size_t n = 0; n < rho1.size(); ++n) s.m[a][n] = (1.0 + eps * rho1[n]) * u[a][n];
  return s;
}

ScalarField FluidState::density() const {
  ScalarField rho(sigma.grid(), sigma.layout(), Parity::Even);
  for (std::size_t n = 0; n < rho.size(); ++n) rho[n] = 1.0 + eps * sigma[n];
  return rho;
}

VectorField FluidState::velocity() const { return velocity_of(m, density()); }

Tendency ns_stiff_part(const FluidState& s) {
  require(s.m.dim() == 3, ErrorCode::InvalidArgument, "momentum must have three components");
  const double k = 1.0 / s.eps;
  const VectorField gs = grad3(s.sigma);
  Tendency t{div_h(s.m) + d_x3(s.m[2]), VectorField{}};
  t.s *= -k;
  t.V.c.push_back(k * (s.m[1] - gs[0]));
  t.V.c.push_back(-k * (s.m[0] + gs[1]));
  t.V.c.push_back(-k * gs[2]);
  return t;
}

Tendency ns_nonlinear_remainder(const FluidState& s, const PressureLaw& law, double mu,
                                const ScalarField* G, double rho_min) {
  const ScalarField rho = density_of(s.sigma, s.eps, rho_min);
  const VectorField u = velocity_of(s.m, rho);
  const SlabGrid& g = s.grid();
  std::vector<SpectralField> out(3, SpectralField(g, Layout::Volume));
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const SpectralField T = forward_transform(pointwise(s.m[i], u[j]));
      out[i] -= d_axis(T, j);
      if (i != j) out[j] -= d_axis(T, i);
    }
  ScalarField r(g, Layout::Volume);
  for (std::size_t n = 0; n < r.size(); ++n) r[n] = law.pressure_remainder(s.sigma[n], s.eps);
  const SpectralField rh = forward_transform(r);
  for (int i = 0; i < 3; ++i) out[i] -= d_axis(rh, i);
  if (mu != 0.0) {
    const std::vector<SpectralField> uh = hats(u);
    const SpectralField div = d_x1(uh[0]) + d_x2(uh[1]) + d_x3(uh[2]);
    for (int i = 0; i < 3; ++i)
      out[i] += cplx(mu) * (laplace(uh[i]) + cplx(1.0 / 3.0) * d_axis(div, i));
  }
  if (G) {
    const VectorField gG = grad3(*G);
    for (int i = 0; i < 3; ++i) out[i] += forward_transform(pointwise(rho, gG[i]));
  }
  Tendency t{ScalarField(g, Layout::Volume, Parity::Even), VectorField{}};
  for (int i = 0; i < 3; ++i) {
    dealias(out[i]);
    t.V.c.push_back(inverse_transform(out[i], i == 2 ? Parity::Odd : Parity::Even));
  }
  return t;
}

Tendency ns_full_rhs(const FluidState& s, const PressureLaw& law, double mu, const ScalarField* G) {
  const double eps = s.eps;
  const ScalarField rho = s.density();
  const VectorField u = s.velocity();
  const SlabGrid& g = s.grid();
  VectorField ru;
  for (int i = 0; i < 3; ++i) ru.c.push_back(pointwise(rho, u[i]));

  SpectralField rho_t(g, Layout::Volume);
  for (int j = 0; j < 3; ++j) rho_t -= d_axis(forward_transform(ru[j]), j);

  std::vector<SpectralField> mt(3, SpectralField(g, Layout::Volume));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) mt[i] -= d_axis(forward_transform(pointwise(ru[i], u[j])), j);
  // -rho omega x u / eps with omega x u = (-u2, u1, 0).
  mt[0] += forward_transform((1.0 / eps) * ru[1]);
  mt[1] -= forward_transform((1.0 / eps) * ru[0]);
  ScalarField p(g, Layout::Volume);
  for (std::size_t n = 0; n < p.size(); ++n) p[n] = law.p(rho[n]) / (eps * eps);
  const SpectralField ph = forward_transform(p);
  for (int i = 0; i < 3; ++i) mt[i] -= d_axis(ph, i);
  if (mu != 0.0) {
    const std::vector<SpectralField> uh = hats(u);
    const SpectralField div = d_x1(uh[0]) + d_x2(uh[1]) + d_x3(uh[2]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        SpectralField Sij = d_axis(uh[i], j) + d_axis(uh[j], i);
        if (i == j) Sij -= cplx(2.0 / 3.0) * div;
        mt[i] += cplx(mu) * d_axis(Sij, j);
      }
  }
  if (G) {
    const VectorField gG = grad3(*G);
    for (int i = 0; i < 3; ++i) mt[i] += forward_transform(pointwise(rho, gG[i]));
  }
  dealias(rho_t);
  Tendency t{inverse_transform(rho_t, Parity::Even), VectorField{}};
  t.s *= 1.0 / eps;
  for (int i = 0; i < 3; ++i) {
    dealias(mt[i]);
    t.V.c.push_back(inverse_transform(mt[i], i == 2 ? Parity::Odd : Parity::Even));
  }
  return t;
}

double ns_energy(const FluidState& s, const PressureLaw& law) {
  const double cell = s.sigma.shape().cell();
  const double e2 = s.eps * s.eps;
  double sum = 0.0;
  for (std::size_t n = 0; n < s.sigma.size(); ++n) {
    const double rho = 1.0 + s.eps * s.sigma[n];
    require(rho > 0.0, ErrorCode::Vacuum, "energy of a state with vacuum");
    const double m2 = s.m[0][n] * s.m[0][n] + s.m[1][n] * s.m[1][n] + s.m[2][n] * s.m[2][n];
    sum += 0.5 * m2 / rho + law.taylor_remainder(s.eps * s.sigma[n]) /
                                (law.gamma() * (law.gamma() - 1.0) * e2);
  }
  return sum * cell;
}

double ns_dissipation_rate(const FluidState& s, double mu) {
  return dissipation_from_hat(hats(s.velocity()), mu);
}

double ns_forcing_power(const FluidState& s, const ScalarField& G) {
  const VectorField gG = grad3(G);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += inner(s.m[i], gG[i]);
  return sum;
}

NSSolver::NSSolver(SlabGrid grid, NSParams params, PressureLaw law, std::optional<ScalarField> G)
    : NSSolver(grid, params, law, std::move(G),
               std::make_shared<const WavePropagator>(grid, params.threads)) {}

NSSolver::NSSolver(SlabGrid grid, NSParams params, PressureLaw law, std::optional<ScalarField> G,
                   std::shared_ptr<const WavePropagator> prop)
    : grid_(grid), params_(params), law_(law), G_(std::move(G)), prop_(std::move(prop)) {
  require(params_.eps > 0.0 && std::isfinite(params_.eps), ErrorCode::InvalidArgument,
          "eps must be positive");
  require(params_.mu >= 0.0, ErrorCode::InvalidArgument, "viscosity must be non-negative");
  require(params_.cfl > 0.0, ErrorCode::InvalidArgument, "CFL number must be positive");
  require(params_.symmetry_every >= 1, ErrorCode::InvalidArgument,
          "symmetry interval must be >= 1");
  require(prop_ && prop_->grid() == grid_, ErrorCode::GridMismatch,
          "propagator is on a different grid");
  if (G_) {
    require(G_->grid() == grid_ && G_->layout() == Layout::Volume, ErrorCode::GridMismatch,
            "forcing potential must be a volume field on the solver grid");
    gradG_ = grad3(*G_);
  }
}

const WavePropagator::Exponential& NSSolver::exponential(double dt) {
  if (dt != cached_dt_) {
    full_ = prop_->exponential(dt, params_.eps);
    half_ = prop_->exponential(0.5 * dt, params_.eps);
    cached_dt_ = dt;
  }
  return *full_;
}

WaveSpectrum NSSolver::remainder_hat(const WaveSpectrum& w, double* diss, double* force,
                                     double* vmax) const {
  WaveSpectrum out = zero_spectrum(grid_);
  if (params_.linear_only) {
    if (diss) *diss = 0.0;
    if (force) *force = 0.0;
    if (vmax) *vmax = 0.0;
    return out;
  }
  const FluidState s = from_hat(w, params_.eps);
  const ScalarField rho = density_of(s.sigma, params_.eps, params_.rho_min);
  const VectorField u = velocity_of(s.m, rho);
  if (vmax) {
    double v = 0.0;
    for (std::size_t n = 0; n < rho.size(); ++n)
      v = std::max(v, std::sqrt(u[0][n] * u[0][n] + u[1][n] * u[1][n] + u[2][n] * u[2][n]));
    *vmax = v;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const SpectralField T = forward_transform(pointwise(s.m[i], u[j]));
      out.c[1 + i] -= d_axis(T, j);
      if (i != j) out.c[1 + j] -= d_axis(T, i);
    }
  ScalarField r(grid_, Layout::Volume);
  for (std::size_t n = 0; n < r.size(); ++n)
    r[n] = law_.pressure_remainder(s.sigma[n], params_.eps);
  const SpectralField rh = forward_transform(r);
  for (int i = 0; i < 3; ++i) out.c[1 + i] -= d_axis(rh, i);

  const double mu = params_.mu;
  if (mu != 0.0 || diss) {
    const std::vector<SpectralField> uh = hats(u);
    if (mu != 0.0) {
      const SpectralField div = d_x1(uh[0]) + d_x2(uh[1]) + d_x3(uh[2]);
      for (int i = 0; i < 3; ++i)
        out.c[1 + i] += cplx(mu) * (laplace(uh[i]) + cplx(1.0 / 3.0) * d_axis(div, i));
    }
    if (diss) *diss = dissipation_from_hat(uh, mu);
  }
  double power = 0.0;
  if (G_) {
    for (int i = 0; i < 3; ++i) {
      out.c[1 + i] += forward_transform(pointwise(rho, gradG_[i]));
      power += inner(s.m[i], gradG_[i]);
    }
  }
  if (force) *force = power;
  for (int i = 1; i < 4; ++i) dealias(out.c[i]);
  return out;
}

void NSSolver::step_hat(WaveSpectrum& w, double dt, double* dissipation, double* forcing) {
  require(dt > 0.0 && std::isfinite(dt), ErrorCode::InvalidArgument, "dt must be positive");
  const WavePropagator::Exponential& E = exponential(dt);
  const WavePropagator::Exponential& A = *half_;
  const bool track = dissipation || forcing;
  double d[4] = {0, 0, 0, 0}, f[4] = {0, 0, 0, 0};
  double vmax = 0.0;

  auto N = [&](const WaveSpectrum& s, int stage) {
    WaveSpectrum k = remainder_hat(s, track ? &d[stage] : nullptr, track ? &f[stage] : nullptr,
                                   stage == 0 ? &vmax : nullptr);
    for (SpectralField& c : k.c) c *= cplx(dt);
    return k;
  };

  const WaveSpectrum k1 = N(w, 0);
  const double dxmin = std::min({grid_.dx(), grid_.dy(), grid_.dz()});
  if (vmax > 0.0 && dt > params_.cfl * dxmin / vmax) {
    std::ostringstream os;
    os << "NS step violates advective CFL: dt = " << dt << ", max|u| = " << vmax << ", limit "
       << params_.cfl * dxmin / vmax;
    fail(ErrorCode::CflViolation, os.str());
  }
  if (params_.mu > 0.0 && dt > params_.cfl * dxmin * dxmin / params_.mu) {
    std::ostringstream os;
    os << "NS step violates viscous limit: dt = " << dt << ", limit "
       << params_.cfl * dxmin * dxmin / params_.mu;
    fail(ErrorCode::CflViolation, os.str());
  }

  WaveSpectrum s2 = w;
  for (int c = 0; c < 4; ++c) s2.c[c] += cplx(0.5) * k1.c[c];
  A.apply(s2);
  const WaveSpectrum k2 = N(s2, 1);

  WaveSpectrum s3 = w;
  A.apply(s3);
  for (int c = 0; c < 4; ++c) s3.c[c] += cplx(0.5) * k2.c[c];
  const WaveSpectrum k3 = N(s3, 2);

  WaveSpectrum s4 = w;
  E.apply(s4);
  WaveSpectrum ak3 = k3;
  A.apply(ak3);
  for (int c = 0; c < 4; ++c) s4.c[c] += ak3.c[c];
  const WaveSpectrum k4 = N(s4, 3);

  for (int c = 0; c < 4; ++c) w.c[c] += cplx(1.0 / 6.0) * k1.c[c];
  E.apply(w);
  WaveSpectrum mid = k2;
  for (int c = 0; c < 4; ++c) {
    mid.c[c] += k3.c[c];
    mid.c[c] *= cplx(1.0 / 3.0);
  }
  A.apply(mid);
  for (int c = 0; c < 4; ++c) {
    w.c[c] += mid.c[c];
    w.c[c] += cplx(1.0 / 6.0) * k4.c[c];
  }

  if (++steps_ % params_.symmetry_every == 0) {
    enforce_parity(w.c[0], 1.0);
    enforce_parity(w.c[1], 1.0);
    enforce_parity(w.c[2], 1.0);
    enforce_parity(w.c[3], -1.0);
  }
  if (dissipation) *dissipation = dt / 6.0 * (d[0] + 2.0 * d[1] + 2.0 * d[2] + d[3]);
  if (forcing) *forcing = dt / 6.0 * (f[0] + 2.0 * f[1] + 2.0 * f[2] + f[3]);
}

FluidState NSSolver::step(const FluidState& s, double dt, double* dissipation, double* forcing) {
  require(s.grid() == grid_, ErrorCode::GridMismatch, "state is on a different grid");
  require(s.eps == params_.eps, ErrorCode::InvalidArgument, "state eps differs from solver eps");
  WaveSpectrum w = to_hat(s);
  for (SpectralField& c : w.c) dealias(c);
  step_hat(w, dt, dissipation, forcing);
  return from_hat(w, params_.eps);
}

double NSSolver::max_stable_dt(const FluidState& s) const {
  const VectorField u = velocity_of(s.m, density_of(s.sigma, s.eps, params_.rho_min));
  double vmax = 0.0;
  for (std::size_t n = 0; n < s.sigma.size(); ++n)
    vmax = std::max(vmax, std::sqrt(u[0][n] * u[0][n] + u[1][n] * u[1][n] + u[2][n] * u[2][n]));
  const double dxmin = std::min({grid_.dx(), grid_.dy(), grid_.dz()});
  double dt = vmax > 0.0 ? params_.cfl * dxmin / vmax : std::numeric_limits<double>::infinity();
  if (params_.mu > 0.0) dt = std::min(dt, params_.cfl * dxmin * dxmin / params_.mu);
  return dt;
}

double NSTrajectory::energy_residual_rate() const {
  if (energy.empty() || energy.front() <= 0.0) return 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < times.size(); ++n)
    worst = std::max(worst, energy_residual[n] / (energy.front() * times[n]));
  return times.size() > 1 ? worst : 0.0;
}

NSTrajectory run_ns(NSSolver& solver, const FluidState& s0, const NSRunOptions& opt) {
  require(opt.T >= 0.0 && opt.dt > 0.0 && opt.snapshot_stride >= 1, ErrorCode::InvalidArgument,
          "run_ns needs T >= 0, dt > 0 and stride >= 1");
  const NSParams& P = solver.params();
  require(s0.eps == P.eps, ErrorCode::InvalidArgument, "initial state eps differs from solver eps");
  const int steps = opt.T > 0.0 ? static_cast<int>(std::ceil(opt.T / opt.dt - 1e-9)) : 0;
  NSTrajectory tr;
  tr.eps = P.eps;
  tr.mu = P.mu;
  tr.dt = steps > 0 ? opt.T / steps : opt.dt;
  const EssResSpec ess{opt.ess_a};
  const double gamma = solver.law().gamma();

  WaveSpectrum w = to_hat(s0);
  for (SpectralField& c : w.c) dealias(c);
  double diss = 0.0, work = 0.0;
  double e0 = 0.0;

  auto record = [&](double t) {
    FluidState s = from_hat(w, P.eps);
    const ScalarField rho = s.density();
    const double e = ns_energy(s, solver.law());
    if (tr.times.empty()) e0 = e;
    tr.times.push_back(t);
    tr.energy.push_back(e);
    tr.dissipation.push_back(diss);
    tr.forcing_work.push_back(work);
    tr.energy_residual.push_back(e + diss - e0 - work);
    tr.mass.push_back(integral(s.sigma));
    double lo = 1e300, kin = 0.0, ess2 = 0.0, res = 0.0;
    for (std::size_t n = 0; n < rho.size(); ++n) {
      lo = std::min(lo, rho[n]);
      const double m2 = s.m[0][n] * s.m[0][n] + s.m[1][n] * s.m[1][n] + s.m[2][n] * s.m[2][n];
      kin += m2 / rho[n];
      const double chi = ess.chi(rho[n]);
      ess2 += chi * chi * s.sigma[n] * s.sigma[n];
      res += std::pow((1.0 - chi) * rho[n], gamma) + std::pow(1.0 - chi, gamma);
    }
    const double cell = rho.shape().cell();
    tr.min_density.push_back(lo);
    tr.kinetic_l2.push_back(std::sqrt(kin * cell));
    tr.sigma_ess_l2.push_back(std::sqrt(ess2 * cell));
    tr.residual_mass.push_back(res * cell);
    tr.viscous_bound.push_back(P.mu > 0.0 ? 2.0 * diss : 0.0);
    tr.symmetry_defect = std::max({tr.symmetry_defect, sup_norm(odd_part(s.sigma)),
                                   sup_norm(even_part(s.m[2]))});
    return s;
  };

  tr.snapshot_times.push_back(0.0);
  tr.snapshots.push_back(record(0.0));
  for (int n = 1; n <= steps; ++n) {
    double d = 0.0, f = 0.0;
    try {
      solver.step_hat(w, tr.dt, &d, &f);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidArgument) throw;
      tr.aborted = true;
      tr.message = std::string(e.what()) + " (step " + std::to_string(n) + ")";
      break;
    }
    if (!finite(w)) {
      tr.aborted = true;
      tr.message = "non-finite state at step " + std::to_string(n);
      break;
    }
    diss += d;
    work += f;
    FluidState s = record(n * tr.dt);
    if (n % opt.snapshot_stride == 0 || n == steps) {
      tr.snapshot_times.push_back(n * tr.dt);
      tr.snapshots.push_back(std::move(s));
    }
  }
  return tr;
}

}  // namespace rwl
