#include "rwl/wave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwl/error.hpp"
#include "rwl/parallel.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"

namespace rwl {
namespace {

const cplx I(0.0, 1.0);

using Vec4 = Eigen::Matrix<cplx, 4, 1>;

Vec4 gather(const WaveSpectrum& w, std::size_t n) {
  return Vec4(w.c[0][n], w.c[1][n], w.c[2][n], w.c[3][n]);
}

void scatter(WaveSpectrum& w, std::size_t n, const Vec4& v) {
  for (int c = 0; c < 4; ++c) w.c[c][n] = v(c);
}

bool is_zero(const Vec4& v) {
  return v(0) == cplx(0.0) && v(1) == cplx(0.0) && v(2) == cplx(0.0) && v(3) == cplx(0.0);
}

WaveSpectrum zeros_like(const WaveSpectrum& w) {
  const Shape& s = w.shape();
  return WaveSpectrum{{SpectralField(s.grid, s.layout), SpectralField(s.grid, s.layout),
                       SpectralField(s.grid, s.layout), SpectralField(s.grid, s.layout)}};
}

}  // namespace

ModeSymbol assemble_symbol(double xi1, double xi2, double k) {
  ModeSymbol m;
  m.xi1 = xi1;
  m.xi2 = xi2;
  m.k = k;
  m.A.setZero();
  m.A(0, 1) = xi1;
  m.A(1, 0) = xi1;
  m.A(0, 2) = xi2;
  m.A(2, 0) = xi2;
  m.A(0, 3) = k;
  m.A(3, 0) = k;
  m.A(1, 2) = I;
  m.A(2, 1) = -I;
  return m;
}

std::array<double, 4> eigenvalues_closed_form(double xi1, double xi2, double k) {
  const double r2 = xi1 * xi1 + xi2 * xi2;
  const double k2 = k * k;
  const double sum = 1.0 + r2 + k2;
  // (1 + r2 + k2)^2 - 4 k2 rewritten as a sum of squares.
  const double radicand = (1.0 + r2 - k2) * (1.0 + r2 - k2) + 4.0 * r2 * k2;
  require(radicand >= 0.0, ErrorCode::Internal, "negative eigenvalue radicand");
  const double l1 = std::sqrt(0.5 * (sum + std::sqrt(radicand)));
  // l1^2 l3^2 = k^2 avoids the cancellation in (sum - sqrt(radicand)) / 2.
  const double l3 = std::abs(k) / l1;
  return {l1, -l1, l3, -l3};
}

EigenSystem eigensystem(double xi1, double xi2, double k) {
  const ModeSymbol sym = assemble_symbol(xi1, xi2, k);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(sym.A);
  require(es.info() == Eigen::Success, ErrorCode::Internal, "eigendecomposition failed");
  // Ascending order is (-l1, -l3, l3, l1); map to (l1, -l1, l3, -l3).
  static constexpr std::array<int, 4> order{3, 0, 2, 1};
  EigenSystem sys;
  for (int r = 0; r < 4; ++r) {
    const int c = order[r];
    Vec4 v = es.eigenvectors().col(c);
    for (int p = 0; p < 4; ++p) {
      if (std::abs(v(p)) > 1e-8) {
        v *= std::conj(v(p)) / std::abs(v(p));
        break;
      }
    }
    sys.lambda[r] = es.eigenvalues()(c);
    sys.Q.row(r) = v.adjoint();
  }
  return sys;
}

double group_speed_fast(double r, double k) {
  const double h = 1e-6;
  const double lo = std::max(0.0, r - h);
  const double hi = r + h;
  return (eigenvalues_closed_form(hi, 0.0, k)[0] - eigenvalues_closed_form(lo, 0.0, k)[0]) /
         (hi - lo);
}

double WaveState::l2_norm() const {
  double e = inner(s, s);
  for (const ScalarField& c : V.c) e += inner(c, c);
  return std::sqrt(e);
}

double WaveSpectrum::energy() const {
  double e = 0.0;
  for (const SpectralField& f : c) e += spectral_energy(f);
  return e;
}

double WaveSpectrum::sobolev_energy(int m) const {
  const Shape& s = shape();
  const auto xi1 = s.grid.xi1();
  const auto xi2 = s.grid.xi2();
  const auto kap = s.grid.kappa();
  double e = 0.0;
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      for (int l = 0; l < s.nz(); ++l) {
        const double kz = s.layout == Layout::Volume ? kap[l] : 0.0;
        const double w = std::pow(1.0 + xi1[i] * xi1[i] + xi2[j] * xi2[j] + kz * kz, m);
        const std::size_t n = s.index(i, j, l);
        for (const SpectralField& f : c) e += w * std::norm(f[n]);
      }
  return e;
}

WaveSpectrum to_spectrum(const WaveState& w) {
  require(w.V.dim() == 3, ErrorCode::InvalidArgument, "wave state needs a 3-vector V");
  return WaveSpectrum{{forward_transform(w.s), forward_transform(w.V[0]),
                       forward_transform(w.V[1]), forward_transform(w.V[2])}};
}

WaveState to_state(const WaveSpectrum& w) {
  WaveState out{inverse_transform(w.c[0], Parity::Even), VectorField{}};
  out.V.c.push_back(inverse_transform(w.c[1], Parity::Even));
  out.V.c.push_back(inverse_transform(w.c[2], Parity::Even));
  out.V.c.push_back(inverse_transform(w.c[3], Parity::Odd));
  return out;
}

WavePropagator::WavePropagator(SlabGrid grid, int threads)
    : grid_(grid), threads_(threads) {
  build(nullptr);
}

WavePropagator::WavePropagator(SlabGrid grid, const WaveSpectrum& support, int threads)
    : grid_(grid), threads_(threads) {
  require(support.shape().grid == grid && support.shape().layout == Layout::Volume,
          ErrorCode::GridMismatch, "support spectrum is on a different grid");
  build(&support);
}

void WavePropagator::mode_wavenumbers(std::size_t mode, double& xi1, double& xi2,
                                      double& k) const {
  const std::size_t nz = grid_.nz();
  const std::size_t ny = grid_.ny();
  const std::size_t l = mode % nz;
  const std::size_t j = (mode / nz) % ny;
  const std::size_t i = mode / (nz * ny);
  xi1 = xi1_[i];
  xi2 = xi2_[j];
  k = kappa_[l];
}

void WavePropagator::build(const WaveSpectrum* support) {
  xi1_ = grid_.xi1();
  xi2_ = grid_.xi2();
  kappa_ = grid_.kappa();
  const std::size_t n = grid_.volume_size();
  slot_.assign(n, -1);
  std::size_t count = 0;
  for (std::size_t m = 0; m < n; ++m) {
    if (support && is_zero(gather(*support, m))) continue;
    slot_[m] = static_cast<std::int32_t>(count++);
  }
  systems_.resize(count);
  parallel_for(n, threads_, [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      if (slot_[m] < 0) continue;
      double a, c, k;
      mode_wavenumbers(m, a, c, k);
      systems_[slot_[m]] = eigensystem(a, c, k);
    }
  });
}

EigenSystem WavePropagator::system_at(std::size_t mode) const {
  if (slot_[mode] >= 0) return systems_[slot_[mode]];
  double a, c, k;
  mode_wavenumbers(mode, a, c, k);
  return eigensystem(a, c, k);
}

WaveSpectrum WavePropagator::propagate(const WaveSpectrum& w0, double t, double eps) const {
  require(eps > 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument,
          "propagate: eps must be positive");
  require(w0.shape().grid == grid_ && w0.shape().layout == Layout::Volume,
          ErrorCode::GridMismatch, "propagate: state is on a different grid");
  const double tau = t / eps;
  WaveSpectrum out = zeros_like(w0);
  parallel_for(grid_.volume_size(), threads_, [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      const Vec4 v = gather(w0, m);
      if (is_zero(v)) continue;
      const EigenSystem sys = system_at(m);
      Vec4 y = sys.Q * v;
      for (int r = 0; r < 4; ++r) y(r) *= std::exp(-I * (tau * sys.lambda[r]));
      scatter(out, m, sys.Q.adjoint() * y);
    }
  });
  return out;
}

WaveState WavePropagator::propagate(const WaveState& w0, double t, double eps) const {
  return to_state(propagate(to_spectrum(w0), t, eps));
}

WaveSpectrum WavePropagator::apply_generator(const WaveSpectrum& w) const {
  require(w.shape().grid == grid_, ErrorCode::GridMismatch, "apply_generator: grid mismatch");
  WaveSpectrum out = zeros_like(w);
  for (std::size_t m = 0; m < grid_.volume_size(); ++m) {
    double a, c, k;
    mode_wavenumbers(m, a, c, k);
    const Vec4 v = gather(w, m);
    scatter(out, m, I * (assemble_symbol(a, c, k).A * v));
  }
  return out;
}

WaveSpectrum WavePropagator::polarize(const WaveSpectrum& w, Branch b) const {
  require(w.shape().grid == grid_, ErrorCode::GridMismatch, "polarize: grid mismatch");
  if (b == Branch::All) return w;
  WaveSpectrum out = zeros_like(w);
  for (std::size_t m = 0; m < grid_.volume_size(); ++m) {
    const Vec4 v = gather(w, m);
    if (is_zero(v)) continue;
    const EigenSystem sys = system_at(m);
    Vec4 y = sys.Q * v;
    const int drop0 = b == Branch::Fast ? 2 : 0;
    y(drop0) = 0.0;
    y(drop0 + 1) = 0.0;
    scatter(out, m, sys.Q.adjoint() * y);
  }
  return out;
}

WavePropagator::Exponential WavePropagator::exponential(double tau, double eps) const {
  require(eps > 0.0, ErrorCode::InvalidArgument, "exponential: eps must be positive");
  Exponential ex;
  ex.threads_ = threads_;
  const std::size_t n = grid_.volume_size();
  ex.m_.resize(n);
  const double s = tau / eps;
  parallel_for(n, threads_, [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      const EigenSystem sys = system_at(m);
      Eigen::Matrix4cd d = Eigen::Matrix4cd::Zero();
      for (int r = 0; r < 4; ++r) d(r, r) = std::exp(-I * (s * sys.lambda[r]));
      ex.m_[m] = sys.Q.adjoint() * d * sys.Q;
    }
  });
  return ex;
}

void WavePropagator::Exponential::apply(std::array<cplx*, 4> comps, std::size_t n) const {
  require(n == m_.size(), ErrorCode::GridMismatch, "exponential: size mismatch");
  parallel_for(n, threads_, [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      const Vec4 v(comps[0][m], comps[1][m], comps[2][m], comps[3][m]);
      const Vec4 y = m_[m] * v;
      for (int c = 0; c < 4; ++c) comps[c][m] = y(c);
    }
  });
}

void WavePropagator::Exponential::apply(WaveSpectrum& w) const {
  apply({w.c[0].values().data(), w.c[1].values().data(), w.c[2].values().data(),
         w.c[3].values().data()},
        w.c[0].size());
}

DecayReport measure_decay(const WavePropagator& prop, const WaveState& w0,
                          const std::vector<double>& times, const DecayOptions& opt) {
  require(!times.empty(), ErrorCode::InvalidArgument, "measure_decay: no sample times");
  require(opt.window_lo > 0.0 && opt.window_hi > opt.window_lo, ErrorCode::InvalidArgument,
          "measure_decay: invalid fit window");
  const WaveSpectrum s0 = to_spectrum(w0);
  const SlabGrid& g = prop.grid();

  DecayReport rep;
  {
    double vmax = 0.0;
    const Shape& s = s0.shape();
    const auto kap = g.kappa();
    for (int i = 0; i < s.nx(); ++i)
      for (int j = 0; j < s.ny(); ++j)
        for (int l = 0; l < s.nz(); ++l) {
          const std::size_t n = s.index(i, j, l);
          bool active = false;
          for (const SpectralField& c : s0.c) active = active || c[n] != cplx(0.0);
          if (active)
            vmax = std::max(vmax, std::abs(group_speed_fast(horizontal_wavenumber(g, i, j), kap[l])));
        }
    rep.max_group_speed = vmax;
    rep.recurrence_time =
        vmax > 0.0 ? g.L() / (2.0 * vmax) : std::numeric_limits<double>::infinity();
  }
  rep.window_lo = opt.window_lo;
  rep.window_hi = std::min(opt.window_hi, 0.8 * rep.recurrence_time);

  for (double t : times) {
    const WaveSpectrum w = prop.propagate(s0, t, opt.eps);
    const WaveState st = to_state(w);
    double sup_v = 0.0;
    double l4 = std::pow(lp_norm(st.s, 4.0), 4.0);
    for (const ScalarField& c : st.V.c) {
      sup_v = std::max(sup_v, sup_norm(c));
      l4 += std::pow(lp_norm(c, 4.0), 4.0);
    }
    rep.times.push_back(t);
    rep.sup_s.push_back(sup_norm(st.s));
    rep.sup_V.push_back(sup_v);
    rep.l2_total.push_back(std::sqrt(w.energy()));
    rep.l4_total.push_back(std::pow(l4, 0.25));
    rep.sobolev_total.push_back(std::sqrt(w.sobolev_energy(opt.sobolev_m)));
    rep.beyond_recurrence.push_back(std::abs(t) > rep.recurrence_time);
  }

  for (std::size_t n = 0; n < rep.times.size(); ++n) {
    rep.l2_drift = std::max(rep.l2_drift,
                            std::abs(rep.l2_total[n] - rep.l2_total[0]) / rep.l2_total[0]);
    rep.sobolev_drift =
        std::max(rep.sobolev_drift,
                 std::abs(rep.sobolev_total[n] - rep.sobolev_total[0]) / rep.sobolev_total[0]);
  }

  std::vector<double> lx, ly;
  for (std::size_t n = 0; n < rep.times.size(); ++n) {
    const double t = rep.times[n];
    const double sup = std::max(rep.sup_s[n], rep.sup_V[n]);
    if (t >= rep.window_lo && t <= rep.window_hi && !rep.beyond_recurrence[n] && sup > 0.0) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(sup));
    }
  }
  rep.fitted_points = lx.size();
  rep.window_empty = lx.size() < 2;
  if (!rep.window_empty) {
    const double nn = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t n = 0; n < lx.size(); ++n) {
      sx += lx[n];
      sy += ly[n];
      sxx += lx[n] * lx[n];
      sxy += lx[n] * ly[n];
    }
    const double den = nn * sxx - sx * sx;
    rep.slope = den > 0.0 ? (nn * sxy - sx * sy) / den : 0.0;
    rep.intercept = (sy - rep.slope * sx) / nn;
    double res = 0.0;
    for (std::size_t n = 0; n < lx.size(); ++n) {
      const double d = ly[n] - (rep.intercept + rep.slope * lx[n]);
      res += d * d;
    }
    rep.fit_residual = std::sqrt(res / nn);
  }
  return rep;
}

}  // namespace rwl
