#include "rwl/transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "rwl/error.hpp"

namespace rwl {
namespace {

// FFTW plans are created once per (shape, direction) and executed through the
// new-array interface, which is safe to call concurrently on distinct buffers.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int nx, int ny, int nz, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_tuple(nx, ny, nz, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    fftw_complex* buf = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nz > 1 ? fftw_plan_dft_3d(nx, ny, nz, buf, buf, sign, flags)
                         : fftw_plan_dft_2d(nx, ny, buf, buf, sign, flags);
    fftw_free(buf);
    require(p != nullptr, ErrorCode::Internal, "FFTW plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

void execute(const Shape& s, std::vector<cplx>& data, int sign) {
  fftw_plan p = PlanCache::instance().get(s.nx(), s.ny(), s.nz(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

SpectralField forward_transform(const ScalarField& f) {
  require(f.all_finite(), ErrorCode::NonFinite, "forward_transform: non-finite samples");
  const Shape& s = f.shape();
  std::vector<cplx> buf(f.size());
  for (std::size_t n = 0; n < buf.size(); ++n) buf[n] = cplx(f[n], 0.0);
  execute(s, buf, FFTW_FORWARD);
  const double scale = s.cell() / std::sqrt(s.measure());
  SpectralField out(s.grid, s.layout);
  for (std::size_t n = 0; n < buf.size(); ++n) out[n] = buf[n] * scale;
  return out;
}

std::vector<cplx> inverse_transform_complex(const SpectralField& f) {
  const Shape& s = f.shape();
  std::vector<cplx> buf(f.values().begin(), f.values().end());
  execute(s, buf, FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(s.measure());
  for (cplx& v : buf) v *= scale;
  return buf;
}

ScalarField inverse_transform(const SpectralField& f, Parity parity) {
  const std::vector<cplx> buf = inverse_transform_complex(f);
  ScalarField out(f.grid(), f.layout(), parity);
  for (std::size_t n = 0; n < buf.size(); ++n) out[n] = buf[n].real();
  return out;
}

std::vector<SpectralField> forward_transform(const VectorField& v) {
  std::vector<SpectralField> out;
  out.reserve(v.dim());
  for (const ScalarField& c : v.c) out.push_back(forward_transform(c));
  return out;
}

VectorField inverse_transform(const std::vector<SpectralField>& v) {
  VectorField out;
  for (const SpectralField& c : v) out.c.push_back(inverse_transform(c));
  return out;
}

}  // namespace rwl
