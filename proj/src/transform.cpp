#include "wavepart/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace wp {

namespace {

// One pair of plans per grid size. FFTW planning is not thread-safe, the
// new-array execute functions are; buffers are fftw_malloc'ed so alignment
// always matches the planning buffers.
struct PlanPair {
  fftw_plan to_spectrum = nullptr;    // e^{+ikx}: FFTW_BACKWARD
  fftw_plan to_samples = nullptr;     // e^{-ikx}: FFTW_FORWARD
  ~PlanPair() {
    if (to_spectrum) fftw_destroy_plan(to_spectrum);
    if (to_samples) fftw_destroy_plan(to_samples);
  }
};

struct Buffer {
  fftw_complex* data;
  explicit Buffer(std::size_t size)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size))) {}
  ~Buffer() { fftw_free(data); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  cplx* as_complex() { return reinterpret_cast<cplx*>(data); }
};

std::mutex plan_mutex;

const PlanPair& plans_for(int n) {
  static std::map<int, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto plans = std::make_unique<PlanPair>();
  Buffer scratch(static_cast<std::size_t>(n) * n * n);
  plans->to_spectrum =
      fftw_plan_dft_3d(n, n, n, scratch.data, scratch.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  plans->to_samples =
      fftw_plan_dft_3d(n, n, n, scratch.data, scratch.data, FFTW_FORWARD, FFTW_ESTIMATE);
  auto& ref = *plans;
  cache.emplace(n, std::move(plans));
  return ref;
}

// (-1)^{m_x + m_y + m_z}: phase of e^{i k_m (-L/2)} per axis.
inline double centering_sign(const Grid3& g, int i, int j, int l) {
  return ((g.mode(i) + g.mode(j) + g.mode(l)) & 1) ? -1.0 : 1.0;
}

template <typename In>
SpectralData forward_impl(const Grid3& grid, std::span<const In> samples) {
  const int n = grid.n();
  const std::size_t size = grid.size();
  Buffer buf(size);
  cplx* b = buf.as_complex();
  std::copy(samples.begin(), samples.end(), b);
  fftw_execute_dft(plans_for(n).to_spectrum, buf.data, buf.data);
  const double scale = grid.cell_volume() * std::pow(2.0 * std::numbers::pi, -1.5);
  SpectralData out(size);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t idx = grid.index(i, j, l);
        out[idx] = b[idx] * (scale * centering_sign(grid, i, j, l));
      }
  return out;
}

}  // namespace

SpectralData forward(const Grid3& grid, std::span<const double> samples) {
  return forward_impl<double>(grid, samples);
}

SpectralData forward(const Grid3& grid, std::span<const cplx> samples) {
  return forward_impl<cplx>(grid, samples);
}

std::vector<cplx> inverse(const Grid3& grid, std::span<const cplx> spectrum) {
  const int n = grid.n();
  const std::size_t size = grid.size();
  Buffer buf(size);
  cplx* b = buf.as_complex();
  const double scale = std::pow(2.0 * std::numbers::pi, -1.5) * grid.mode_volume();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const std::size_t idx = grid.index(i, j, l);
        b[idx] = spectrum[idx] * (scale * centering_sign(grid, i, j, l));
      }
  fftw_execute_dft(plans_for(n).to_samples, buf.data, buf.data);
  return std::vector<cplx>(b, b + size);
}

RealData inverse_real(const Grid3& grid, std::span<const cplx> spectrum) {
  const auto values = inverse(grid, spectrum);
  RealData out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

double imaginary_fraction(const Grid3& grid, std::span<const cplx> spectrum) {
  const auto values = inverse(grid, spectrum);
  double re = 0.0, im = 0.0;
  for (const auto& z : values) {
    re = std::max(re, std::abs(z.real()));
    im = std::max(im, std::abs(z.imag()));
  }
  return re > 0.0 ? im / re : im;
}

}  // namespace wp
