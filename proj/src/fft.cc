// SPDX-License-Identifier: Apache-2.0

#include "restorelab/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace restorelab {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on fresh
// arrays is. Plans are created once per size under a lock and never freed.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const int len = static_cast<int>(n);
  double* real = fftw_alloc_real(n);
  fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
  PlanPair p;
  // FFTW_UNALIGNED keeps the chosen codelets independent of the alignment of
  // whatever buffers the plan is later executed on, which keeps results
  // bit-reproducible between calls.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_r2c_1d(len, real, cplx, flags);
  p.inverse = fftw_plan_dft_c2r_1d(len, cplx, real, flags | FFTW_DESTROY_INPUT);
  fftw_free(real);
  fftw_free(cplx);
  if (p.forward == nullptr || p.inverse == nullptr) {
    throw std::runtime_error("fft: planning failed for size " +
                             std::to_string(n));
  }
  return cache.emplace(n, p).first->second;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> in) {
  const std::size_t n = in.size();
  if (n == 0) throw std::invalid_argument("rfft: empty input");
  const PlanPair& p = plans_for(n);
  std::unique_ptr<double, FftwDeleter> real(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwDeleter> cplx(fftw_alloc_complex(n / 2 + 1));
  std::copy(in.begin(), in.end(), real.get());
  fftw_execute_dft_r2c(p.forward, real.get(), cplx.get());
  std::vector<std::complex<double>> out(n / 2 + 1);
  std::memcpy(static_cast<void*>(out.data()), cplx.get(), out.size() * sizeof(fftw_complex));
  return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> bins,
                          std::size_t n) {
  if (n == 0 || bins.size() != n / 2 + 1) {
    throw std::invalid_argument("irfft: expected n/2+1 bins");
  }
  const PlanPair& p = plans_for(n);
  std::unique_ptr<double, FftwDeleter> real(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwDeleter> cplx(fftw_alloc_complex(n / 2 + 1));
  std::memcpy(cplx.get(), bins.data(), bins.size() * sizeof(fftw_complex));
  fftw_execute_dft_c2r(p.inverse, cplx.get(), real.get());
  std::vector<double> out(real.get(), real.get() + n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace restorelab
