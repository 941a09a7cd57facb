#ifndef PARASURF_SPECTRAL_FFT_HPP
#define PARASURF_SPECTRAL_FFT_HPP

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace parasurf::fft {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are created once per (N, sign) and reused for the life of the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> a(static_cast<std::size_t>(n) * n), b(a.size());
    fftw_plan p = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& kv : plans_) fftw_destroy_plan(kv.second);
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

/// Unnormalized forward 2D transform of an n x n array (row index = y).
inline void forward(int n, const cplx* in, cplx* out) {
  fftw_execute_dft(PlanCache::instance().get(n, FFTW_FORWARD),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)), reinterpret_cast<fftw_complex*>(out));
}

inline void backward(int n, const cplx* in, cplx* out) {
  fftw_execute_dft(PlanCache::instance().get(n, FFTW_BACKWARD),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)), reinterpret_cast<fftw_complex*>(out));
}

/// Signed wavenumber of FFT index idx; the Nyquist index maps to -n/2.
inline int wavenumber(int idx, int n) { return idx < n / 2 ? idx : idx - n; }

}  // namespace parasurf::fft

#endif  // PARASURF_SPECTRAL_FFT_HPP
