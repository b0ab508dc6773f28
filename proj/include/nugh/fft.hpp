#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace nugh {

namespace detail {
inline std::mutex& fftwPlannerMutex() {
  static std::mutex mutex;
  return mutex;
}
}  // namespace detail

/// In-place forward DFT: X_j = sum_k x_k exp(-2 pi i jk / N).
inline void fftForward(std::vector<std::complex<double>>& data) {
  if (data.empty()) return;
  auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftwPlannerMutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buffer, buffer, FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fftw planning failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(detail::fftwPlannerMutex());
  fftw_destroy_plan(plan);
}

}  // namespace nugh
