#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace twmg::detail {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t width, std::size_t height, FftSign sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(width, height, static_cast<int>(sign));
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW's planner is not re-entrant; execution through fftw_execute_dft is.
    std::vector<std::complex<double>> scratch(width * height);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int fftw_sign = sign == FftSign::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), buf, buf,
                                      fftw_sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void checkerboard(Grid2D<std::complex<double>>& data, double global) {
  for (std::size_t r = 0; r < data.height(); ++r) {
    for (std::size_t c = 0; c < data.width(); ++c) {
      const double s = ((r + c) & 1U) ? -global : global;
      data(r, c) *= s;
    }
  }
}

double half_length_sign(std::size_t n) { return ((n / 2) & 1U) ? -1.0 : 1.0; }

}  // namespace

void centered_dft(Grid2D<std::complex<double>>& data, FftSign sign) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(data.width(), data.height(), sign);
  checkerboard(data, 1.0);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
  checkerboard(data, half_length_sign(data.width()) * half_length_sign(data.height()));
}

}  // namespace twmg::detail
