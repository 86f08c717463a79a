#include "qiwave/grid.hpp"

#include <fftw3.h>

#include <cassert>
#include <map>
#include <mutex>
#include <stdexcept>

namespace qiwave {

namespace {

// FFTW planning is not thread safe; execution through the new-array
// interface is.  Plans are created once per size and live until exit.
class PlanCache {
 public:
  struct Plans {
    fftw_plan c2r;
    fftw_plan r2c;
  };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  const Plans& get(int m) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(m);
    if (it != plans_.end()) return it->second;
    const int half = m / 2 + 1;
    std::vector<double> real(static_cast<std::size_t>(m) * m);
    std::vector<fftw_complex> spec(static_cast<std::size_t>(m) * half);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{};
    p.c2r = fftw_plan_dft_c2r_2d(m, m, spec.data(), real.data(), flags);
    p.r2c = fftw_plan_dft_r2c_2d(m, m, real.data(), spec.data(), flags);
    if (p.c2r == nullptr || p.r2c == nullptr)
      throw std::runtime_error("fftw planning failed");
    return plans_.emplace(m, p).first->second;
  }

  ~PlanCache() {
    for (auto& [m, p] : plans_) {
      fftw_destroy_plan(p.c2r);
      fftw_destroy_plan(p.r2c);
    }
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<int, Plans> plans_;
};

inline int wrap(int k, int m) { return k < 0 ? k + m : k; }

}  // namespace

int fft_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

std::vector<double> to_grid(const SpectralField& f, int points) {
  const int k = f.max_mode();
  if (points < 2 * k + 1)
    throw std::invalid_argument("to_grid: grid too coarse for the window");
  const int m = points;
  const int half = m / 2 + 1;
  std::vector<Complex> spec(static_cast<std::size_t>(m) * half);
  for (int n2 = -k; n2 <= k; ++n2) {
    const std::size_t row = static_cast<std::size_t>(wrap(n2, m)) * half;
    for (int n1 = 0; n1 <= k; ++n1) spec[row + n1] = f(n1, n2);
  }
  std::vector<double> out(static_cast<std::size_t>(m) * m);
  fftw_execute_dft_c2r(PlanCache::instance().get(m).c2r,
                       reinterpret_cast<fftw_complex*>(spec.data()),
                       out.data());
  return out;
}

SpectralField from_grid(std::span<const double> values, int points,
                        int max_mode) {
  const int m = points;
  if (2 * max_mode + 1 > m)
    throw std::invalid_argument("from_grid: window exceeds grid resolution");
  if (values.size() != static_cast<std::size_t>(m) * m)
    throw std::invalid_argument("from_grid: size mismatch");
  const int half = m / 2 + 1;
  std::vector<double> in(values.begin(), values.end());
  std::vector<Complex> spec(static_cast<std::size_t>(m) * half);
  fftw_execute_dft_r2c(PlanCache::instance().get(m).r2c, in.data(),
                       reinterpret_cast<fftw_complex*>(spec.data()));
  const double scale = 1.0 / (static_cast<double>(m) * m);
  auto at = [&](int n1, int n2) {
    // n1 >= 0 lives in the stored half; n1 < 0 is the conjugate partner.
    if (n1 >= 0) return spec[static_cast<std::size_t>(wrap(n2, m)) * half + n1];
    return std::conj(
        spec[static_cast<std::size_t>(wrap(-n2, m)) * half + (-n1)]);
  };
  SpectralField f(max_mode);
  f.set(0, 0, at(0, 0).real() * scale);
  for (int n1 = 1; n1 <= max_mode; ++n1) f.set(n1, 0, at(n1, 0) * scale);
  for (int n2 = 1; n2 <= max_mode; ++n2)
    for (int n1 = -max_mode; n1 <= max_mode; ++n1)
      f.set(n1, n2, at(n1, n2) * scale);
  return f;
}

double grid_mean(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x;
  return s / static_cast<double>(a.size());
}

double grid_mean(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s / static_cast<double>(a.size());
}

double grid_mean(std::span<const double> a, std::span<const double> b,
                 std::span<const double> c, std::span<const double> d) {
  assert(a.size() == b.size() && b.size() == c.size() && c.size() == d.size());
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j] * c[j] * d[j];
  return s / static_cast<double>(a.size());
}

}  // namespace qiwave
