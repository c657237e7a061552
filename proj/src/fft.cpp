#include "qclim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace qclim::fft {

namespace {

// The FFTW planner is not thread safe; execution of an existing plan on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(const std::vector<int>& dims, int sign) {
  require(!dims.empty() && dims.size() <= 3, "FFT rank must be 1, 2 or 3");
  static std::map<std::tuple<std::vector<int>, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_tuple(dims, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::size_t n = 1;
  for (int d : dims) {
    require(d > 0, "FFT axis length must be positive");
    n *= static_cast<std::size_t>(d);
  }
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  require(p != nullptr, "FFTW planning failed", ErrorKind::Solver);
  cache.emplace(key, p);
  return p;
}

void run(const std::vector<int>& dims, cplx* data, int sign) {
  fftw_plan p = plan_for(dims, sign);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

}  // namespace

void forward(const std::vector<int>& dims, cplx* data) { run(dims, data, FFTW_FORWARD); }
void inverse(const std::vector<int>& dims, cplx* data) { run(dims, data, FFTW_BACKWARD); }

}  // namespace qclim::fft
