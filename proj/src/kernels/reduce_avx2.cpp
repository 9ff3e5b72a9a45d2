// Compiled with -mavx2; only reached after a runtime CPU check.
#include "ugcs/kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace ugcs::kernels::detail {

double sum_avx2(const double* data, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(data + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (std::size_t i = n4; i < n; ++i) total += data[i];
  return total;
}

double max_avx2(const double* data, std::size_t n) {
  __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc = _mm256_max_pd(acc, _mm256_loadu_pd(data + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double best = lanes[0];
  for (int j = 1; j < 4; ++j) best = lanes[j] > best ? lanes[j] : best;
  for (std::size_t i = n4; i < n; ++i) best = data[i] > best ? data[i] : best;
  return best;
}

void clamp_nonpositive_avx2(double* data, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    // minpd returns the second operand unless the first is strictly smaller,
    // matching the scalar (x < 0 ? x : 0), including for -0.0.
    _mm256_storeu_pd(data + i, _mm256_min_pd(_mm256_loadu_pd(data + i), zero));
  }
  for (std::size_t i = n4; i < n; ++i) data[i] = data[i] < 0.0 ? data[i] : 0.0;
}

}  // namespace ugcs::kernels::detail
