#include "ugcs/kernels.hpp"

#include <arm_neon.h>

#include <limits>

namespace ugcs::kernels::detail {

// Lanes 0..3 are carried as two float64x2 registers so the expression tree
// matches the 4-lane scalar and AVX2 variants.
double sum_neon(const double* data, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(data + i));
    hi = vaddq_f64(hi, vld1q_f64(data + i + 2));
  }
  double total = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
                 (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (std::size_t i = n4; i < n; ++i) total += data[i];
  return total;
}

double max_neon(const double* data, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(-std::numeric_limits<double>::infinity());
  float64x2_t hi = lo;
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    lo = vmaxq_f64(lo, vld1q_f64(data + i));
    hi = vmaxq_f64(hi, vld1q_f64(data + i + 2));
  }
  double best = vmaxvq_f64(vmaxq_f64(lo, hi));
  for (std::size_t i = n4; i < n; ++i) best = data[i] > best ? data[i] : best;
  return best;
}

void clamp_nonpositive_neon(double* data, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const std::size_t n2 = n - n % 2;
  for (std::size_t i = 0; i < n2; i += 2) {
    float64x2_t x = vld1q_f64(data + i);
    // vminq would map -0.0 to -0.0; select keeps the scalar semantics.
    vst1q_f64(data + i, vbslq_f64(vcltq_f64(x, zero), x, zero));
  }
  for (std::size_t i = n2; i < n; ++i) data[i] = data[i] < 0.0 ? data[i] : 0.0;
}

}  // namespace ugcs::kernels::detail
