#include "ugcs/kernels.hpp"

#include <limits>

namespace ugcs::kernels::detail {

double sum_scalar(const double* data, std::size_t n) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    l0 += data[i];
    l1 += data[i + 1];
    l2 += data[i + 2];
    l3 += data[i + 3];
  }
  double total = (l0 + l1) + (l2 + l3);
  for (std::size_t i = n4; i < n; ++i) total += data[i];
  return total;
}

double max_scalar(const double* data, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) best = data[i] > best ? data[i] : best;
  return best;
}

void clamp_nonpositive_scalar(double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) data[i] = data[i] < 0.0 ? data[i] : 0.0;
}

}  // namespace ugcs::kernels::detail
