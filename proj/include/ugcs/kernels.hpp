#pragma once

// Vectorized reductions used on the ingestion and scoring hot paths.
//
// Every variant (scalar, AVX2, NEON) evaluates the same expression tree:
// four interleaved lane accumulators over the largest multiple-of-4 prefix,
// combined as (l0 + l1) + (l2 + l3), followed by a sequential tail. Results
// are therefore bit-identical regardless of which variant is dispatched.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ugcs::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*sum)(const double* data, std::size_t n);
  // Largest element, -inf when n == 0. Inputs must not contain NaN.
  double (*max)(const double* data, std::size_t n);
  // x <- (x < 0 ? x : 0) in place.
  void (*clamp_nonpositive)(double* data, std::size_t n);
};

// Variants compiled in and supported by the running CPU, scalar first.
std::vector<Isa> available_isas();

// Throws std::invalid_argument if the variant is unavailable.
const KernelTable& table_for(Isa isa);

// The dispatched table. Chosen once: the best available variant, unless the
// UGCS_SIMD environment variable names another available one.
const KernelTable& active();

void set_active(Isa isa);

inline double sum(std::span<const double> xs) { return active().sum(xs.data(), xs.size()); }
inline double max_value(std::span<const double> xs) { return active().max(xs.data(), xs.size()); }
inline void clamp_nonpositive(std::span<double> xs) { active().clamp_nonpositive(xs.data(), xs.size()); }

// Arithmetic mean through the dispatched sum; n must be > 0.
inline double mean(std::span<const double> xs) {
  return sum(xs) / static_cast<double>(xs.size());
}

namespace detail {
double sum_scalar(const double* data, std::size_t n);
double max_scalar(const double* data, std::size_t n);
void clamp_nonpositive_scalar(double* data, std::size_t n);
#if defined(UGCS_HAVE_AVX2)
double sum_avx2(const double* data, std::size_t n);
double max_avx2(const double* data, std::size_t n);
void clamp_nonpositive_avx2(double* data, std::size_t n);
#endif
#if defined(UGCS_HAVE_NEON)
double sum_neon(const double* data, std::size_t n);
double max_neon(const double* data, std::size_t n);
void clamp_nonpositive_neon(double* data, std::size_t n);
#endif
}  // namespace detail

}  // namespace ugcs::kernels
