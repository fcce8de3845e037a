#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference variant and,
// on x86-64, an AVX2+FMA variant chosen at runtime. Variants agree bit for bit
// on the integer and comparison kernels and to a few ulps on the
// transcendental ones (see tests/unit/kernels_test.cpp).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace arelab::kernels {

enum class Isa { scalar, avx2 };

struct PowerTailParams {
  double theta = 0.0;  // mixing weight of f
  double r = 0.0;      // f(t) = (1 - r) t^(-r)
};

struct KernelTable {
  Isa isa;
  const char* name;
  // 2 * blocks uniforms from Philox blocks [first_block, first_block + blocks).
  void (*philox_uniforms)(std::uint32_t k0, std::uint32_t k1, std::uint64_t stream,
                          std::uint64_t first_block, double* out, std::size_t blocks);
  void (*power_tail_log_density)(const double* x, double* out, std::size_t n, PowerTailParams p);
  double (*power_tail_log_density_sum)(const double* x, std::size_t n, PowerTailParams p);
  // In place: u -> F^{-1}(u) for the mixture CDF (1 - theta) t + theta t^(1 - r).
  void (*power_tail_quantile)(double* values, std::size_t n, PowerTailParams p);
  double (*ks_max_gap)(const double* sorted, std::size_t n);
  bool (*band_exceeded)(const double* sorted, const double* lower, const double* upper,
                        std::size_t n);
};

bool supported(Isa isa) noexcept;
const KernelTable& table(Isa isa);  // CapabilityError if the CPU lacks the ISA

// The table used by the library. Chosen on first use from ARE_LAB_KERNEL
// (scalar|avx2|auto, default auto).
const KernelTable& active();
void select(Isa isa);
Isa parse_isa(std::string_view name);  // "auto" resolves to the best supported
std::string_view isa_name(Isa isa) noexcept;

// Span conveniences over active().
void power_tail_log_density(std::span<const double> x, std::span<double> out, PowerTailParams p);
double power_tail_log_density_sum(std::span<const double> x, PowerTailParams p);
void power_tail_quantile(std::span<double> values, PowerTailParams p);
double ks_max_gap(std::span<const double> sorted);
bool band_exceeded(std::span<const double> sorted, std::span<const double> lower,
                   std::span<const double> upper);

}  // namespace arelab::kernels
