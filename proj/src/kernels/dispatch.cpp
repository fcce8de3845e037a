#include <atomic>
#include <cstdlib>
#include <string>

#include "arelab/errors.hpp"
#include "kernel_tables.hpp"

namespace arelab::kernels {

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

Isa best_supported() noexcept { return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

const KernelTable* initial_table() {
  const char* env = std::getenv("ARE_LAB_KERNEL");
  const Isa isa = (env != nullptr && *env != '\0') ? parse_isa(env) : best_supported();
  return &table(isa);
}

}  // namespace

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(ARELAB_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw CapabilityError("kernel variant '" + std::string(isa_name(isa)) +
                          "' is not available on this CPU/build");
  }
#if defined(ARELAB_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::kAvx2Table;
#endif
  return detail::kScalarTable;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const KernelTable* chosen = initial_table();
    const KernelTable* expected = nullptr;
    g_active.compare_exchange_strong(expected, chosen, std::memory_order_acq_rel);
    t = g_active.load(std::memory_order_acquire);
  }
  return *t;
}

void select(Isa isa) { g_active.store(&table(isa), std::memory_order_release); }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "auto") return best_supported();
  throw DomainError("unknown kernel variant '" + std::string(name) +
                    "' (expected scalar, avx2 or auto)");
}

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

void power_tail_log_density(std::span<const double> x, std::span<double> out,
                            PowerTailParams p) {
  active().power_tail_log_density(x.data(), out.data(), x.size(), p);
}

double power_tail_log_density_sum(std::span<const double> x, PowerTailParams p) {
  return active().power_tail_log_density_sum(x.data(), x.size(), p);
}

void power_tail_quantile(std::span<double> values, PowerTailParams p) {
  active().power_tail_quantile(values.data(), values.size(), p);
}

double ks_max_gap(std::span<const double> sorted) {
  return active().ks_max_gap(sorted.data(), sorted.size());
}

bool band_exceeded(std::span<const double> sorted, std::span<const double> lower,
                   std::span<const double> upper) {
  return active().band_exceeded(sorted.data(), lower.data(), upper.data(), sorted.size());
}

}  // namespace arelab::kernels
