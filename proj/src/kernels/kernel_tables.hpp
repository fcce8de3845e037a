#pragma once

#include "arelab/kernels.hpp"

namespace arelab::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(ARELAB_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

// Shared constants of the power-tail Newton inversion.
inline constexpr int kQuantileMaxIterations = 60;
inline constexpr double kQuantileRelStep = 4e-16;

}  // namespace arelab::kernels::detail
