#pragma once

#include "fgalgebra/kernels.hpp"

namespace fga::kernels::detail {

const KernelTable& scalar_table() noexcept;

#if defined(FGALGEBRA_HAVE_AVX2_KERNELS)
// Only call after confirming AVX2 and FMA support.
const KernelTable& avx2_table() noexcept;
#endif

}  // namespace fga::kernels::detail
