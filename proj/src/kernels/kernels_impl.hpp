#pragma once

#include "mdimkit/kernels.hpp"

namespace mdk::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(MDK_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(MDK_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace mdk::kernels::detail
