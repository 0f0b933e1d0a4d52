#include "collision/sweep.hpp"

namespace rqbe::detail {

#if defined(__AVX2__) && defined(__FMA__)
const KernelTable* avx2_kernels() {
  static const KernelTable t = Sweep<simd::Avx2>::table("avx2");
  return &t;
}
#else
const KernelTable* avx2_kernels() { return nullptr; }
#endif

}  // namespace rqbe::detail
