#include "collision/sweep.hpp"

namespace rqbe::detail {

const KernelTable& scalar_kernels() {
  static const KernelTable t = Sweep<simd::Scalar>::table("scalar");
  return t;
}

}  // namespace rqbe::detail
