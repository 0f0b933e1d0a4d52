#pragma once

namespace rqbe {

// Runtime selection of the collision sweep implementation. The AVX2 kernels
// are used when the CPU supports AVX2 and FMA, unless forced off here or via
// the RQBE_FORCE_SCALAR environment variable.
void force_scalar_kernels(bool on);
bool avx2_available();
const char* active_kernel_name();

}  // namespace rqbe
