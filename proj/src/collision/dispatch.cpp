#include <atomic>
#include <cstdlib>
#include <cstring>

#include "collision/kernel.hpp"
#include "rqbe/kernel.hpp"

namespace rqbe {

namespace {

std::atomic<bool> g_force_scalar{false};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool env_forces_scalar() {
  const char* v = std::getenv("RQBE_FORCE_SCALAR");
  return v != nullptr && std::strcmp(v, "0") != 0 && *v != '\0';
}

}  // namespace

void force_scalar_kernels(bool on) { g_force_scalar.store(on); }

bool avx2_available() { return detail::avx2_kernels() != nullptr && cpu_has_avx2(); }

const char* active_kernel_name() { return detail::active_kernels().name; }

namespace detail {

const KernelTable& active_kernels() {
  static const bool env = env_forces_scalar();
  if (!g_force_scalar.load() && !env && avx2_available()) return *avx2_kernels();
  return scalar_kernels();
}

}  // namespace detail

}  // namespace rqbe
