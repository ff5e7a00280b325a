#include "nsreg/kernels/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace nsreg::kernels {
namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve_auto() {
  if (const Ops* avx2 = avx2_ops(); avx2 != nullptr && avx2_supported())
    return avx2;
  return &scalar_ops();
}

const Ops* resolve_from_env() {
  const char* env = std::getenv("NSREG_KERNEL");
  if (env == nullptr || std::strcmp(env, "auto") == 0) return resolve_auto();
  if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
  if (std::strcmp(env, "avx2") == 0) {
    const Ops* avx2 = avx2_ops();
    if (avx2 == nullptr || !avx2_supported())
      throw std::runtime_error("NSREG_KERNEL=avx2 but AVX2 is unavailable");
    return avx2;
  }
  throw std::runtime_error(std::string("unknown NSREG_KERNEL value: ") + env);
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (ops == nullptr) {
    ops = resolve_from_env();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

void force_backend(Backend backend) {
  switch (backend) {
    case Backend::kAuto:
      g_active.store(resolve_auto(), std::memory_order_release);
      return;
    case Backend::kScalar:
      g_active.store(&scalar_ops(), std::memory_order_release);
      return;
    case Backend::kAvx2: {
      const Ops* avx2 = avx2_ops();
      if (avx2 == nullptr || !avx2_supported())
        throw std::runtime_error("AVX2 backend unavailable on this machine");
      g_active.store(avx2, std::memory_order_release);
      return;
    }
  }
  throw std::logic_error("bad backend");
}

}  // namespace nsreg::kernels
