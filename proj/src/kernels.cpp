#include "stark/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace stark::kernels {
namespace {

thread_local std::uint64_t t_flops = 0;

bool cpu_has_avx2() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Impl detect_impl() {
  if (const char* env = std::getenv("STARK_KERNEL")) {
    const std::string v(env);
    if (v == "scalar") return Impl::scalar;
    if (v == "avx2") {
      if (!cpu_has_avx2())
        throw std::runtime_error("STARK_KERNEL=avx2 but the CPU lacks AVX2");
      return Impl::avx2;
    }
    // anything else (including "auto") falls through to detection
  }
  return cpu_has_avx2() ? Impl::avx2 : Impl::scalar;
}

std::atomic<Impl>& current_impl() {
  static std::atomic<Impl> impl{detect_impl()};
  return impl;
}

const Ops& ops_for(Impl impl) {
#if defined(__x86_64__)
  if (impl == Impl::avx2) return detail::avx2_ops;
#endif
  (void)impl;
  return detail::scalar_ops;
}

}  // namespace

const Ops& active() { return ops_for(current_impl().load(std::memory_order_relaxed)); }

Impl active_impl() { return current_impl().load(std::memory_order_relaxed); }

bool supports(Impl impl) {
  switch (impl) {
    case Impl::scalar: return true;
    case Impl::avx2: return cpu_has_avx2();
  }
  return false;
}

void force(Impl impl) {
  if (!supports(impl))
    throw std::invalid_argument("kernel implementation not supported on this CPU: " +
                                std::string(impl_name(impl)));
  current_impl().store(impl, std::memory_order_relaxed);
}

std::string_view impl_name(Impl impl) {
  switch (impl) {
    case Impl::scalar: return "scalar";
    case Impl::avx2: return "avx2";
  }
  return "?";
}

std::uint64_t thread_flops() { return t_flops; }

void bump_thread_flops(std::uint64_t madds) { t_flops += madds; }

}  // namespace stark::kernels
