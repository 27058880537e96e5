#include "qrep/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace qrep {

#if !defined(QREP_HAVE_AVX2)
const KernelTable& avx2_kernels() { return scalar_kernels(); }
#endif

bool avx2_available() {
#if defined(QREP_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* pick_default() {
    if (const char* env = std::getenv("QREP_ISA")) {
        const std::string want = env;
        if (want == "scalar") return &scalar_kernels();
        if (want == "avx2") {
            if (!avx2_available())
                throw std::runtime_error("QREP_ISA=avx2 but AVX2 is unavailable");
            return &avx2_kernels();
        }
    }
    return avx2_available() ? &avx2_kernels() : &scalar_kernels();
}
}  // namespace

const KernelTable& kernels() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = pick_default();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

std::string select_kernels(const std::string& name) {
    const std::string prev = kernels().name;
    if (name == "scalar") {
        g_active.store(&scalar_kernels(), std::memory_order_release);
    } else if (name == "avx2") {
        if (!avx2_available())
            throw std::invalid_argument("AVX2 kernels unavailable on this host");
        g_active.store(&avx2_kernels(), std::memory_order_release);
    } else if (name == "auto") {
        g_active.store(avx2_available() ? &avx2_kernels() : &scalar_kernels(),
                       std::memory_order_release);
    } else {
        throw std::invalid_argument("unknown kernel table: " + name);
    }
    return prev;
}

}  // namespace qrep
