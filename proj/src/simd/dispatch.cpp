#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "mahi/error.hpp"
#include "mahi/simd/kernels.hpp"

namespace mahi::simd {

namespace {

Isa initial_isa() {
    Isa isa = detected_isa();
    if (const char* env = std::getenv("MAHI_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) isa = Isa::scalar;
        else if (std::strcmp(env, "avx2") == 0 && isa_supported(Isa::avx2)) isa = Isa::avx2;
    }
    return isa;
}

std::atomic<int>& active_slot() {
    static std::atomic<int> slot{static_cast<int>(initial_isa())};
    return slot;
}

}  // namespace

bool isa_supported(Isa isa) {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Isa detected_isa() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return static_cast<Isa>(active_slot().load(std::memory_order_relaxed)); }

void set_active_isa(Isa isa) {
    if (!isa_supported(isa)) throw Error(std::string("instruction set not supported: ") + isa_name(isa));
    active_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double p2p_potential(Isa isa, double tx, double ty, double tz, const double* x, const double* y, const double* z,
                     const double* q, int n) {
    if (isa == Isa::avx2) return avx2_impl::p2p_potential(tx, ty, tz, x, y, z, q, n);
    return scalar_impl::p2p_potential(tx, ty, tz, x, y, z, q, n);
}

void m2l_accumulate(Isa isa, const cplx* multipole, const cplx* theta, int p, cplx* acc) {
    if (isa == Isa::avx2) avx2_impl::m2l_accumulate(multipole, theta, p, acc);
    else scalar_impl::m2l_accumulate(multipole, theta, p, acc);
}

}  // namespace mahi::simd
