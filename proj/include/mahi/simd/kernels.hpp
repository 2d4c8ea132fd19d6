#pragma once

#include <complex>

namespace mahi::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

// Best instruction set this CPU supports.
Isa detected_isa();
// What the kernels below dispatch to: MAHI_SIMD=scalar|avx2 overrides the
// detected default at first use.
Isa active_isa();
// Throws if the CPU lacks the requested set.
void set_active_isa(Isa isa);
bool isa_supported(Isa isa);
const char* isa_name(Isa isa);

// sum_{j<n} q[j] / |t - s_j|
double p2p_potential(Isa isa, double tx, double ty, double tz, const double* x, const double* y, const double* z,
                     const double* q, int n);

// acc(k,l) += sum_{n<=p,m} M(n,m) I(n+k, m+l) for 0 <= l <= k <= p.
// theta holds irregular harmonics up to order 2p; acc entries with l < 0
// are left untouched.
void m2l_accumulate(Isa isa, const cplx* multipole, const cplx* theta, int p, cplx* acc);

inline double p2p_potential(double tx, double ty, double tz, const double* x, const double* y, const double* z,
                            const double* q, int n) {
    return p2p_potential(active_isa(), tx, ty, tz, x, y, z, q, n);
}
inline void m2l_accumulate(const cplx* multipole, const cplx* theta, int p, cplx* acc) {
    m2l_accumulate(active_isa(), multipole, theta, p, acc);
}

namespace scalar_impl {
double p2p_potential(double tx, double ty, double tz, const double* x, const double* y, const double* z,
                     const double* q, int n);
void m2l_accumulate(const cplx* multipole, const cplx* theta, int p, cplx* acc);
}  // namespace scalar_impl

namespace avx2_impl {
double p2p_potential(double tx, double ty, double tz, const double* x, const double* y, const double* z,
                     const double* q, int n);
void m2l_accumulate(const cplx* multipole, const cplx* theta, int p, cplx* acc);
}  // namespace avx2_impl

}  // namespace mahi::simd
