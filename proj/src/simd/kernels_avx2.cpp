// Built with -mavx2 -mfma; only reached when the CPU reports both.
#include <immintrin.h>

#include <cmath>

#include "mahi/fmm/harmonics.hpp"
#include "mahi/simd/kernels.hpp"

namespace mahi::simd::avx2_impl {

using fmm::cidx;

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

double p2p_potential(double tx, double ty, double tz, const double* x, const double* y, const double* z,
                     const double* q, int n) {
    const __m256d vx = _mm256_set1_pd(tx), vy = _mm256_set1_pd(ty), vz = _mm256_set1_pd(tz);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    int j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(x + j));
        const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(y + j));
        const __m256d dz = _mm256_sub_pd(vz, _mm256_loadu_pd(z + j));
        // no fma here: keeps r^2 bitwise equal to the scalar kernel
        const __m256d r2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                         _mm256_mul_pd(dz, dz));
        const __m256d inv = _mm256_div_pd(one, _mm256_sqrt_pd(r2));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(q + j), inv));
    }
    double tail = 0.0;
    for (; j < n; ++j) {
        const double dx = tx - x[j], dy = ty - y[j], dz = tz - z[j];
        tail += q[j] * (1.0 / std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    return hsum(acc) + tail;
}

// Complex dot products on interleaved (re, im) pairs, two per register:
// `pp` collects (ar br, ai bi) and `px` collects (ar bi, ai br).
void m2l_accumulate(const cplx* M, const cplx* theta, int p, cplx* acc) {
    const double* md = reinterpret_cast<const double*>(M);
    const double* td = reinterpret_cast<const double*>(theta);
    for (int k = 0; k <= p; ++k) {
        for (int l = 0; l <= k; ++l) {
            __m256d pp = _mm256_setzero_pd(), px = _mm256_setzero_pd();
            double re = 0.0, im = 0.0;
            for (int n = 0; n <= p; ++n) {
                const double* a = md + 2 * cidx(n, -n);
                const double* b = td + 2 * cidx(n + k, l - n);
                const int len = 2 * n + 1;
                int i = 0;
                for (; i + 2 <= len; i += 2) {
                    const __m256d va = _mm256_loadu_pd(a + 2 * i);
                    const __m256d vb = _mm256_loadu_pd(b + 2 * i);
                    pp = _mm256_fmadd_pd(va, vb, pp);
                    px = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), px);
                }
                for (; i < len; ++i) {
                    const double ar = a[2 * i], ai = a[2 * i + 1], br = b[2 * i], bi = b[2 * i + 1];
                    re += ar * br - ai * bi;
                    im += ar * bi + ai * br;
                }
            }
            alignas(32) double s[4], t[4];
            _mm256_store_pd(s, pp);
            _mm256_store_pd(t, px);
            re += (s[0] - s[1]) + (s[2] - s[3]);
            im += (t[0] + t[1]) + (t[2] + t[3]);
            acc[cidx(k, l)] += cplx(re, im);
        }
    }
}

}  // namespace mahi::simd::avx2_impl
