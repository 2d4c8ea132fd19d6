#include <cmath>

#include "mahi/fmm/harmonics.hpp"
#include "mahi/simd/kernels.hpp"

namespace mahi::simd::scalar_impl {

using fmm::cidx;

double p2p_potential(double tx, double ty, double tz, const double* x, const double* y, const double* z,
                     const double* q, int n) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double dx = tx - x[j], dy = ty - y[j], dz = tz - z[j];
        acc += q[j] * (1.0 / std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    return acc;
}

void m2l_accumulate(const cplx* M, const cplx* theta, int p, cplx* acc) {
    for (int k = 0; k <= p; ++k) {
        for (int l = 0; l <= k; ++l) {
            double re = 0.0, im = 0.0;
            for (int n = 0; n <= p; ++n) {
                const cplx* a = M + cidx(n, -n);
                const cplx* b = theta + cidx(n + k, l - n);
                for (int i = 0; i < 2 * n + 1; ++i) {
                    re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
                    im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
                }
            }
            acc[cidx(k, l)] += cplx(re, im);
        }
    }
}

}  // namespace mahi::simd::scalar_impl
