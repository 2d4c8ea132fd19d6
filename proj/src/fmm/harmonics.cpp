#include "mahi/fmm/harmonics.hpp"

namespace mahi::fmm {

namespace {

void mirror_negative_orders(int p, cplx* out) {
    for (int n = 1; n <= p; ++n) {
        double sign = -1.0;
        for (int m = 1; m <= n; ++m, sign = -sign) out[cidx(n, -m)] = sign * std::conj(out[cidx(n, m)]);
    }
}

}  // namespace

void regular_harmonics(const Vec3& x, int p, cplx* out) {
    const double r2 = norm2(x);
    const cplx xy(x.x, x.y);
    out[0] = 1.0;
    for (int m = 0; m <= p; ++m) {
        if (m > 0) out[cidx(m, m)] = -xy / (2.0 * m) * out[cidx(m - 1, m - 1)];
        if (m + 1 <= p) out[cidx(m + 1, m)] = x.z * out[cidx(m, m)];
        for (int n = m + 2; n <= p; ++n)
            out[cidx(n, m)] = ((2.0 * n - 1.0) * x.z * out[cidx(n - 1, m)] - r2 * out[cidx(n - 2, m)]) /
                              (static_cast<double>(n + m) * (n - m));
    }
    mirror_negative_orders(p, out);
}

void irregular_harmonics(const Vec3& x, int p, cplx* out) {
    const double r2 = norm2(x);
    const double ir2 = 1.0 / r2;
    const cplx xy(x.x, x.y);
    out[0] = 1.0 / std::sqrt(r2);
    for (int m = 0; m <= p; ++m) {
        if (m > 0) out[cidx(m, m)] = -(2.0 * m - 1.0) * xy * ir2 * out[cidx(m - 1, m - 1)];
        if (m + 1 <= p) out[cidx(m + 1, m)] = (2.0 * m + 1.0) * x.z * ir2 * out[cidx(m, m)];
        for (int n = m + 2; n <= p; ++n)
            out[cidx(n, m)] = ((2.0 * n - 1.0) * x.z * out[cidx(n - 1, m)] -
                               static_cast<double>(n - 1 - m) * (n - 1 + m) * out[cidx(n - 2, m)]) * ir2;
    }
    mirror_negative_orders(p, out);
}

std::vector<cplx> regular_harmonics(const Vec3& x, int p) {
    std::vector<cplx> v(coeff_count(p));
    regular_harmonics(x, p, v.data());
    return v;
}

std::vector<cplx> irregular_harmonics(const Vec3& x, int p) {
    std::vector<cplx> v(coeff_count(p));
    irregular_harmonics(x, p, v.data());
    return v;
}

}  // namespace mahi::fmm
