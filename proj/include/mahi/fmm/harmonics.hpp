#pragma once

#include <complex>
#include <vector>

#include "mahi/vec3.hpp"

namespace mahi::fmm {

using cplx = std::complex<double>;

constexpr int coeff_count(int p) { return (p + 1) * (p + 1); }
constexpr int cidx(int n, int m) { return n * n + n + m; }

// Regular solid harmonics  R_n^m(x) = r^n P_n^m(cos t) e^{i m phi} / (n+m)!
// Irregular solid harmonics I_n^m(x) = (n-m)! P_n^m(cos t) e^{i m phi} / r^{n+1}
// P_n^m carries the Condon-Shortley phase; both obey
// X_n^{-m} = (-1)^m conj(X_n^m). With this pair
//   1/|x - y| = sum_{n,m} conj(R_n^m(y)) I_n^m(x)        for |y| < |x|.
// `out` must hold coeff_count(p) values.
void regular_harmonics(const Vec3& x, int p, cplx* out);
void irregular_harmonics(const Vec3& x, int p, cplx* out);

std::vector<cplx> regular_harmonics(const Vec3& x, int p);
std::vector<cplx> irregular_harmonics(const Vec3& x, int p);

}  // namespace mahi::fmm
