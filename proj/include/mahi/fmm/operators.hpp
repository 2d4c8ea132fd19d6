#pragma once

#include <span>

#include "mahi/fmm/expansion.hpp"

namespace mahi::fmm {

// All operators accumulate into their output.
//
// Conventions, with R/I the regular/irregular harmonics:
//   multipole  M(n,m) = sum_i q_i conj(R_n^m(y_i - c))
//   far potential      phi(x) = sum M(n,m) I_n^m(x - c)
//   local potential    phi(x) = sum L(n,m) conj(R_n^m(x - c))

void p2m(std::span<const Vec3> positions, std::span<const double> charges, const Vec3& center, Coefficients& out);
// shift = child center - parent center
void m2m(const Coefficients& child, const Vec3& shift, Coefficients& parent);
// t = local center - multipole center
void m2l(const Coefficients& multipole, const Vec3& t, Coefficients& local);
// shift = child center - parent center
void l2l(const Coefficients& parent, const Vec3& shift, Coefficients& child);
// Local expansion about `center` of a point charge q at y.
void p2l(double q, const Vec3& y, const Vec3& center, Coefficients& local);

// u = x - center
double l2p(const Coefficients& local, const Vec3& u);
// Potential and its gradient at u.
double l2p_gradient(const Coefficients& local, const Vec3& u, Vec3& grad);
// d = x - center
double m2p(const Coefficients& multipole, const Vec3& d);

// Dipole moment about the expansion center from the degree-1 coefficients.
Vec3 dipole_of(const Coefficients& multipole);

}  // namespace mahi::fmm
