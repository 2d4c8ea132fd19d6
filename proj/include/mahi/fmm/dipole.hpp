#pragma once

#include <span>

#include "mahi/fmm/expansion.hpp"
#include "mahi/fmm/lattice.hpp"

namespace mahi::fmm {

// Cube-ordered lattice sums carry a surface term 2 pi |mu|^2 / 3V; removing
// it gives tin-foil (conducting boundary) energies. mu is the box dipole
// about the box center.
double dipole_energy(const Vec3& mu, double box_length);

// Local expansion (about the box center, unscaled) of the compensating
// potential -(4 pi / 3V) mu . (x - c), accumulated into `local`. Its energy
// 1/2 sum q V equals -dipole_energy.
void add_dipole_local(const Vec3& mu, double box_length, Coefficients& local);

// Independent route to the same term: place charges -(s . mu) / 4L on the
// corners s L/2 of every periodic image, which removes each box's dipole.
// Interior corners cancel, so the images up to a (3^(r+1) - 1)/2 cube
// reduce to surface charges (summed directly) and everything beyond is a
// super-cell lattice of spacing 3^r acting on the super-cell's surface
// charges. Returns 1/2 sum_i q_i phi_corner(x_i); positions relative to the
// box origin.
double corner_charge_energy(std::span<const Vec3> positions, std::span<const double> charges, double box_length,
                            const LatticeOperator& lattice, int levels = 1);

}  // namespace mahi::fmm
