#pragma once

namespace mahi::units {

// kJ mol^-1 nm e^-2; energies stay in e^2/nm until they are reported.
inline constexpr double coulomb_kj_mol = 138.935458;
// kJ mol^-1 K^-1
inline constexpr double boltzmann_kj_mol = 0.0083144626;

inline constexpr double to_kj_mol(double e2_per_nm) { return e2_per_nm * coulomb_kj_mol; }
inline constexpr double from_kj_mol(double kj) { return kj / coulomb_kj_mol; }

}  // namespace mahi::units
