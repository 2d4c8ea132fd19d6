#pragma once

#include <array>
#include <span>
#include <vector>

#include "mahi/fmm/engine.hpp"
#include "mahi/system.hpp"

namespace mahi::oracle {

// 1/2 sum over image shifts n with |n|_inf <= shell_cap of
// sum' q_i q_j / |r_ij + n L|, omitting i = j at n = 0. Plain loops,
// deliberately independent of the FMM kernels.
double direct_periodic_energy(std::span<const Vec3> positions, std::span<const double> charges, double box_length,
                              int shell_cap);
std::vector<double> direct_periodic_potentials(std::span<const Vec3> positions, std::span<const double> charges,
                                               double box_length, int shell_cap);

inline constexpr int max_end_states = 256;

enum class ReferenceMode {
    // one complete solve per assignment
    full,
    // an environment solve plus one sparse solve per site-form, combined by
    // linearity; energies carry a common unknown constant
    linear_blocks
};

struct EndStateEnergySet {
    std::vector<std::vector<int>> assignments;  // form per site
    std::vector<double> energies;
    bool relative = false;

    // throws if the assignment is missing
    double at(const std::vector<int>& assignment) const;
};

// Every combination of forms, in lexicographic order (site 0 slowest).
std::vector<std::vector<int>> all_assignments(const ParticleSystem& system);

EndStateEnergySet end_state_hamiltonians(const ParticleSystem& system, const fmm::FmmConfig& config,
                                         ReferenceMode mode = ReferenceMode::full);
EndStateEnergySet end_state_hamiltonians(const ParticleSystem& system, const fmm::FmmEngine& engine,
                                         ReferenceMode mode = ReferenceMode::full);

// sum_X (prod_sigma w_sigma(X_sigma)) H_X
double blended_energy(const ParticleSystem& system, const EndStateEnergySet& states, const LambdaState& lambda);

// -dH/dlambda of the blend, [site][k].
std::vector<std::vector<double>> reference_lambda_forces(const ParticleSystem& system,
                                                         const EndStateEnergySet& states, const LambdaState& lambda);

// Closed forms for a single site. Energies labelled by form index, so for
// four forms h[b0 + 2 b1] is H with lambda_0 branch b0 and lambda_1 branch b1.
double two_form_force(double h0, double h1);
std::array<double, 2> four_form_forces(const std::array<double, 4>& h, double lambda0, double lambda1);

struct QiForces {
    std::vector<std::vector<double>> analytic;
    std::vector<std::vector<double>> finite_difference;
};

// -dH~/dlambda of the charge-scaled energy, by the chain rule through the
// potentials and by central differences (step h).
QiForces qi_reference_force(const ParticleSystem& system, const fmm::FmmEngine& engine, const LambdaState& lambda,
                            double h = 1e-6);

// sum_{i != j} dq_i dq_j / r_ij over ordered intra-site pairs, dq = q0 - q1;
// minimum image when periodic.
double k_factor(const TitratableSite& site, std::span<const Vec3> positions, double box_length, bool periodic = true);

}  // namespace mahi::oracle
