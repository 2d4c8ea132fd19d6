#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mahi/vec3.hpp"

namespace mahi {

inline constexpr int max_forms_per_site = 16;

struct TitratableSite {
    std::vector<int> indices;                 // particle indices of the site atoms
    std::vector<std::vector<double>> forms;   // forms[rho][a] is the charge of indices[a] in form rho

    int form_count() const { return static_cast<int>(forms.size()); }
    int lambda_count() const;                 // log2(form_count), -1 if not a power of two
    int atom_count() const { return static_cast<int>(indices.size()); }
};

struct ParticleSystem {
    double box_length = 0.0;
    std::vector<Vec3> positions;
    // Per-particle charge. For environment particles this is the fixed charge;
    // for site atoms it is only a stored value, the forms decide what is used.
    std::vector<double> charges;
    std::vector<TitratableSite> sites;

    std::size_t size() const { return positions.size(); }
    // -1 for environment particles, otherwise the owning site
    std::vector<int> site_of_particle() const;
    int total_form_count() const;
};

struct SiteLambda {
    std::vector<double> values;
    std::vector<double> velocities;
    double mass = 5.0;   // u nm^2
};

struct LambdaState {
    std::vector<SiteLambda> sites;
};

struct SystemBundle {
    ParticleSystem system;
    LambdaState lambda;
};

// Per-site form weights, weights[site][rho].
using SiteWeights = std::vector<std::vector<double>>;

std::vector<double> scale_charges(const ParticleSystem& system, const SiteWeights& weights);
// Charges with one form selected per site.
std::vector<double> assignment_charges(const ParticleSystem& system, const std::vector<int>& forms);
// Environment charges only; site atoms zeroed.
std::vector<double> environment_charges(const ParticleSystem& system);

double wrap_coordinate(double x, double box_length);
void wrap_positions(ParticleSystem& system);

std::vector<std::string> validate_system(const ParticleSystem& system);
std::vector<std::string> validate_lambda(const ParticleSystem& system, const LambdaState& lambda);

// Fresh lambda state: every coordinate at `value`, zero velocity.
LambdaState uniform_lambda(const ParticleSystem& system, double value, double mass = 5.0);

}  // namespace mahi
