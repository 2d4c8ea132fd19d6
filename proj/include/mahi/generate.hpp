#pragma once

#include <cstdint>
#include <string>

#include "mahi/system.hpp"

namespace mahi {

enum class SiteDistribution {
    typical,  // each site's atoms inside a small sphere
    worst     // site atoms anywhere in the box
};

SiteDistribution parse_distribution(const std::string& text);
const char* distribution_name(SiteDistribution d);

struct GeneratorSpec {
    int background = 1000;
    int sites = 1;
    int atoms_per_site = 10;
    int forms_per_site = 2;
    SiteDistribution distribution = SiteDistribution::typical;
    double density = 100.0;        // particles per nm^3, sets the box
    double min_distance = 0.1;     // nm, periodic
    double cluster_radius = 0.25;  // nm
    std::uint64_t seed = 1;
};

// All charges (environment and every form) uniform in [-1, 1). Lambdas
// start at 0.5. Deterministic for a given spec.
SystemBundle generate_random_system(const GeneratorSpec& spec);

// Two atoms `separation` apart whose charges +-charge swap between the two
// forms: mirror-symmetric end states with k = -8 charge^2 / separation.
// Centered in a box of the given length, no environment.
SystemBundle toy_two_form_site(double separation = 0.3, double charge = 0.0734, double box_length = 3.0);

}  // namespace mahi
