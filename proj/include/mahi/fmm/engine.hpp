#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mahi/fmm/expansion.hpp"
#include "mahi/fmm/lattice.hpp"
#include "mahi/fmm/octree.hpp"

namespace mahi::fmm {

enum class Boundary { periodic, open };
enum class Precision { full, single_rounded };

struct FmmConfig {
    int order = 8;
    int depth = 0;
    Boundary boundary = Boundary::periodic;
    LatticeMode lattice = LatticeMode::renormalized;
    int shell_cap = 4;  // shells mode only
    bool dipole_compensation = true;
    Precision precision = Precision::full;
};

// Throws InputError on out-of-range settings.
void validate_config(const FmmConfig& config);

struct FmmResult {
    // Input order. Only targets are filled when a target set was given.
    std::vector<double> potential;
    std::vector<Vec3> gradient;  // grad of potential, when requested
    // 1/2 sum q V over all particles; only for full solves
    double energy = 0.0;
    double near_energy = 0.0;
    double far_energy = 0.0;
    // the -2 pi |mu|^2 / 3V share of far_energy
    double dipole_energy = 0.0;
    Vec3 dipole;
    Coefficients root_multipole;  // unscaled, about the box center
};

// Worker threads for box loops: MAHI_THREADS, else the OpenMP default.
int thread_count();

// One tree over fixed positions; solves for any number of charge vectors.
// Solves only read shared state and can run concurrently.
class FmmEngine {
public:
    FmmEngine(std::span<const Vec3> positions, double box_length, const FmmConfig& config);

    const FmmConfig& config() const { return config_; }
    const Octree& tree() const { return tree_; }
    double box_length() const { return tree_.box_length(); }
    std::size_t size() const { return tree_.particle_count(); }
    const LatticeOperator* lattice() const { return lattice_.get(); }

    FmmResult solve(std::span<const double> charges) const;
    // Potentials (and gradients) only at `targets` (input indices). Far-field
    // work is restricted to boxes on the targets' paths and to sources with
    // charge, so sparse solves are cheap.
    FmmResult solve(std::span<const double> charges, std::span<const int> targets, bool gradients = false) const;

    // Local expansion about the box center (unscaled) of the far images of a
    // distribution with root multipole `multipole` (unscaled, same center):
    // lattice operator plus dipole compensation, as configured.
    Coefficients far_local(const Coefficients& multipole) const;

    Vec3 center() const;

private:
    FmmResult run(std::span<const double> charges, const std::vector<int>* targets, bool gradients) const;

    FmmConfig config_;
    Octree tree_;
    std::shared_ptr<const LatticeOperator> lattice_;
    std::shared_ptr<const std::vector<cplx>> theta_;
};

}  // namespace mahi::fmm
