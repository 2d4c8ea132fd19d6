#pragma once

#include <span>
#include <vector>

#include "mahi/fmm/engine.hpp"
#include "mahi/system.hpp"

namespace mahi {

enum class Mode { hi, qi };

const char* mode_name(Mode mode);
Mode parse_mode(const std::string& text);

// Pairwise part of the reference bilinear form between two charge sets on
// the same site atoms: sum_a a_a sum_b b_b / |r_ab + nL| over images
// |n|_inf <= 1 (periodic) or n = 0 (open), omitting a = b at n = 0.
double c_p2p(std::span<const Vec3> atoms, std::span<const double> form_charges,
             std::span<const double> correction_charges, double box_length, fmm::Boundary boundary);

// omega(form) . Lat(omega(Q)), multipoles about the box center, unscaled.
double c_lattice(const fmm::FmmEngine& engine, const fmm::Coefficients& form_multipole,
                 const fmm::Coefficients& correction_multipole);

// Dipole-compensation share, written with the shared scaled-state factor:
// 1/2 omega(form) . D[omega(q~) + omega(Q^)]. Throws when compensation is off.
double c_dipole(const fmm::FmmEngine& engine, const fmm::Coefficients& form_multipole,
                const fmm::Coefficients& scaled_multipole, const fmm::Coefficients& hat_multipole);

struct SiteFormCorrection {
    double p2p = 0.0;
    double lattice = 0.0;
    double dipole = 0.0;
    double total() const { return p2p + lattice + dipole; }
};

using LambdaFingerprint = std::vector<std::vector<double>>;

LambdaFingerprint fingerprint(const LambdaState& lambda);

// Output of the one charge-scaled solve.
struct ScaledSolve {
    LambdaFingerprint lambda;
    SiteWeights weights;
    std::vector<double> charges;    // q~
    std::vector<double> potential;  // V~, at least at site atoms
    bool has_energy = false;
    double energy = 0.0;            // H~
};

struct CorrectionSet {
    LambdaFingerprint lambda;
    std::vector<std::vector<SiteFormCorrection>> forms;  // [site][rho]
    std::vector<double> self_terms;                      // S_sigma = B0(q~_sigma, q~_sigma)
};

class MahiSolver {
public:
    MahiSolver(const ParticleSystem& system, const fmm::FmmConfig& config);

    const ParticleSystem& system() const { return system_; }
    const fmm::FmmEngine& engine() const { return engine_; }

    // With full = false potentials are only computed at site atoms.
    ScaledSolve solve_scaled(const LambdaState& lambda, bool full) const;
    CorrectionSet corrections(const ScaledSolve& solve) const;
    // Reference bilinear form B0(a, b) for charges on one site's atoms.
    double site_form(int site, std::span<const double> a, std::span<const double> b) const;

private:
    ParticleSystem system_;
    fmm::FmmEngine engine_;
    std::vector<std::vector<Vec3>> site_atoms_;
};

// dH/dlambda, [site][k]. HI applies the corrections; QI uses V~ alone.
// Throws NumericalError when `lambda` is not the state the inputs were
// computed for.
std::vector<std::vector<double>> assemble_lambda_forces(const ParticleSystem& system, const ScaledSolve& solve,
                                                        const CorrectionSet& corrections, const LambdaState& lambda,
                                                        Mode mode);

double hi_energy(const ScaledSolve& solve, const CorrectionSet& corrections);

struct MahiResult {
    Mode mode = Mode::hi;
    bool has_energy = false;
    double energy = 0.0;
    std::vector<std::vector<double>> dh_dlambda;  // [site][k]
    std::vector<Vec3> spatial_forces;             // when requested
    CorrectionSet corrections;
    double solve_seconds = 0.0;
    double correction_seconds = 0.0;
};

struct EvaluateOptions {
    bool energy = true;
    bool spatial_forces = false;
};

MahiResult hi_energy_and_forces(const MahiSolver& solver, const LambdaState& lambda, Mode mode,
                                const EvaluateOptions& options = {});

}  // namespace mahi
