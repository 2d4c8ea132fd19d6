#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mahi/fmm/engine.hpp"
#include "mahi/generate.hpp"

namespace mahi {

struct SweepSpec {
    int p_min = 1, p_max = 30;
    int d_min = 0, d_max = 3;
    fmm::Precision precision = fmm::Precision::full;
    GeneratorSpec system;        // distribution, forms per site, seed
    std::vector<double> lambda;  // per lambda of every site; empty = 0.345, 0.721, ...
    int repetitions = 1;         // systems with seeds seed, seed+1, ...
    bool dipole_compensation = true;
};

void validate_sweep(const SweepSpec& spec);

struct SweepRow {
    std::string distribution;
    int forms = 0;
    int repetition = 0;
    int p = 0, d = 0;
    std::string precision;
    int site = 0, branch = 0;
    double force = 0.0;      // -dH/dlambda from MAHI
    double reference = 0.0;  // from end-state solves at the same p, d
    double deviation = 0.0;  // (force - reference) / reference
};

// Reference end states: literal solves at d = 0, linear blocks at d >= 1.
std::vector<SweepRow> accuracy_sweep(const SweepSpec& spec);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

enum class ScalingKind { sites, forms, particles };
ScalingKind parse_scaling_kind(const std::string& text);
const char* scaling_kind_name(ScalingKind k);

struct ScalingSpec {
    ScalingKind kind = ScalingKind::sites;
    std::vector<int> values;  // site counts, forms per site, or particle counts
    int background = 10000;   // sites / forms sweeps
    int sites = 8;            // forms sweep
    int forms_per_site = 2;   // sites sweep
    int atoms_per_site = 10;
    int atoms_per_site_particles = 4000;  // particles sweep: one site per this many atoms
    int order = 8;
    int depth = -1;           // -1: fastest measured depth
    int max_depth = 4;
    int repetitions = 5;
    int warmup = 1;
    std::uint64_t seed = 1;
};

struct ScalingRow {
    std::string kind;
    long particles = 0;
    int sites = 0;
    int forms = 0;
    int depth = 0;
    int order = 0;
    int threads = 1;
    double t_baseline = 0.0;     // plain solve, no constant-pH work (s, median)
    double t_solve = 0.0;        // charge-scaled solve
    double t_corrections = 0.0;  // corrections and force assembly
    double overhead = 0.0;       // (t_solve + t_corrections) / t_baseline - 1
};

std::vector<ScalingRow> scaling_bench(const ScalingSpec& spec);
void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows);

// Least-squares line through (x, y); returns slope, intercept and R^2.
struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

}  // namespace mahi
