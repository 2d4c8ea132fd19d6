#include "mahi/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

#include "mahi/corrections.hpp"
#include "mahi/error.hpp"
#include "mahi/oracle.hpp"

namespace mahi {

namespace {

const char* precision_name(fmm::Precision p) { return p == fmm::Precision::full ? "double" : "single"; }

LambdaState sweep_lambda(const ParticleSystem& system, const std::vector<double>& values) {
    static const double defaults[] = {0.345, 0.721, 0.5, 0.25};
    LambdaState state = uniform_lambda(system, 0.5);
    std::size_t next = 0;
    for (auto& site : state.sites)
        for (std::size_t k = 0; k < site.values.size(); ++k, ++next)
            site.values[k] = next < values.size() ? values[next] : defaults[k % 4];
    return state;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw InputError("line fit needs at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    f.r2 = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

void validate_sweep(const SweepSpec& s) {
    if (s.p_min < 0 || s.p_max > 30 || s.p_min > s.p_max) throw InputError("p range must lie within 0..30");
    if (s.d_min < 0 || s.d_max > 5 || s.d_min > s.d_max) throw InputError("d range must lie within 0..5");
    if (s.repetitions < 1) throw InputError("repetitions must be at least 1");
}

std::vector<SweepRow> accuracy_sweep(const SweepSpec& spec) {
    validate_sweep(spec);
    std::vector<SweepRow> rows;
    for (int rep = 0; rep < spec.repetitions; ++rep) {
        GeneratorSpec gen = spec.system;
        gen.seed = spec.system.seed + rep;
        const auto bundle = generate_random_system(gen);
        const auto lambda = sweep_lambda(bundle.system, spec.lambda);
        for (int d = spec.d_min; d <= spec.d_max; ++d)
            for (int p = spec.p_min; p <= spec.p_max; ++p) {
                fmm::FmmConfig cfg;
                cfg.order = p;
                cfg.depth = d;
                cfg.precision = spec.precision;
                cfg.dipole_compensation = spec.dipole_compensation;
                MahiSolver solver(bundle.system, cfg);
                const auto mahi = hi_energy_and_forces(solver, lambda, Mode::hi, {false, false});
                const auto states = oracle::end_state_hamiltonians(
                    bundle.system, solver.engine(),
                    d == 0 ? oracle::ReferenceMode::full : oracle::ReferenceMode::linear_blocks);
                const auto ref = oracle::reference_lambda_forces(bundle.system, states, lambda);
                for (std::size_t s = 0; s < ref.size(); ++s)
                    for (std::size_t k = 0; k < ref[s].size(); ++k) {
                        SweepRow r;
                        r.distribution = distribution_name(gen.distribution);
                        r.forms = gen.forms_per_site;
                        r.repetition = rep;
                        r.p = p;
                        r.d = d;
                        r.precision = precision_name(spec.precision);
                        r.site = int(s);
                        r.branch = int(k);
                        r.force = -mahi.dh_dlambda[s][k];
                        r.reference = ref[s][k];
                        r.deviation = (r.force - r.reference) / r.reference;
                        rows.push_back(r);
                    }
            }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "case,forms,repetition,p,d,precision,site,branch,force,reference,deviation\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%d,%s,%d,%d,%.17g,%.17g,%.6e\n", r.distribution.c_str(), r.forms,
                      r.repetition, r.p, r.d, r.precision.c_str(), r.site, r.branch, r.force, r.reference,
                      r.deviation);
        out << buf;
    }
}

ScalingKind parse_scaling_kind(const std::string& text) {
    if (text == "sites") return ScalingKind::sites;
    if (text == "forms") return ScalingKind::forms;
    if (text == "particles") return ScalingKind::particles;
    throw InputError("unknown benchmark kind '" + text + "' (expected sites, forms or particles)");
}

const char* scaling_kind_name(ScalingKind k) {
    switch (k) {
    case ScalingKind::sites: return "sites";
    case ScalingKind::forms: return "forms";
    case ScalingKind::particles: return "particles";
    }
    return "?";
}

namespace {

struct Timings {
    double baseline, solve, corrections;
};

Timings time_system(const SystemBundle& bundle, const fmm::FmmConfig& cfg, const ScalingSpec& spec) {
    MahiSolver solver(bundle.system, cfg);
    const auto plain = bundle.system.charges;
    std::vector<double> tb, ts, tc;
    for (int rep = 0; rep < spec.warmup + spec.repetitions; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        const auto base = solver.engine().solve(plain);
        const double b = seconds_since(t0);
        (void)base;
        const auto r = hi_energy_and_forces(solver, bundle.lambda, Mode::hi, {true, false});
        if (rep < spec.warmup) continue;
        tb.push_back(b);
        ts.push_back(r.solve_seconds);
        tc.push_back(r.correction_seconds);
    }
    return {median(tb), median(ts), median(tc)};
}

double time_plain_solve(const SystemBundle& bundle, const fmm::FmmConfig& cfg, int reps) {
    fmm::FmmEngine engine(bundle.system.positions, bundle.system.box_length, cfg);
    std::vector<double> t;
    for (int i = 0; i < reps + 1; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        engine.solve(bundle.system.charges);
        if (i > 0) t.push_back(seconds_since(t0));
    }
    return median(t);
}

}  // namespace

std::vector<ScalingRow> scaling_bench(const ScalingSpec& spec) {
    if (spec.values.empty()) throw InputError("benchmark needs at least one size");
    if (spec.repetitions < 1 || spec.warmup < 0) throw InputError("repetitions must be positive");
    std::vector<ScalingRow> rows;
    for (int v : spec.values) {
        GeneratorSpec gen;
        gen.seed = spec.seed;
        gen.atoms_per_site = spec.atoms_per_site;
        switch (spec.kind) {
        case ScalingKind::sites:
            gen.background = spec.background;
            gen.sites = v;
            gen.forms_per_site = spec.forms_per_site;
            break;
        case ScalingKind::forms:
            gen.background = spec.background;
            gen.sites = spec.sites;
            gen.forms_per_site = v;
            break;
        case ScalingKind::particles:
            gen.sites = std::max(1, v / spec.atoms_per_site_particles);
            gen.background = std::max(0, v - gen.sites * spec.atoms_per_site);
            gen.forms_per_site = spec.forms_per_site;
            break;
        }
        const auto bundle = generate_random_system(gen);
        fmm::FmmConfig cfg;
        cfg.order = spec.order;
        if (spec.depth >= 0) {
            cfg.depth = spec.depth;
        } else {
            // fastest depth for this size; stop once it gets slower
            double best = 1e300;
            for (int d = 0; d <= spec.max_depth; ++d) {
                fmm::FmmConfig trial = cfg;
                trial.depth = d;
                const double t = time_plain_solve(bundle, trial, 1);
                if (t < best) {
                    best = t;
                    cfg.depth = d;
                } else {
                    break;
                }
            }
        }
        const auto t = time_system(bundle, cfg, spec);
        ScalingRow r;
        r.kind = scaling_kind_name(spec.kind);
        r.particles = long(bundle.system.size());
        r.sites = int(bundle.system.sites.size());
        r.forms = bundle.system.total_form_count();
        r.depth = cfg.depth;
        r.order = cfg.order;
        r.threads = fmm::thread_count();
        r.t_baseline = t.baseline;
        r.t_solve = t.solve;
        r.t_corrections = t.corrections;
        r.overhead = t.baseline > 0 ? (t.solve + t.corrections) / t.baseline - 1.0 : 0.0;
        rows.push_back(r);
    }
    return rows;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
    out << "kind,particles,sites,forms,d,p,threads,t_baseline,t_solve,t_corrections,overhead\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%ld,%d,%d,%d,%d,%d,%.6e,%.6e,%.6e,%.4f\n", r.kind.c_str(), r.particles,
                      r.sites, r.forms, r.depth, r.order, r.threads, r.t_baseline, r.t_solve, r.t_corrections,
                      r.overhead);
        out << buf;
    }
}

}  // namespace mahi
