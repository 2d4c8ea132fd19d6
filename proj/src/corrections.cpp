#include "mahi/corrections.hpp"

#include <chrono>
#include <string>

#include "mahi/error.hpp"
#include "mahi/fmm/dipole.hpp"
#include "mahi/fmm/operators.hpp"
#include "mahi/lambda_algebra.hpp"
#include "mahi/summation.hpp"

namespace mahi {

const char* mode_name(Mode mode) { return mode == Mode::hi ? "hi" : "qi"; }

Mode parse_mode(const std::string& text) {
    if (text == "hi") return Mode::hi;
    if (text == "qi") return Mode::qi;
    throw InputError("unknown mode '" + text + "' (expected hi or qi)");
}

double c_p2p(std::span<const Vec3> atoms, std::span<const double> form_charges,
             std::span<const double> correction_charges, double box_length, fmm::Boundary boundary) {
    const int reach = boundary == fmm::Boundary::periodic ? 1 : 0;
    const std::size_t n = atoms.size();
    CompensatedSum total;
    for (std::size_t a = 0; a < n; ++a) {
        if (form_charges[a] == 0.0) continue;
        CompensatedSum v;
        for (int z = -reach; z <= reach; ++z)
            for (int y = -reach; y <= reach; ++y)
                for (int x = -reach; x <= reach; ++x) {
                    const Vec3 shift{x * box_length, y * box_length, z * box_length};
                    const bool home = x == 0 && y == 0 && z == 0;
                    for (std::size_t b = 0; b < n; ++b) {
                        if (home && a == b) continue;
                        v += correction_charges[b] / norm(atoms[a] - atoms[b] - shift);
                    }
                }
        total += form_charges[a] * v.value();
    }
    return total.value();
}

namespace {

fmm::Coefficients lattice_local(const fmm::FmmEngine& engine, const fmm::Coefficients& multipole) {
    const int p = engine.config().order;
    const double L = engine.box_length();
    fmm::Coefficients out(p);
    if (!engine.lattice()) return out;
    fmm::Coefficients scaled = multipole;
    scaled.scale_degrees(1.0 / L);
    engine.lattice()->apply(scaled, out);
    out *= 1.0 / L;
    out.scale_degrees(1.0 / L);
    return out;
}

bool same_lambda(const LambdaFingerprint& a, const LambdaState& b) { return a == fingerprint(b); }

}  // namespace

double c_lattice(const fmm::FmmEngine& engine, const fmm::Coefficients& form_multipole,
                 const fmm::Coefficients& correction_multipole) {
    if (form_multipole.order() != engine.config().order || correction_multipole.order() != engine.config().order)
        throw InputError("multipole order does not match the lattice operator");
    return fmm::contract(lattice_local(engine, correction_multipole), form_multipole);
}

double c_dipole(const fmm::FmmEngine& engine, const fmm::Coefficients& form_multipole,
                const fmm::Coefficients& scaled_multipole, const fmm::Coefficients& hat_multipole) {
    if (!engine.config().dipole_compensation || engine.config().boundary != fmm::Boundary::periodic)
        throw InputError("dipole correction requested with dipole compensation disabled");
    fmm::Coefficients local(engine.config().order);
    fmm::add_dipole_local(fmm::dipole_of(scaled_multipole) + fmm::dipole_of(hat_multipole), engine.box_length(),
                          local);
    return 0.5 * fmm::contract(local, form_multipole);
}

LambdaFingerprint fingerprint(const LambdaState& lambda) {
    LambdaFingerprint f;
    for (const auto& s : lambda.sites) f.push_back(s.values);
    return f;
}

MahiSolver::MahiSolver(const ParticleSystem& system, const fmm::FmmConfig& config)
    : system_(system), engine_(system.positions, system.box_length, config) {
    for (const auto& site : system_.sites) {
        std::vector<Vec3> atoms;
        for (int i : site.indices) atoms.push_back(system_.positions[i]);
        site_atoms_.push_back(std::move(atoms));
    }
}

ScaledSolve MahiSolver::solve_scaled(const LambdaState& lambda, bool full) const {
    const auto problems = validate_lambda(system_, lambda);
    if (!problems.empty()) throw InputError(problems.front());
    ScaledSolve out;
    out.lambda = fingerprint(lambda);
    for (const auto& s : lambda.sites) out.weights.push_back(expand_weights(s.values));
    out.charges = scale_charges(system_, out.weights);
    if (full) {
        auto r = engine_.solve(out.charges);
        out.potential = std::move(r.potential);
        out.energy = r.energy;
        out.has_energy = true;
    } else {
        std::vector<int> targets;
        for (const auto& s : system_.sites) targets.insert(targets.end(), s.indices.begin(), s.indices.end());
        out.potential = engine_.solve(out.charges, targets).potential;
    }
    return out;
}

double MahiSolver::site_form(int site, std::span<const double> a, std::span<const double> b) const {
    const auto& atoms = site_atoms_[site];
    const int p = engine_.config().order;
    fmm::Coefficients wa(p), wb(p);
    fmm::p2m(atoms, a, engine_.center(), wa);
    fmm::p2m(atoms, b, engine_.center(), wb);
    CompensatedSum s;
    s += c_p2p(atoms, a, b, system_.box_length, engine_.config().boundary);
    s += fmm::contract(engine_.far_local(wb), wa);
    return s.value();
}

CorrectionSet MahiSolver::corrections(const ScaledSolve& solve) const {
    CorrectionSet out;
    out.lambda = solve.lambda;
    const int p = engine_.config().order;
    const auto& cfg = engine_.config();
    const bool periodic = cfg.boundary == fmm::Boundary::periodic;
    const bool dipole = periodic && cfg.dipole_compensation;
    const Vec3 c = engine_.center();
    for (std::size_t s = 0; s < system_.sites.size(); ++s) {
        const auto& site = system_.sites[s];
        const auto& atoms = site_atoms_[s];
        const int n = site.atom_count();
        std::vector<double> qt(n);
        for (int a = 0; a < n; ++a) qt[a] = solve.charges[site.indices[a]];
        fmm::Coefficients w_scaled(p);
        fmm::p2m(atoms, qt, c, w_scaled);
        out.self_terms.push_back(site_form(int(s), qt, qt));
        std::vector<SiteFormCorrection> forms;
        for (int r = 0; r < site.form_count(); ++r) {
            const auto& qr = site.forms[r];
            std::vector<double> Q(n), Qhat(n);
            for (int a = 0; a < n; ++a) {
                Q[a] = qt[a] - 0.5 * qr[a];
                Qhat[a] = qt[a] - qr[a];
            }
            SiteFormCorrection corr;
            corr.p2p = c_p2p(atoms, qr, Q, system_.box_length, cfg.boundary);
            fmm::Coefficients w_form(p), w_Q(p), w_hat(p);
            fmm::p2m(atoms, qr, c, w_form);
            fmm::p2m(atoms, Q, c, w_Q);
            fmm::p2m(atoms, Qhat, c, w_hat);
            if (engine_.lattice()) corr.lattice = c_lattice(engine_, w_form, w_Q);
            if (dipole) corr.dipole = c_dipole(engine_, w_form, w_scaled, w_hat);
            forms.push_back(corr);
        }
        out.forms.push_back(std::move(forms));
    }
    return out;
}

std::vector<std::vector<double>> assemble_lambda_forces(const ParticleSystem& system, const ScaledSolve& solve,
                                                        const CorrectionSet& corrections, const LambdaState& lambda,
                                                        Mode mode) {
    if (!same_lambda(solve.lambda, lambda) || (mode == Mode::hi && !same_lambda(corrections.lambda, lambda)))
        throw NumericalError("stale solve: lambda changed since the potentials were computed");
    std::vector<std::vector<double>> out;
    for (std::size_t s = 0; s < system.sites.size(); ++s) {
        const auto& site = system.sites[s];
        const auto& values = lambda.sites[s].values;
        const int L = int(values.size());
        // dH/dw_rho for every form
        std::vector<double> g(site.form_count());
        for (int r = 0; r < site.form_count(); ++r) {
            CompensatedSum v;
            for (int a = 0; a < site.atom_count(); ++a) v += solve.potential[site.indices[a]] * site.forms[r][a];
            if (mode == Mode::hi) v += -corrections.forms[s][r].total();
            g[r] = v.value();
        }
        const auto map = branch_index_map(L);
        std::vector<double> dh(L);
        for (int k = 0; k < L; ++k) {
            double K[2];
            for (int b = 0; b < 2; ++b) {
                CompensatedSum acc;
                for (int r : map.forms_using(2 * k + b)) acc += exclusion_product(values, r, k) * g[r];
                K[b] = acc.value();
            }
            dh[k] = K[1] - K[0];
        }
        out.push_back(std::move(dh));
    }
    return out;
}

double hi_energy(const ScaledSolve& solve, const CorrectionSet& corrections) {
    if (!solve.has_energy) throw InputError("HI energy needs a full solve");
    CompensatedSum e;
    e += solve.energy;
    for (std::size_t s = 0; s < corrections.forms.size(); ++s) {
        e += 0.5 * corrections.self_terms[s];
        for (std::size_t r = 0; r < corrections.forms[s].size(); ++r)
            e += -solve.weights[s][r] * corrections.forms[s][r].total();
    }
    return e.value();
}

namespace {

// Gradient of the reference-form potential of charges `a` on one site's
// atoms, evaluated at those atoms.
std::vector<Vec3> site_field(const fmm::FmmEngine& engine, std::span<const Vec3> atoms, std::span<const double> a) {
    const auto& cfg = engine.config();
    const double L = engine.box_length();
    const int reach = cfg.boundary == fmm::Boundary::periodic ? 1 : 0;
    fmm::Coefficients w(cfg.order);
    fmm::p2m(atoms, a, engine.center(), w);
    const auto local = engine.far_local(w);
    std::vector<Vec3> out(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        Vec3 g{};
        fmm::l2p_gradient(local, atoms[i] - engine.center(), g);
        for (int z = -reach; z <= reach; ++z)
            for (int y = -reach; y <= reach; ++y)
                for (int x = -reach; x <= reach; ++x) {
                    const bool home = x == 0 && y == 0 && z == 0;
                    for (std::size_t j = 0; j < atoms.size(); ++j) {
                        if (home && i == j) continue;
                        const Vec3 r = atoms[i] - atoms[j] - Vec3{x * L, y * L, z * L};
                        const double r2 = norm2(r);
                        g -= (a[j] / (r2 * std::sqrt(r2))) * r;
                    }
                }
        out[i] = g;
    }
    return out;
}

}  // namespace

MahiResult hi_energy_and_forces(const MahiSolver& solver, const LambdaState& lambda, Mode mode,
                                const EvaluateOptions& options) {
    using clock = std::chrono::steady_clock;
    MahiResult out;
    out.mode = mode;
    const auto& system = solver.system();
    const auto t0 = clock::now();
    ScaledSolve solve = solver.solve_scaled(lambda, options.energy && !options.spatial_forces);
    std::vector<Vec3> grad;
    if (options.spatial_forces) {
        std::vector<int> all(system.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = int(i);
        grad = solver.engine().solve(solve.charges, all, true).gradient;
        if (options.energy) {
            const auto full = solver.engine().solve(solve.charges);
            solve.potential = full.potential;
            solve.energy = full.energy;
            solve.has_energy = true;
        }
    }
    const auto t1 = clock::now();
    if (mode == Mode::hi) out.corrections = solver.corrections(solve);
    else out.corrections.lambda = solve.lambda;
    out.dh_dlambda = assemble_lambda_forces(system, solve, out.corrections, lambda, mode);
    const auto t2 = clock::now();
    out.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.correction_seconds = std::chrono::duration<double>(t2 - t1).count();
    if (solve.has_energy) {
        out.has_energy = true;
        out.energy = mode == Mode::hi ? hi_energy(solve, out.corrections) : solve.energy;
    }
    if (options.spatial_forces) {
        out.spatial_forces.resize(system.size());
        for (std::size_t i = 0; i < system.size(); ++i) out.spatial_forces[i] = -solve.charges[i] * grad[i];
        if (mode == Mode::hi) {
            for (std::size_t s = 0; s < system.sites.size(); ++s) {
                const auto& site = system.sites[s];
                std::vector<Vec3> atoms;
                for (int i : site.indices) atoms.push_back(system.positions[i]);
                std::vector<double> qt;
                for (int i : site.indices) qt.push_back(solve.charges[i]);
                const auto f_scaled = site_field(solver.engine(), atoms, qt);
                for (int a = 0; a < site.atom_count(); ++a)
                    out.spatial_forces[site.indices[a]] += qt[a] * f_scaled[a];
                for (int r = 0; r < site.form_count(); ++r) {
                    const auto f_form = site_field(solver.engine(), atoms, site.forms[r]);
                    for (int a = 0; a < site.atom_count(); ++a)
                        out.spatial_forces[site.indices[a]] -= solve.weights[s][r] * site.forms[r][a] * f_form[a];
                }
            }
        }
    }
    return out;
}

}  // namespace mahi
