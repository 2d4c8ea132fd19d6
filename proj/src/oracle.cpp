#include "mahi/oracle.hpp"

#include <cmath>
#include <string>

#include "mahi/error.hpp"
#include "mahi/lambda_algebra.hpp"
#include "mahi/summation.hpp"

namespace mahi::oracle {

std::vector<double> direct_periodic_potentials(std::span<const Vec3> positions, std::span<const double> charges,
                                               double box_length, int shell_cap) {
    if (shell_cap < 0) throw InputError("shell cap must be non-negative");
    const std::size_t n = positions.size();
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        CompensatedSum acc;
        for (int z = -shell_cap; z <= shell_cap; ++z)
            for (int y = -shell_cap; y <= shell_cap; ++y)
                for (int x = -shell_cap; x <= shell_cap; ++x) {
                    const Vec3 shift{x * box_length, y * box_length, z * box_length};
                    const bool home = x == 0 && y == 0 && z == 0;
                    for (std::size_t j = 0; j < n; ++j) {
                        if (home && j == i) continue;
                        acc += charges[j] / norm(positions[i] - positions[j] - shift);
                    }
                }
        phi[i] = acc.value();
    }
    return phi;
}

double direct_periodic_energy(std::span<const Vec3> positions, std::span<const double> charges, double box_length,
                              int shell_cap) {
    const auto phi = direct_periodic_potentials(positions, charges, box_length, shell_cap);
    CompensatedSum e;
    for (std::size_t i = 0; i < phi.size(); ++i) e += 0.5 * charges[i] * phi[i];
    return e.value();
}

double EndStateEnergySet::at(const std::vector<int>& assignment) const {
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == assignment) return energies[i];
    throw InputError("end state missing from the energy set");
}

std::vector<std::vector<int>> all_assignments(const ParticleSystem& system) {
    long total = 1;
    for (const auto& s : system.sites) {
        total *= s.form_count();
        if (total > max_end_states)
            throw InputError("too many end states (limit " + std::to_string(max_end_states) + ")");
    }
    std::vector<std::vector<int>> out;
    std::vector<int> cur(system.sites.size(), 0);
    for (long t = 0; t < total; ++t) {
        out.push_back(cur);
        for (int s = int(cur.size()) - 1; s >= 0; --s) {
            if (++cur[s] < system.sites[s].form_count()) break;
            cur[s] = 0;
        }
    }
    return out;
}

EndStateEnergySet end_state_hamiltonians(const ParticleSystem& system, const fmm::FmmConfig& config,
                                         ReferenceMode mode) {
    fmm::FmmEngine engine(system.positions, system.box_length, config);
    return end_state_hamiltonians(system, engine, mode);
}

EndStateEnergySet end_state_hamiltonians(const ParticleSystem& system, const fmm::FmmEngine& engine,
                                         ReferenceMode mode) {
    EndStateEnergySet set;
    set.assignments = all_assignments(system);
    if (mode == ReferenceMode::full) {
        for (const auto& a : set.assignments) set.energies.push_back(engine.solve(assignment_charges(system, a)).energy);
        return set;
    }
    // H_X = 1/2 e.Ae + sum_s b_sX.(Ae) + 1/2 sum_{s,t} b_sX.(A b_tY); A is
    // symmetric, so everything is needed only at site atoms. The constant
    // first term is dropped.
    set.relative = true;
    std::vector<int> site_atoms;
    for (const auto& s : system.sites) site_atoms.insert(site_atoms.end(), s.indices.begin(), s.indices.end());
    const auto env = engine.solve(environment_charges(system), site_atoms);
    const std::size_t n = system.size();
    struct Basis {
        int site, form;
        std::vector<double> potential;
    };
    std::vector<Basis> basis;
    for (std::size_t s = 0; s < system.sites.size(); ++s) {
        const auto& site = system.sites[s];
        for (int r = 0; r < site.form_count(); ++r) {
            std::vector<double> q(n, 0.0);
            for (int a = 0; a < site.atom_count(); ++a) q[site.indices[a]] = site.forms[r][a];
            basis.push_back({int(s), r, engine.solve(q, site_atoms).potential});
        }
    }
    auto basis_of = [&](int s, int r) -> const Basis& {
        for (const auto& b : basis)
            if (b.site == s && b.form == r) return b;
        throw InputError("missing site-form basis");
    };
    for (const auto& a : set.assignments) {
        CompensatedSum h;
        for (std::size_t s = 0; s < system.sites.size(); ++s) {
            const auto& site = system.sites[s];
            const auto& form = site.forms[a[s]];
            for (int i = 0; i < site.atom_count(); ++i) h += form[i] * env.potential[site.indices[i]];
            for (std::size_t t = 0; t < system.sites.size(); ++t) {
                const auto& vb = basis_of(int(t), a[t]).potential;
                for (int i = 0; i < site.atom_count(); ++i) h += 0.5 * form[i] * vb[site.indices[i]];
            }
        }
        set.energies.push_back(h.value());
    }
    return set;
}

namespace {

std::vector<std::vector<double>> site_weights(const ParticleSystem& system, const LambdaState& lambda) {
    if (lambda.sites.size() != system.sites.size()) throw InputError("lambda state does not match the sites");
    std::vector<std::vector<double>> w;
    for (const auto& s : lambda.sites) w.push_back(expand_weights(s.values));
    return w;
}

}  // namespace

double blended_energy(const ParticleSystem& system, const EndStateEnergySet& states, const LambdaState& lambda) {
    const auto w = site_weights(system, lambda);
    CompensatedSum e;
    for (std::size_t x = 0; x < states.assignments.size(); ++x) {
        double f = 1.0;
        for (std::size_t s = 0; s < w.size(); ++s) f *= w[s][states.assignments[x][s]];
        e += f * states.energies[x];
    }
    return e.value();
}

std::vector<std::vector<double>> reference_lambda_forces(const ParticleSystem& system,
                                                         const EndStateEnergySet& states, const LambdaState& lambda) {
    const auto w = site_weights(system, lambda);
    std::vector<std::vector<double>> out(w.size());
    for (std::size_t s = 0; s < w.size(); ++s) {
        const auto& values = lambda.sites[s].values;
        for (int k = 0; k < int(values.size()); ++k) {
            const auto g = weight_gradient(values, k);
            CompensatedSum f;
            for (std::size_t x = 0; x < states.assignments.size(); ++x) {
                double c = g[states.assignments[x][s]];
                for (std::size_t t = 0; t < w.size(); ++t)
                    if (t != s) c *= w[t][states.assignments[x][t]];
                f += -c * states.energies[x];
            }
            out[s].push_back(f.value());
        }
    }
    return out;
}

double two_form_force(double h0, double h1) { return h0 - h1; }

std::array<double, 2> four_form_forces(const std::array<double, 4>& h, double lambda0, double lambda1) {
    const double h00 = h[0], h10 = h[1], h01 = h[2], h11 = h[3];
    return {(1.0 - lambda1) * h00 + lambda1 * (h10 + h01 - h11) - h10,
            (1.0 - lambda0) * h00 + lambda0 * (h10 + h01 - h11) - h01};
}

QiForces qi_reference_force(const ParticleSystem& system, const fmm::FmmEngine& engine, const LambdaState& lambda,
                            double h) {
    QiForces out;
    const auto w = site_weights(system, lambda);
    const auto phi = engine.solve(scale_charges(system, w)).potential;
    for (std::size_t s = 0; s < system.sites.size(); ++s) {
        const auto& site = system.sites[s];
        const auto& values = lambda.sites[s].values;
        out.analytic.emplace_back();
        out.finite_difference.emplace_back();
        for (int k = 0; k < int(values.size()); ++k) {
            const auto g = weight_gradient(values, k);
            CompensatedSum f;
            for (int a = 0; a < site.atom_count(); ++a) {
                double dq = 0.0;
                for (int r = 0; r < site.form_count(); ++r) dq += g[r] * site.forms[r][a];
                f += -phi[site.indices[a]] * dq;
            }
            out.analytic.back().push_back(f.value());

            auto energy_at = [&](double value) {
                LambdaState shifted = lambda;
                shifted.sites[s].values[k] = value;
                return engine.solve(scale_charges(system, site_weights(system, shifted))).energy;
            };
            const double ep = energy_at(values[k] + h), em = energy_at(values[k] - h);
            out.finite_difference.back().push_back(-(ep - em) / (2.0 * h));
        }
    }
    return out;
}

double k_factor(const TitratableSite& site, std::span<const Vec3> positions, double box_length, bool periodic) {
    if (site.form_count() != 2) throw InputError("k factor needs a two-form site");
    CompensatedSum k;
    for (int i = 0; i < site.atom_count(); ++i)
        for (int j = 0; j < site.atom_count(); ++j) {
            if (i == j) continue;
            Vec3 r = positions[site.indices[i]] - positions[site.indices[j]];
            if (periodic) {
                r.x -= box_length * std::round(r.x / box_length);
                r.y -= box_length * std::round(r.y / box_length);
                r.z -= box_length * std::round(r.z / box_length);
            }
            const double di = site.forms[0][i] - site.forms[1][i];
            const double dj = site.forms[0][j] - site.forms[1][j];
            k += di * dj / norm(r);
        }
    return k.value();
}

}  // namespace mahi::oracle
