#include "mahi/system.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "mahi/error.hpp"

namespace mahi {

int TitratableSite::lambda_count() const {
    const int f = form_count();
    if (f < 2 || (f & (f - 1)) != 0) return -1;
    int l = 0;
    while ((1 << l) < f) ++l;
    return l;
}

std::vector<int> ParticleSystem::site_of_particle() const {
    std::vector<int> owner(size(), -1);
    for (std::size_t s = 0; s < sites.size(); ++s)
        for (int i : sites[s].indices)
            if (i >= 0 && static_cast<std::size_t>(i) < owner.size()) owner[i] = static_cast<int>(s);
    return owner;
}

int ParticleSystem::total_form_count() const {
    int n = 0;
    for (const auto& s : sites) n += s.form_count();
    return n;
}

std::vector<double> scale_charges(const ParticleSystem& system, const SiteWeights& weights) {
    if (weights.size() != system.sites.size())
        throw InputError("scale_charges: expected weights for " + std::to_string(system.sites.size()) + " sites");
    std::vector<double> q = system.charges;
    for (std::size_t s = 0; s < system.sites.size(); ++s) {
        const auto& site = system.sites[s];
        const auto& w = weights[s];
        if (static_cast<int>(w.size()) != site.form_count())
            throw InputError("scale_charges: site " + std::to_string(s) + " has " +
                             std::to_string(site.form_count()) + " forms but " +
                             std::to_string(w.size()) + " weights");
        for (int a = 0; a < site.atom_count(); ++a) {
            double v = 0.0;
            for (int r = 0; r < site.form_count(); ++r) v += w[r] * site.forms[r][a];
            q[site.indices[a]] = v;
        }
    }
    return q;
}

std::vector<double> assignment_charges(const ParticleSystem& system, const std::vector<int>& forms) {
    if (forms.size() != system.sites.size()) throw InputError("assignment_charges: one form per site required");
    std::vector<double> q = system.charges;
    for (std::size_t s = 0; s < system.sites.size(); ++s) {
        const auto& site = system.sites[s];
        if (forms[s] < 0 || forms[s] >= site.form_count()) throw InputError("assignment_charges: form out of range");
        for (int a = 0; a < site.atom_count(); ++a) q[site.indices[a]] = site.forms[forms[s]][a];
    }
    return q;
}

std::vector<double> environment_charges(const ParticleSystem& system) {
    std::vector<double> q = system.charges;
    for (const auto& site : system.sites)
        for (int i : site.indices) q[i] = 0.0;
    return q;
}

double wrap_coordinate(double x, double box_length) {
    if (x >= 0.0 && x < box_length) return x;
    double w = x - box_length * std::floor(x / box_length);
    if (w >= box_length || w < 0.0) w = 0.0;
    return w;
}

void wrap_positions(ParticleSystem& system) {
    for (auto& r : system.positions) {
        r.x = wrap_coordinate(r.x, system.box_length);
        r.y = wrap_coordinate(r.y, system.box_length);
        r.z = wrap_coordinate(r.z, system.box_length);
    }
}

std::vector<std::string> validate_system(const ParticleSystem& system) {
    std::vector<std::string> out;
    auto fail = [&](const std::string& s) { out.push_back(s); };
    const double L = system.box_length;
    if (!(L > 0.0) || !std::isfinite(L)) fail("box length not positive");
    if (system.charges.size() != system.positions.size()) fail("charge count differs from particle count");
    for (std::size_t i = 0; i < system.positions.size(); ++i) {
        const auto& r = system.positions[i];
        if (!std::isfinite(r.x) || !std::isfinite(r.y) || !std::isfinite(r.z)) {
            fail("particle " + std::to_string(i) + ": non-finite position");
        } else if (L > 0.0 && (r.x < 0.0 || r.x >= L || r.y < 0.0 || r.y >= L || r.z < 0.0 || r.z >= L)) {
            fail("particle " + std::to_string(i) + ": position outside box");
        }
        if (i < system.charges.size() && !std::isfinite(system.charges[i]))
            fail("particle " + std::to_string(i) + ": non-finite charge");
    }
    std::vector<int> owner(system.positions.size(), -1);
    for (std::size_t s = 0; s < system.sites.size(); ++s) {
        const auto& site = system.sites[s];
        const std::string tag = "site " + std::to_string(s) + ": ";
        if (site.indices.empty()) fail(tag + "no particles");
        std::set<int> seen;
        for (int i : site.indices) {
            if (i < 0 || static_cast<std::size_t>(i) >= system.positions.size()) {
                fail(tag + "particle index " + std::to_string(i) + " out of range");
                continue;
            }
            if (!seen.insert(i).second) fail(tag + "duplicate particle index " + std::to_string(i));
            if (owner[i] >= 0 && owner[i] != static_cast<int>(s))
                fail(tag + "site overlap with site " + std::to_string(owner[i]) + " at particle " + std::to_string(i));
            owner[i] = static_cast<int>(s);
        }
        const int f = site.form_count();
        if (site.lambda_count() < 0) fail(tag + "form count not a power of two (" + std::to_string(f) + ")");
        else if (f > max_forms_per_site) fail(tag + "more than " + std::to_string(max_forms_per_site) + " forms");
        for (int r = 0; r < f; ++r) {
            if (site.forms[r].size() != site.indices.size())
                fail(tag + "form " + std::to_string(r) + " has " + std::to_string(site.forms[r].size()) +
                     " charges for " + std::to_string(site.indices.size()) + " atoms");
            for (double q : site.forms[r])
                if (!std::isfinite(q)) { fail(tag + "non-finite form charge"); break; }
        }
    }
    return out;
}

std::vector<std::string> validate_lambda(const ParticleSystem& system, const LambdaState& lambda) {
    std::vector<std::string> out;
    if (lambda.sites.size() != system.sites.size()) {
        out.push_back("lambda state has " + std::to_string(lambda.sites.size()) + " entries for " +
                      std::to_string(system.sites.size()) + " sites");
        return out;
    }
    for (std::size_t s = 0; s < lambda.sites.size(); ++s) {
        const auto& l = lambda.sites[s];
        const std::string tag = "lambda " + std::to_string(s) + ": ";
        const int want = system.sites[s].lambda_count();
        if (want >= 0 && static_cast<int>(l.values.size()) != want)
            out.push_back(tag + "expected " + std::to_string(want) + " values");
        if (l.velocities.size() != l.values.size()) out.push_back(tag + "velocity count differs from value count");
        if (!(l.mass > 0.0) || !std::isfinite(l.mass)) out.push_back(tag + "mass not positive");
        for (double v : l.values)
            if (!std::isfinite(v)) { out.push_back(tag + "non-finite value"); break; }
        for (double v : l.velocities)
            if (!std::isfinite(v)) { out.push_back(tag + "non-finite velocity"); break; }
    }
    return out;
}

LambdaState uniform_lambda(const ParticleSystem& system, double value, double mass) {
    LambdaState st;
    for (const auto& site : system.sites) {
        SiteLambda l;
        const int n = std::max(site.lambda_count(), 0);
        l.values.assign(n, value);
        l.velocities.assign(n, 0.0);
        l.mass = mass;
        st.sites.push_back(std::move(l));
    }
    return st;
}

}  // namespace mahi
