#include "mahi/frozen.hpp"

#include "mahi/error.hpp"
#include "mahi/lambda_algebra.hpp"
#include "mahi/summation.hpp"

namespace mahi {

FrozenCoordinateCache::FrozenCoordinateCache(const MahiSolver& solver) {
    const auto& system = solver.system();
    const auto& engine = solver.engine();
    site_count_ = system.sites.size();
    std::vector<int> targets;
    for (const auto& s : system.sites) targets.insert(targets.end(), s.indices.begin(), s.indices.end());
    for (std::size_t s = 0; s < system.sites.size(); ++s) {
        first_form_.push_back(int(forms_.size()));
        for (int r = 0; r < system.sites[s].form_count(); ++r) forms_.push_back({int(s), r});
    }
    const std::size_t F = forms_.size();
    auto dot_form = [&](const Form& f, const std::vector<double>& v) {
        const auto& site = system.sites[f.site];
        CompensatedSum acc;
        for (int a = 0; a < site.atom_count(); ++a) acc += site.forms[f.rho][a] * v[site.indices[a]];
        return acc.value();
    };
    const auto env = engine.solve(environment_charges(system), targets).potential;
    gram_.assign(F * F, 0.0);
    for (std::size_t g = 0; g < F; ++g) {
        const auto& site = system.sites[forms_[g].site];
        std::vector<double> q(system.size(), 0.0);
        for (int a = 0; a < site.atom_count(); ++a) q[site.indices[a]] = site.forms[forms_[g].rho][a];
        const auto v = engine.solve(q, targets).potential;
        for (std::size_t f = 0; f < F; ++f) gram_[f * F + g] = dot_form(forms_[f], v);
    }
    for (const auto& f : forms_) env_.push_back(dot_form(f, env));
    for (std::size_t s = 0; s < system.sites.size(); ++s) {
        const auto& site = system.sites[s];
        const int n = site.form_count();
        std::vector<double> b(std::size_t(n) * n);
        for (int r = 0; r < n; ++r)
            for (int t = 0; t < n; ++t) b[r * n + t] = solver.site_form(int(s), site.forms[r], site.forms[t]);
        site_gram_.push_back(std::move(b));
    }
}

std::vector<std::vector<double>> FrozenCoordinateCache::weights(const LambdaState& lambda) const {
    if (lambda.sites.size() != site_count_) throw InputError("lambda state does not match the cached sites");
    std::vector<std::vector<double>> w;
    for (const auto& s : lambda.sites) w.push_back(expand_weights(s.values));
    return w;
}

std::vector<double> FrozenCoordinateCache::form_derivatives(const std::vector<std::vector<double>>& w,
                                                           Mode mode) const {
    const std::size_t F = forms_.size();
    std::vector<double> flat(F);
    for (std::size_t f = 0; f < F; ++f) flat[f] = w[forms_[f].site][forms_[f].rho];
    std::vector<double> g(F);
    for (std::size_t f = 0; f < F; ++f) {
        CompensatedSum v;
        v += env_[f];
        for (std::size_t h = 0; h < F; ++h) v += gram_[f * F + h] * flat[h];
        if (mode == Mode::hi) {
            // C = B0(q_rho, q~ - q_rho / 2)
            const int s = forms_[f].site, r = forms_[f].rho;
            const int n = int(w[s].size());
            const auto& b = site_gram_[s];
            for (int t = 0; t < n; ++t) v += -b[r * n + t] * w[s][t];
            v += 0.5 * b[r * n + r];
        }
        g[f] = v.value();
    }
    return g;
}

std::vector<std::vector<double>> FrozenCoordinateCache::dh_dlambda(const LambdaState& lambda, Mode mode) const {
    const auto w = weights(lambda);
    const auto g = form_derivatives(w, mode);
    std::vector<std::vector<double>> out;
    for (std::size_t s = 0; s < site_count_; ++s) {
        const auto& values = lambda.sites[s].values;
        std::vector<double> dh;
        for (int k = 0; k < int(values.size()); ++k) {
            const auto dw = weight_gradient(values, k);
            CompensatedSum acc;
            for (std::size_t r = 0; r < dw.size(); ++r) acc += dw[r] * g[first_form_[s] + r];
            dh.push_back(acc.value());
        }
        out.push_back(std::move(dh));
    }
    return out;
}

double FrozenCoordinateCache::relative_energy(const LambdaState& lambda, Mode mode) const {
    const auto w = weights(lambda);
    const std::size_t F = forms_.size();
    std::vector<double> flat(F);
    for (std::size_t f = 0; f < F; ++f) flat[f] = w[forms_[f].site][forms_[f].rho];
    CompensatedSum e;
    for (std::size_t f = 0; f < F; ++f) {
        e += flat[f] * env_[f];
        for (std::size_t h = 0; h < F; ++h) e += 0.5 * flat[f] * gram_[f * F + h] * flat[h];
    }
    if (mode == Mode::hi) {
        // the charge-scaled intra-site term is swapped for the blend of pure forms
        for (std::size_t s = 0; s < site_count_; ++s) {
            const int n = int(w[s].size());
            const auto& b = site_gram_[s];
            for (int r = 0; r < n; ++r) {
                e += 0.5 * w[s][r] * b[r * n + r];
                for (int t = 0; t < n; ++t) e += -0.5 * w[s][r] * b[r * n + t] * w[s][t];
            }
        }
    }
    return e.value();
}

}  // namespace mahi
