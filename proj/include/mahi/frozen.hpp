#pragma once

#include <vector>

#include "mahi/corrections.hpp"

namespace mahi {

// With atoms frozen every quantity MAHI needs is linear or bilinear in the
// form weights, so one environment solve, one solve per site-form and the
// reference-form Gram matrices give exact lambda derivatives in O(F^2) per
// call. Energies are relative (the environment self-energy is dropped).
class FrozenCoordinateCache {
public:
    explicit FrozenCoordinateCache(const MahiSolver& solver);

    std::vector<std::vector<double>> dh_dlambda(const LambdaState& lambda, Mode mode) const;
    double relative_energy(const LambdaState& lambda, Mode mode) const;
    int form_count() const { return int(forms_.size()); }

private:
    struct Form {
        int site, rho;
    };
    std::vector<Form> forms_;
    std::vector<int> first_form_;   // per site, index into forms_
    std::vector<double> env_;       // q_f . V_env
    std::vector<double> gram_;      // q_f . A q_g  (F x F)
    std::vector<std::vector<double>> site_gram_;  // B0 per site, rho x rho
    std::size_t site_count_ = 0;

    std::vector<std::vector<double>> weights(const LambdaState& lambda) const;
    // dH/dw for every form
    std::vector<double> form_derivatives(const std::vector<std::vector<double>>& w, Mode mode) const;
};

}  // namespace mahi
