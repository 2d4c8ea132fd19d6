#include "mahi/lambda_algebra.hpp"

#include <string>

#include "mahi/error.hpp"

namespace mahi {

namespace {

void check_count(std::size_t l) {
    if (l < 1 || l > static_cast<std::size_t>(max_lambdas_per_site))
        throw InputError("lambda count " + std::to_string(l) + " outside 1.." + std::to_string(max_lambdas_per_site));
}

}  // namespace

std::vector<double> expand_weights(std::span<const double> lambda) {
    check_count(lambda.size());
    const int L = static_cast<int>(lambda.size());
    std::vector<double> w(std::size_t{1} << L);
    for (int rho = 0; rho < (1 << L); ++rho) {
        double v = 1.0;
        for (int k = 0; k < L; ++k) v *= branch_bit(rho, k) ? lambda[k] : 1.0 - lambda[k];
        w[rho] = v;
    }
    return w;
}

double exclusion_product(std::span<const double> lambda, int form, int k) {
    double v = 1.0;
    for (int i = 0; i < static_cast<int>(lambda.size()); ++i)
        if (i != k) v *= branch_bit(form, i) ? lambda[i] : 1.0 - lambda[i];
    return v;
}

std::vector<double> weight_gradient(std::span<const double> lambda, int k) {
    check_count(lambda.size());
    const int L = static_cast<int>(lambda.size());
    if (k < 0 || k >= L) throw InputError("branch " + std::to_string(k) + " out of range");
    std::vector<double> g(std::size_t{1} << L);
    for (int rho = 0; rho < (1 << L); ++rho) {
        const double f = exclusion_product(lambda, rho, k);
        g[rho] = branch_bit(rho, k) ? f : -f;
    }
    return g;
}

std::vector<int> IndexMap::forms_using(int branch) const {
    const int k = branch / 2;
    const bool bit = (branch % 2) == 1;
    std::vector<int> out;
    for (int rho = 0; rho < form_count(); ++rho)
        if (branch_bit(rho, k) == bit) out.push_back(rho);
    return out;
}

IndexMap branch_index_map(int lambda_count) {
    check_count(static_cast<std::size_t>(lambda_count));
    IndexMap m;
    m.lambda_count = lambda_count;
    for (int k = 0; k < lambda_count; ++k) m.pairs.emplace_back(2 * k, 2 * k + 1);
    for (int rho = 0; rho < (1 << lambda_count); ++rho) {
        std::vector<int> t(lambda_count);
        for (int k = 0; k < lambda_count; ++k) t[k] = 2 * k + (branch_bit(rho, k) ? 1 : 0);
        m.tuples.push_back(std::move(t));
    }
    return m;
}

int table_branch_to_branch(int lambda_count, int table_branch) {
    const int j = table_branch / 2;
    if (j < 0 || j >= lambda_count) throw InputError("table branch out of range");
    return 2 * (lambda_count - 1 - j) + table_branch % 2;
}

}  // namespace mahi
