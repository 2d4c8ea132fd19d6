#pragma once

#include <span>
#include <vector>

namespace mahi {

// Form rho = sum_i b_i 2^i, where b_i = 1 means the lambda_i factor is taken
// and b_i = 0 means (1 - lambda_i). lambda_0 is the least significant bit.
inline constexpr int max_lambdas_per_site = 4;

inline bool branch_bit(int form, int k) { return ((form >> k) & 1) != 0; }

std::vector<double> expand_weights(std::span<const double> lambda);
// d(weight_rho)/d(lambda_k)
std::vector<double> weight_gradient(std::span<const double> lambda, int k);
// Product of all branch factors of `form` except the one belonging to lambda_k.
double exclusion_product(std::span<const double> lambda, int form, int k);

struct IndexMap {
    int lambda_count = 0;
    // pairs[k] = {2k, 2k+1}: branch 2k is (1 - lambda_k), branch 2k+1 is lambda_k
    std::vector<std::pair<int, int>> pairs;
    // tuples[rho][k] = branch index selected by form rho for lambda_k
    std::vector<std::vector<int>> tuples;

    int form_count() const { return 1 << lambda_count; }
    // Forms whose weight contains the given branch factor.
    std::vector<int> forms_using(int branch) const;
};

IndexMap branch_index_map(int lambda_count);

// The appendix table labels lambdas with the reverse bit order: its lambda_j
// is lambda_{L-1-j} here. Branch index in the table's labelling -> ours.
int table_branch_to_branch(int lambda_count, int table_branch);

}  // namespace mahi
