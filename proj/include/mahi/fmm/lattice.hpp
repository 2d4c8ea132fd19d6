#pragma once

#include <memory>
#include <vector>

#include "mahi/fmm/expansion.hpp"

namespace mahi::fmm {

enum class LatticeMode { renormalized, shells, none };

// Far periodic images of a unit box: the sum of M2L translations from every
// image at integer shift s with Chebyshev norm >= 2. Works on scaled
// coefficients (M(n) L^-n in, L(k) L^k out, times 1/L applied by the caller).
//
// The infinite sum is conditionally convergent at low order; the matrix is
// the limit of cube-ordered sums obtained by renormalising with 3x3x3
// super-cells, and the l+j <= 2 block is dropped (its cube-ordered value is
// zero by symmetry; the surface term is handled by dipole compensation).
// In shells mode the sum is cut at Chebyshev norm `shell_cap` with nothing
// dropped, which matches a direct image sum over the same shells.
class LatticeOperator {
public:
    static LatticeOperator renormalized(int order, double tolerance = 1e-14, int max_levels = 200);
    static LatticeOperator shells(int order, int shell_cap);

    int order() const { return p_; }
    LatticeMode mode() const { return mode_; }
    // super-cell levels used (renormalized) or shells summed (shells)
    int levels() const { return levels_; }
    // largest relative change of a degree block in the last iteration
    double residual() const { return residual_; }

    // entry ((k,l), (n,m)); real by cubic symmetry
    double operator()(int k, int l, int n, int m) const { return a_[cidx(k, l) * dim_ + cidx(n, m)]; }

    // out += Lat(in), both scaled and of order(); super-cell scale s applies
    // the operator of a lattice with spacing s (entries times s^-(n+k+1)).
    void apply(const Coefficients& in, Coefficients& out, double super_scale = 1.0) const;

private:
    LatticeOperator(int p, LatticeMode mode);
    void build_sparse();

    int p_;
    int dim_;
    LatticeMode mode_;
    int levels_ = 0;
    double residual_ = 0.0;
    std::vector<double> a_;
    struct Entry {
        int col;
        int degree;  // n + k
        double value;
    };
    std::vector<std::vector<Entry>> rows_;  // rows with l >= 0
};

// Shared, lazily built operators (thread-safe).
std::shared_ptr<const LatticeOperator> cached_lattice(int order, LatticeMode mode, int shell_cap = 0);

}  // namespace mahi::fmm
