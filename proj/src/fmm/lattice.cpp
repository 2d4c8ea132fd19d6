#include "mahi/fmm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "mahi/error.hpp"

namespace mahi::fmm {

namespace {

// sum of I(s) over integer shifts with lo <= |s|_inf <= hi, real parts
std::vector<double> irregular_shell_sum(int order, int lo, int hi) {
    std::vector<cplx> I(coeff_count(order));
    std::vector<double> acc(coeff_count(order), 0.0);
    for (int z = -hi; z <= hi; ++z)
        for (int y = -hi; y <= hi; ++y)
            for (int x = -hi; x <= hi; ++x) {
                if (std::max({std::abs(x), std::abs(y), std::abs(z)}) < lo) continue;
                irregular_harmonics(Vec3{double(x), double(y), double(z)}, order, I.data());
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += I[i].real();
            }
    return acc;
}

}  // namespace

LatticeOperator::LatticeOperator(int p, LatticeMode mode)
    : p_(p), dim_(coeff_count(p)), mode_(mode), a_(std::size_t(dim_) * dim_, 0.0) {
    if (p < 0 || p > 30) throw InputError("multipole order must be within 0..30");
}

LatticeOperator LatticeOperator::shells(int order, int shell_cap) {
    if (shell_cap < 1) throw InputError("shell cap must be at least 1");
    LatticeOperator op(order, LatticeMode::shells);
    op.levels_ = shell_cap;
    if (shell_cap >= 2) {
        const auto G = irregular_shell_sum(2 * order, 2, shell_cap);
        for (int k = 0; k <= order; ++k)
            for (int l = -k; l <= k; ++l)
                for (int n = 0; n <= order; ++n)
                    for (int m = -n; m <= n; ++m) {
                        if (std::abs(m + l) > n + k) continue;
                        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                        op.a_[cidx(k, l) * op.dim_ + cidx(n, m)] = sign * G[cidx(n + k, m + l)];
                    }
    }
    op.build_sparse();
    return op;
}

LatticeOperator LatticeOperator::renormalized(int order, double tolerance, int max_levels) {
    LatticeOperator op(order, LatticeMode::renormalized);
    const int p = order, dim = op.dim_;
    // Near-but-not-adjacent images (2 <= |s| <= 4) plus everything beyond,
    // which is the same lattice one level up: super-cells of 27 boxes at
    // 3u, |u| >= 2, whose multipole is H applied to the box multipole.
    const auto G = irregular_shell_sum(2 * p, 2, 4);
    std::vector<double> H(coeff_count(p), 0.0);
    {
        std::vector<cplx> R(coeff_count(p));
        for (int z = -1; z <= 1; ++z)
            for (int y = -1; y <= 1; ++y)
                for (int x = -1; x <= 1; ++x) {
                    regular_harmonics(Vec3{double(x), double(y), double(z)}, p, R.data());
                    for (std::size_t i = 0; i < H.size(); ++i) H[i] += R[i].real();
                }
    }
    std::vector<double> A0(std::size_t(dim) * dim, 0.0);
    for (int k = 0; k <= p; ++k)
        for (int l = -k; l <= k; ++l)
            for (int n = 0; n <= p; ++n)
                for (int m = -n; m <= n; ++m) {
                    if (std::abs(m + l) > n + k) continue;
                    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                    A0[cidx(k, l) * dim + cidx(n, m)] = sign * G[cidx(n + k, m + l)];
                }

    std::vector<double> pow3(2 * p + 2);
    for (int i = 0; i < int(pow3.size()); ++i) pow3[i] = std::pow(3.0, -i);
    std::vector<int> degree(dim);
    for (int n = 0; n <= p; ++n)
        for (int m = -n; m <= n; ++m) degree[cidx(n, m)] = n;

    std::vector<double> cur = A0, next(A0.size());
    int level = 0;
    double residual = INFINITY;
    while (level < max_levels) {
        ++level;
        // next = A0 + (D3 . cur) S0 with S0[(n',m'),(n,m)] = H(n'-n, m'-m)
        next = A0;
        for (int r = 0; r < dim; ++r) {
            const int k = degree[r];
            const double* row = &cur[std::size_t(r) * dim];
            double* out = &next[std::size_t(r) * dim];
            for (int np = 0; np <= p; ++np) {
                const double d3 = pow3[np + k + 1];
                for (int mp = -np; mp <= np; ++mp) {
                    const double v = row[cidx(np, mp)];
                    if (v == 0.0) continue;
                    const double dv = d3 * v;
                    for (int n = np; n >= 0; n -= 2) {
                        const int j = np - n;
                        for (int m = std::max(-n, mp - j); m <= std::min(n, mp + j); ++m) {
                            const double h = H[cidx(j, mp - m)];
                            if (h != 0.0) out[cidx(n, m)] += dv * h;
                        }
                    }
                }
            }
        }
        // relative change per (k, n) block: entries grow factorially with
        // degree, so a global norm would hide the low orders
        std::vector<double> diff((p + 1) * (p + 1), 0.0), scale((p + 1) * (p + 1), 0.0);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) {
                const std::size_t i = std::size_t(r) * dim + c;
                const int b = degree[r] * (p + 1) + degree[c];
                diff[b] = std::max(diff[b], std::fabs(next[i] - cur[i]));
                scale[b] = std::max(scale[b], std::fabs(next[i]));
            }
        residual = 0.0;
        for (int b = 0; b < int(diff.size()); ++b) {
            const int k = b / (p + 1), n = b % (p + 1);
            if (k + n <= 2 || scale[b] == 0.0) continue;
            residual = std::max(residual, diff[b] / scale[b]);
        }
        cur.swap(next);
        if (residual <= tolerance) break;
    }
    op.levels_ = level;
    op.residual_ = residual;
    if (!(residual <= tolerance)) {
        std::ostringstream msg;
        msg << "lattice operator did not converge after " << level << " levels (residual " << residual << ")";
        throw NumericalError(msg.str());
    }
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            double& v = op.a_[std::size_t(r) * dim + c];
            if (degree[r] + degree[c] <= 2)
                v = 0.0;
            else
                v = 0.5 * (cur[std::size_t(r) * dim + c] + cur[std::size_t(c) * dim + r]);
        }
    op.build_sparse();
    return op;
}

void LatticeOperator::build_sparse() {
    rows_.assign(dim_, {});
    for (int k = 0; k <= p_; ++k)
        for (int l = 0; l <= k; ++l) {
            const int r = cidx(k, l);
            for (int n = 0; n <= p_; ++n)
                for (int m = -n; m <= n; ++m) {
                    const double v = a_[std::size_t(r) * dim_ + cidx(n, m)];
                    if (v != 0.0) rows_[r].push_back({cidx(n, m), n + k, v});
                }
        }
}

void LatticeOperator::apply(const Coefficients& in, Coefficients& out, double super_scale) const {
    if (in.order() != p_ || out.order() != p_) throw InputError("lattice operator order mismatch");
    std::vector<double> f(2 * p_ + 2, 1.0);
    for (int i = 0; i < int(f.size()); ++i) f[i] = std::pow(super_scale, -i);
    const cplx* src = in.data();
    for (int k = 0; k <= p_; ++k)
        for (int l = 0; l <= k; ++l) {
            cplx acc = 0.0;
            for (const auto& e : rows_[cidx(k, l)]) acc += (e.value * f[e.degree + 1]) * src[e.col];
            out(k, l) += acc;
        }
    out.mirror_from_positive_orders();
}

std::shared_ptr<const LatticeOperator> cached_lattice(int order, LatticeMode mode, int shell_cap) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<const LatticeOperator>> cache;
    if (mode == LatticeMode::none) return nullptr;
    const auto key = std::make_tuple(order, int(mode), mode == LatticeMode::shells ? shell_cap : 0);
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto op = std::make_shared<const LatticeOperator>(mode == LatticeMode::shells
                                                          ? LatticeOperator::shells(order, shell_cap)
                                                          : LatticeOperator::renormalized(order));
    cache.emplace(key, op);
    return op;
}

}  // namespace mahi::fmm
