#include "mahi/fmm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mahi/error.hpp"
#include "mahi/fmm/dipole.hpp"
#include "mahi/fmm/operators.hpp"
#include "mahi/simd/kernels.hpp"
#include "mahi/summation.hpp"

namespace mahi::fmm {

namespace {

// Box offsets o = target - source, components in -3..3, in units of the box.
constexpr int offset_slot(int ox, int oy, int oz) { return (ox + 3) + 7 * ((oy + 3) + 7 * (oz + 3)); }

std::shared_ptr<const std::vector<cplx>> cached_theta(int p) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const std::vector<cplx>>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    const int stride = coeff_count(2 * p);
    auto table = std::make_shared<std::vector<cplx>>(343 * std::size_t(stride));
    for (int oz = -3; oz <= 3; ++oz)
        for (int oy = -3; oy <= 3; ++oy)
            for (int ox = -3; ox <= 3; ++ox) {
                if (std::max({std::abs(ox), std::abs(oy), std::abs(oz)}) < 2) continue;
                irregular_harmonics(Vec3{double(ox), double(oy), double(oz)}, 2 * p,
                                    table->data() + offset_slot(ox, oy, oz) * std::size_t(stride));
            }
    cache.emplace(p, table);
    return table;
}

// child center - parent center, in units of the parent box
Vec3 child_shift(int c) {
    return {(c & 1) ? 0.25 : -0.25, (c & 2) ? 0.25 : -0.25, (c & 4) ? 0.25 : -0.25};
}

int child_index(int side, int box, int c) {
    int x, y, z;
    Octree::coords(side, box, x, y, z);
    return Octree::linear(2 * side, 2 * x + (c & 1), 2 * y + ((c >> 1) & 1), 2 * z + ((c >> 2) & 1));
}

int child_slot(int side, int box) {
    int x, y, z;
    Octree::coords(side, box, x, y, z);
    return (x & 1) | ((y & 1) << 1) | ((z & 1) << 2);
}

int parent_index(int side, int box) {
    int x, y, z;
    Octree::coords(side, box, x, y, z);
    return Octree::linear(side / 2, x >> 1, y >> 1, z >> 1);
}

bool has_data(const Coefficients& c) { return c.size() != 0; }

}  // namespace

int thread_count() {
    if (const char* env = std::getenv("MAHI_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void validate_config(const FmmConfig& c) {
    if (c.order < 0 || c.order > 30) throw InputError("multipole order must be within 0..30");
    if (c.depth < 0 || c.depth > 5) throw InputError("tree depth must be within 0..5");
    if (c.lattice == LatticeMode::shells && c.shell_cap < 1) throw InputError("shell cap must be at least 1");
}

FmmEngine::FmmEngine(std::span<const Vec3> positions, double box_length, const FmmConfig& config)
    : config_((validate_config(config), config)),
      tree_(positions, box_length, config.depth, config.boundary == Boundary::periodic) {
    if (config_.boundary == Boundary::periodic && config_.lattice != LatticeMode::none)
        lattice_ = cached_lattice(config_.order, config_.lattice, config_.shell_cap);
    if (config_.depth >= 1) theta_ = cached_theta(config_.order);
}

Vec3 FmmEngine::center() const {
    const double c = 0.5 * box_length();
    return {c, c, c};
}

Coefficients FmmEngine::far_local(const Coefficients& multipole) const {
    const int p = config_.order;
    const double L = box_length();
    Coefficients out(p);
    if (config_.boundary != Boundary::periodic) return out;
    if (lattice_) {
        Coefficients scaled = multipole;
        scaled.scale_degrees(1.0 / L);
        lattice_->apply(scaled, out);
        out *= 1.0 / L;
        out.scale_degrees(1.0 / L);
    }
    if (config_.dipole_compensation) add_dipole_local(dipole_of(multipole), L, out);
    return out;
}

FmmResult FmmEngine::solve(std::span<const double> charges) const { return run(charges, nullptr, false); }

FmmResult FmmEngine::solve(std::span<const double> charges, std::span<const int> targets, bool gradients) const {
    std::vector<int> t(targets.begin(), targets.end());
    for (int i : t)
        if (i < 0 || std::size_t(i) >= size()) throw InputError("target index out of range");
    return run(charges, &t, gradients);
}

FmmResult FmmEngine::run(std::span<const double> charges, const std::vector<int>* targets, bool gradients) const {
    const std::size_t n = size();
    if (charges.size() != n) throw InputError("charge count does not match particle count");
    const int p = config_.order, d = config_.depth;
    const double L = box_length();
    const bool single = config_.precision == Precision::single_rounded;
    const bool periodic = config_.boundary == Boundary::periodic;
    const int threads = thread_count();
    (void)threads;

    const auto& order = tree_.order();
    std::vector<double> q(n);
    for (std::size_t s = 0; s < n; ++s) q[s] = charges[order[s]];

    // upward pass, scaled: M(n) h^-n at every level
    std::vector<std::vector<Coefficients>> M(d + 1);
    for (int l = 0; l <= d; ++l) M[l].resize(tree_.box_count(l));
    {
        const double h = tree_.box_size(d);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int b = 0; b < tree_.leaf_count(); ++b) {
            const int lo = tree_.leaf_begin(b), hi = tree_.leaf_end(b);
            bool any = false;
            for (int s = lo; s < hi; ++s) any = any || q[s] != 0.0;
            if (!any) continue;
            const Vec3 c = tree_.box_center(d, b);
            std::vector<Vec3> u;
            u.reserve(hi - lo);
            for (int s = lo; s < hi; ++s) u.push_back((tree_.position(s) - c) * (1.0 / h));
            Coefficients m(p);
            p2m(u, std::span<const double>(q.data() + lo, hi - lo), Vec3{}, m);
            if (single) m.round_to_single();
            M[d][b] = std::move(m);
        }
    }
    for (int l = d - 1; l >= 0; --l) {
        const int side = tree_.side(l);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int b = 0; b < tree_.box_count(l); ++b) {
            Coefficients m;
            for (int c = 0; c < 8; ++c) {
                const Coefficients& child = M[l + 1][child_index(side, b, c)];
                if (!has_data(child)) continue;
                if (!has_data(m)) m = Coefficients(p);
                Coefficients tmp = child;
                tmp.scale_degrees(0.5);
                m2m(tmp, child_shift(c), m);
            }
            if (has_data(m) && single) m.round_to_single();
            M[l][b] = std::move(m);
        }
    }

    FmmResult result;
    result.root_multipole = has_data(M[0][0]) ? M[0][0] : Coefficients(p);
    result.root_multipole.scale_degrees(L);
    result.dipole = dipole_of(result.root_multipole);
    if (periodic && config_.dipole_compensation) result.dipole_energy = -dipole_energy(result.dipole, L);

    // which boxes need locals
    std::vector<char> is_target(n, targets ? 0 : 1);
    std::vector<std::vector<char>> needed(d + 1);
    for (int l = 0; l <= d; ++l) needed[l].assign(tree_.box_count(l), targets ? 0 : 1);
    if (targets) {
        for (int i : *targets) {
            const int s = tree_.slot_of()[i];
            is_target[s] = 1;
            int box = tree_.leaf_of_slot(s);
            for (int l = d; l >= 0; --l) {
                needed[l][box] = 1;
                if (l > 0) box = parent_index(tree_.side(l), box);
            }
        }
    }

    // downward pass, scaled: L(k) h^k
    std::vector<std::vector<Coefficients>> Lc(d + 1);
    for (int l = 0; l <= d; ++l) Lc[l].resize(tree_.box_count(l));
    if (periodic && (lattice_ || config_.dipole_compensation) && has_data(M[0][0])) {
        Coefficients root = far_local(result.root_multipole);
        root.scale_degrees(L);
        if (single) root.round_to_single();
        Lc[0][0] = std::move(root);
    }
    const int stride = coeff_count(2 * p);
    for (int l = 1; l <= d; ++l) {
        const int side = tree_.side(l);
        const double inv_h = 1.0 / tree_.box_size(l);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int b = 0; b < tree_.box_count(l); ++b) {
            if (!needed[l][b]) continue;
            Coefficients loc;
            const Coefficients& parent = Lc[l - 1][parent_index(side, b)];
            if (has_data(parent)) {
                loc = Coefficients(p);
                l2l(parent, child_shift(child_slot(side, b)), loc);
                loc.scale_degrees(0.5);
            }
            std::vector<cplx> acc;
            for (const auto& it : tree_.interaction_list(l, b)) {
                const Coefficients& src = M[l][it.source];
                if (!has_data(src)) continue;
                if (acc.empty()) acc.assign(coeff_count(p), cplx(0.0, 0.0));
                simd::m2l_accumulate(src.data(), theta_->data() + offset_slot(it.ox, it.oy, it.oz) * std::size_t(stride),
                                     p, acc.data());
            }
            if (!acc.empty()) {
                if (!has_data(loc)) loc = Coefficients(p);
                for (int k = 0; k <= p; ++k) {
                    const double f = (k % 2 == 0) ? inv_h : -inv_h;
                    for (int m = 0; m <= k; ++m) loc(k, m) += f * acc[cidx(k, m)];
                }
                loc.mirror_from_positive_orders();
            }
            if (has_data(loc) && single) loc.round_to_single();
            Lc[l][b] = std::move(loc);
        }
    }

    // evaluation at target particles
    const auto& xs = tree_.xs();
    const auto& ys = tree_.ys();
    const auto& zs = tree_.zs();
    std::vector<double> near(n, 0.0), far(n, 0.0);
    std::vector<Vec3> grad(gradients ? n : 0);
    const double h = tree_.box_size(d);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int b = 0; b < tree_.leaf_count(); ++b) {
        if (!needed[d][b]) continue;
        const int lo = tree_.leaf_begin(b), hi = tree_.leaf_end(b);
        const Coefficients& loc = Lc[d][b];
        const Vec3 c = tree_.box_center(d, b);
        const auto neigh = tree_.neighbors(b);
        for (int s = lo; s < hi; ++s) {
            if (!is_target[s]) continue;
            const Vec3 x = tree_.position(s);
            Vec3 g{};
            if (has_data(loc)) {
                if (gradients) {
                    far[s] = l2p_gradient(loc, (x - c) * (1.0 / h), g);
                    g *= 1.0 / h;
                } else {
                    far[s] = l2p(loc, (x - c) * (1.0 / h));
                }
            }
            CompensatedSum v;
            for (const auto& nb : neigh) {
                const Vec3 t = x - Vec3{nb.sx * L, nb.sy * L, nb.sz * L};
                const int a = tree_.leaf_begin(nb.box), e = tree_.leaf_end(nb.box);
                const bool self = nb.box == b && nb.sx == 0 && nb.sy == 0 && nb.sz == 0;
                if (self) {
                    v += simd::p2p_potential(t.x, t.y, t.z, &xs[a], &ys[a], &zs[a], &q[a], s - a);
                    v += simd::p2p_potential(t.x, t.y, t.z, &xs[s + 1], &ys[s + 1], &zs[s + 1], &q[s + 1], e - s - 1);
                } else {
                    v += simd::p2p_potential(t.x, t.y, t.z, &xs[a], &ys[a], &zs[a], &q[a], e - a);
                }
                if (gradients) {
                    for (int j = a; j < e; ++j) {
                        if (self && j == s) continue;
                        const Vec3 r = t - tree_.position(j);
                        const double r2 = norm2(r);
                        g -= (q[j] / (r2 * std::sqrt(r2))) * r;
                    }
                }
            }
            near[s] = v.value();
            if (gradients) grad[s] = g;
        }
    }

    result.potential.assign(n, 0.0);
    if (gradients) result.gradient.assign(n, Vec3{});
    CompensatedSum e_near, e_far;
    for (std::size_t s = 0; s < n; ++s) {
        if (!is_target[s]) continue;
        result.potential[order[s]] = near[s] + far[s];
        if (gradients) result.gradient[order[s]] = grad[s];
        e_near += 0.5 * q[s] * near[s];
        e_far += 0.5 * q[s] * far[s];
    }
    if (!targets) {
        result.near_energy = e_near.value();
        result.far_energy = e_far.value();
        CompensatedSum total;
        total += result.near_energy;
        total += result.far_energy;
        result.energy = total.value();
    }
    return result;
}

}  // namespace mahi::fmm
