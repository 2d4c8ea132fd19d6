#include "mahi/fmm/dipole.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "mahi/error.hpp"
#include "mahi/fmm/operators.hpp"
#include "mahi/summation.hpp"

namespace mahi::fmm {

double dipole_energy(const Vec3& mu, double box_length) {
    const double volume = box_length * box_length * box_length;
    return 2.0 * std::numbers::pi / (3.0 * volume) * dot(mu, mu);
}

void add_dipole_local(const Vec3& mu, double box_length, Coefficients& local) {
    if (local.order() < 1) return;
    const double volume = box_length * box_length * box_length;
    const double K = 4.0 * std::numbers::pi / (3.0 * volume);
    local(1, 0) += -K * mu.z;
    local(1, 1) += cplx(K * mu.x, K * mu.y);
    local(1, -1) += cplx(-K * mu.x, K * mu.y);
}

namespace {

struct VertexCharge {
    Vec3 position;  // relative to the box center
    double charge;
};

// Uncancelled corner charges of the (2K+1)^3 block of boxes centered on the
// origin box. Charges are integer sums of corner signs times the unit
// -mu/4L, so cancelled interior vertices are exactly zero.
std::vector<VertexCharge> surface_vertices(const Vec3& mu, double box_length, int K) {
    std::vector<VertexCharge> out;
    const int w = 2 * K + 1;
    auto adjacent = [&](int c, int* b) {
        // boxes b with |b| <= K touching vertex coordinate c (odd, in half box units)
        int n = 0;
        for (int cand : {(c - 1) / 2, (c + 1) / 2})
            if (cand >= -K && cand <= K) b[n++] = cand;
        return n;
    };
    for (int z = -w; z <= w; z += 2)
        for (int y = -w; y <= w; y += 2)
            for (int x = -w; x <= w; x += 2) {
                if (std::abs(x) != w && std::abs(y) != w && std::abs(z) != w) continue;
                int bx[2], by[2], bz[2];
                const int nx = adjacent(x, bx), ny = adjacent(y, by), nz = adjacent(z, bz);
                long sx = 0, sy = 0, sz = 0;
                for (int i = 0; i < nx; ++i)
                    for (int j = 0; j < ny; ++j)
                        for (int k = 0; k < nz; ++k) {
                            sx += x - 2 * bx[i];
                            sy += y - 2 * by[j];
                            sz += z - 2 * bz[k];
                        }
                if (sx == 0 && sy == 0 && sz == 0) continue;
                const double q = -(sx * mu.x + sy * mu.y + sz * mu.z) / (4.0 * box_length);
                out.push_back({Vec3{x * 0.5 * box_length, y * 0.5 * box_length, z * 0.5 * box_length}, q});
            }
    return out;
}

}  // namespace

double corner_charge_energy(std::span<const Vec3> positions, std::span<const double> charges, double box_length,
                            const LatticeOperator& lattice, int levels) {
    if (levels < 1 || levels > 3) throw InputError("corner-charge levels must be within 1..3");
    const int p = lattice.order();
    const Vec3 c{0.5 * box_length, 0.5 * box_length, 0.5 * box_length};
    Vec3 mu{};
    for (std::size_t i = 0; i < positions.size(); ++i) mu += charges[i] * (positions[i] - c);

    int cell = 1;
    for (int r = 0; r < levels; ++r) cell *= 3;
    const auto direct = surface_vertices(mu, box_length, (3 * cell - 1) / 2);
    const auto super = surface_vertices(mu, box_length, (cell - 1) / 2);

    // super-cell multipole, scaled to the unit box
    Coefficients M(p), L(p);
    std::vector<Vec3> pos;
    std::vector<double> q;
    for (const auto& v : super) {
        pos.push_back(v.position);
        q.push_back(v.charge);
    }
    p2m(pos, q, Vec3{}, M);
    M.scale_degrees(1.0 / box_length);
    lattice.apply(M, L, double(cell));
    L *= 1.0 / box_length;
    L.scale_degrees(1.0 / box_length);

    CompensatedSum energy;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const Vec3 u = positions[i] - c;
        CompensatedSum phi;
        for (const auto& v : direct) phi += v.charge / norm(u - v.position);
        phi += l2p(L, u);
        energy += 0.5 * charges[i] * phi.value();
    }
    return energy.value();
}

}  // namespace mahi::fmm
