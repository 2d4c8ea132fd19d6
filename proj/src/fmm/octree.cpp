#include "mahi/fmm/octree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "mahi/error.hpp"

namespace mahi::fmm {

namespace {

int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }

}  // namespace

Octree::Octree(std::span<const Vec3> positions, double box_length, int depth, bool periodic)
    : box_length_(box_length), depth_(depth), periodic_(periodic) {
    if (depth < 0 || depth > 5) throw InputError("tree depth must be within 0..5");
    if (!(box_length > 0.0)) throw InputError("box length must be positive");
    const int n = static_cast<int>(positions.size());
    std::vector<int> leaf(n);
    for (int i = 0; i < n; ++i) leaf[i] = leaf_of(positions[i]);
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
        const auto& ra = positions[a];
        const auto& rb = positions[b];
        return std::tie(leaf[a], ra.x, ra.y, ra.z) < std::tie(leaf[b], rb.x, rb.y, rb.z);
    });
    slot_of_.resize(n);
    leaf_of_slot_.resize(n);
    x_.resize(n);
    y_.resize(n);
    z_.resize(n);
    leaf_begin_.assign(leaf_count() + 1, 0);
    for (int s = 0; s < n; ++s) {
        const int i = order_[s];
        slot_of_[i] = s;
        leaf_of_slot_[s] = leaf[i];
        x_[s] = positions[i].x;
        y_[s] = positions[i].y;
        z_[s] = positions[i].z;
        ++leaf_begin_[leaf[i] + 1];
    }
    for (int b = 0; b < leaf_count(); ++b) leaf_begin_[b + 1] += leaf_begin_[b];
}

Vec3 Octree::box_center(int level, int index) const {
    int ix, iy, iz;
    coords(side(level), index, ix, iy, iz);
    const double h = box_size(level);
    return {(ix + 0.5) * h, (iy + 0.5) * h, (iz + 0.5) * h};
}

int Octree::leaf_of(const Vec3& r) const {
    const int s = side(depth_);
    const double inv_h = s / box_length_;
    auto cell = [&](double v) { return std::clamp(static_cast<int>(std::floor(v * inv_h)), 0, s - 1); };
    return linear(s, cell(r.x), cell(r.y), cell(r.z));
}

std::vector<ImageRef> Octree::neighbors(int leaf) const {
    const int s = side(depth_);
    int bx, by, bz;
    coords(s, leaf, bx, by, bz);
    std::vector<ImageRef> out;
    out.reserve(27);
    for (int oz = -1; oz <= 1; ++oz)
        for (int oy = -1; oy <= 1; ++oy)
            for (int ox = -1; ox <= 1; ++ox) {
                const int cx = bx + ox, cy = by + oy, cz = bz + oz;
                const int sx = floor_div(cx, s), sy = floor_div(cy, s), sz = floor_div(cz, s);
                if (!periodic_ && (sx != 0 || sy != 0 || sz != 0)) continue;
                out.push_back({linear(s, cx - sx * s, cy - sy * s, cz - sz * s), sx, sy, sz});
            }
    return out;
}

std::vector<Interaction> Octree::interaction_list(int level, int box) const {
    std::vector<Interaction> out;
    if (level < 1) return out;
    const int s = side(level);
    int bx, by, bz;
    coords(s, box, bx, by, bz);
    const int px = bx >> 1, py = by >> 1, pz = bz >> 1;
    out.reserve(189);
    for (int qz = -1; qz <= 1; ++qz)
        for (int qy = -1; qy <= 1; ++qy)
            for (int qx = -1; qx <= 1; ++qx)
                for (int c = 0; c < 8; ++c) {
                    const int cx = 2 * (px + qx) + (c & 1);
                    const int cy = 2 * (py + qy) + ((c >> 1) & 1);
                    const int cz = 2 * (pz + qz) + ((c >> 2) & 1);
                    const int ox = bx - cx, oy = by - cy, oz = bz - cz;
                    if (std::max({std::abs(ox), std::abs(oy), std::abs(oz)}) < 2) continue;
                    const int sx = floor_div(cx, s), sy = floor_div(cy, s), sz = floor_div(cz, s);
                    if (!periodic_ && (sx != 0 || sy != 0 || sz != 0)) continue;
                    out.push_back({linear(s, cx - sx * s, cy - sy * s, cz - sz * s), ox, oy, oz});
                }
    return out;
}

}  // namespace mahi::fmm
