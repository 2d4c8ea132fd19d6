#pragma once

#include <span>
#include <vector>

#include "mahi/vec3.hpp"

namespace mahi::fmm {

// A box reached from a leaf through the neighbour or interaction list.
// (sx, sy, sz) is the periodic image shift of the source box in units of
// the simulation box: source positions are r + s * box_length.
struct ImageRef {
    int box;
    int sx, sy, sz;
};

// Interaction-list entry; (ox, oy, oz) = target - source box coordinates
// (unwrapped), so the M2L translation is o * box_size.
struct Interaction {
    int source;
    int ox, oy, oz;
};

// Uniform octree over [0, L)^3. Particles are kept in a canonical order
// (leaf, x, y, z) independent of the input order, which makes every
// reduction bitwise independent of how the input was permuted.
class Octree {
public:
    Octree(std::span<const Vec3> positions, double box_length, int depth, bool periodic);

    int depth() const { return depth_; }
    double box_length() const { return box_length_; }
    bool periodic() const { return periodic_; }
    int side(int level) const { return 1 << level; }
    double box_size(int level) const { return box_length_ / side(level); }
    int box_count(int level) const { return side(level) * side(level) * side(level); }
    int leaf_count() const { return box_count(depth_); }
    std::size_t particle_count() const { return order_.size(); }

    static int linear(int side, int ix, int iy, int iz) { return ix + side * (iy + side * iz); }
    static void coords(int side, int index, int& ix, int& iy, int& iz) {
        ix = index % side;
        iy = (index / side) % side;
        iz = index / (side * side);
    }
    Vec3 box_center(int level, int index) const;
    int leaf_of(const Vec3& r) const;

    // canonical slot -> input index
    const std::vector<int>& order() const { return order_; }
    // input index -> canonical slot
    const std::vector<int>& slot_of() const { return slot_of_; }
    int leaf_begin(int leaf) const { return leaf_begin_[leaf]; }
    int leaf_end(int leaf) const { return leaf_begin_[leaf + 1]; }
    int leaf_of_slot(int slot) const { return leaf_of_slot_[slot]; }

    // coordinates in canonical order
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }
    const std::vector<double>& zs() const { return z_; }
    Vec3 position(int slot) const { return {x_[slot], y_[slot], z_[slot]}; }

    // Self plus adjacent leaves, including periodic images. With depth 0 or 1
    // the same box shows up several times under different shifts.
    std::vector<ImageRef> neighbors(int leaf) const;
    // Children of the parent's neighbours that are not adjacent (189 when periodic).
    std::vector<Interaction> interaction_list(int level, int box) const;

private:
    double box_length_;
    int depth_;
    bool periodic_;
    std::vector<int> order_, slot_of_, leaf_begin_, leaf_of_slot_;
    std::vector<double> x_, y_, z_;
};

}  // namespace mahi::fmm
