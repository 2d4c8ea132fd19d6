#pragma once

#include <span>
#include <vector>

#include "mahi/fmm/harmonics.hpp"

namespace mahi::fmm {

// Coefficients c(n, m), 0 <= n <= p, -n <= m <= n, stored at cidx(n, m).
class Coefficients {
public:
    Coefficients() = default;
    explicit Coefficients(int order) : p_(order), c_(coeff_count(order)) {}

    int order() const { return p_; }
    std::size_t size() const { return c_.size(); }
    cplx& operator()(int n, int m) { return c_[cidx(n, m)]; }
    const cplx& operator()(int n, int m) const { return c_[cidx(n, m)]; }
    cplx* data() { return c_.data(); }
    const cplx* data() const { return c_.data(); }
    std::span<const cplx> values() const { return c_; }

    void set_zero();
    bool is_zero() const;
    Coefficients& operator+=(const Coefficients& o);
    Coefficients& operator*=(double s);
    // Multiply degree n by s^n.
    void scale_degrees(double s);
    // Largest |c(n,-m) - (-1)^m conj c(n,m)| and |Im c(n,0)|.
    double conjugate_symmetry_defect() const;
    // Rebuild m < 0 from m >= 0.
    void mirror_from_positive_orders();
    void round_to_single();

private:
    int p_ = 0;
    std::vector<cplx> c_;
};

struct MultipoleExpansion {
    Vec3 center;
    Coefficients coeffs;
};

struct LocalExpansion {
    Vec3 center;
    Coefficients coeffs;
};

// sum_{n,m} L(n,m) M(n,m): interaction energy of the charges behind M with
// the potential described by L, both taken about the same center.
double contract(const Coefficients& local, const Coefficients& multipole);

}  // namespace mahi::fmm
