#include "mahi/fmm/operators.hpp"

#include <algorithm>
#include <cmath>

#include "mahi/simd/kernels.hpp"

namespace mahi::fmm {

void Coefficients::set_zero() { std::fill(c_.begin(), c_.end(), cplx(0.0, 0.0)); }

bool Coefficients::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const cplx& v) { return v == cplx(0.0, 0.0); });
}

Coefficients& Coefficients::operator+=(const Coefficients& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Coefficients& Coefficients::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

void Coefficients::scale_degrees(double s) {
    double f = 1.0;
    for (int n = 0; n <= p_; ++n, f *= s)
        for (int m = -n; m <= n; ++m) c_[cidx(n, m)] *= f;
}

double Coefficients::conjugate_symmetry_defect() const {
    double worst = 0.0;
    for (int n = 0; n <= p_; ++n) {
        worst = std::max(worst, std::fabs(c_[cidx(n, 0)].imag()));
        double sign = -1.0;
        for (int m = 1; m <= n; ++m, sign = -sign)
            worst = std::max(worst, std::abs(c_[cidx(n, -m)] - sign * std::conj(c_[cidx(n, m)])));
    }
    return worst;
}

void Coefficients::mirror_from_positive_orders() {
    for (int n = 0; n <= p_; ++n) {
        c_[cidx(n, 0)] = cplx(c_[cidx(n, 0)].real(), 0.0);
        double sign = -1.0;
        for (int m = 1; m <= n; ++m, sign = -sign) c_[cidx(n, -m)] = sign * std::conj(c_[cidx(n, m)]);
    }
}

void Coefficients::round_to_single() {
    for (auto& v : c_) v = cplx(static_cast<float>(v.real()), static_cast<float>(v.imag()));
}

double contract(const Coefficients& local, const Coefficients& multipole) {
    const int p = std::min(local.order(), multipole.order());
    double acc = 0.0;
    for (int n = 0; n <= p; ++n) {
        double row = (local(n, 0) * multipole(n, 0)).real();
        for (int m = 1; m <= n; ++m) row += 2.0 * (local(n, m) * multipole(n, m)).real();
        acc += row;
    }
    return acc;
}

void p2m(std::span<const Vec3> positions, std::span<const double> charges, const Vec3& center, Coefficients& out) {
    const int p = out.order();
    std::vector<cplx> R(coeff_count(p));
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (charges[i] == 0.0) continue;
        regular_harmonics(positions[i] - center, p, R.data());
        for (int n = 0; n <= p; ++n)
            for (int m = 0; m <= n; ++m) out(n, m) += charges[i] * std::conj(R[cidx(n, m)]);
    }
    out.mirror_from_positive_orders();
}

void m2m(const Coefficients& child, const Vec3& shift, Coefficients& parent) {
    const int p = parent.order();
    std::vector<cplx> R(coeff_count(p));
    regular_harmonics(shift, p, R.data());
    for (int n = 0; n <= p; ++n) {
        for (int m = 0; m <= n; ++m) {
            cplx acc = 0.0;
            for (int k = 0; k <= n; ++k) {
                const int j = n - k;
                const int lo = std::max(-k, m - j), hi = std::min(k, m + j);
                for (int l = lo; l <= hi; ++l) acc += std::conj(R[cidx(k, l)]) * child(j, m - l);
            }
            parent(n, m) += acc;
        }
    }
    parent.mirror_from_positive_orders();
}

void m2l(const Coefficients& multipole, const Vec3& t, Coefficients& local) {
    const int p = local.order();
    std::vector<cplx> theta(coeff_count(2 * p));
    irregular_harmonics(t, 2 * p, theta.data());
    std::vector<cplx> acc(coeff_count(p));
    simd::m2l_accumulate(multipole.data(), theta.data(), p, acc.data());
    for (int k = 0; k <= p; ++k) {
        const double sk = (k % 2 == 0) ? 1.0 : -1.0;
        for (int l = 0; l <= k; ++l) local(k, l) += sk * acc[cidx(k, l)];
    }
    local.mirror_from_positive_orders();
}

void l2l(const Coefficients& parent, const Vec3& shift, Coefficients& child) {
    const int p = child.order();
    std::vector<cplx> R(coeff_count(p));
    regular_harmonics(shift, p, R.data());
    for (int j = 0; j <= p; ++j) {
        for (int s = 0; s <= j; ++s) {
            cplx acc = 0.0;
            for (int k = j; k <= p; ++k) {
                const int d = k - j;
                const int lo = std::max(-k, s - d), hi = std::min(k, s + d);
                for (int l = lo; l <= hi; ++l) acc += parent(k, l) * std::conj(R[cidx(d, l - s)]);
            }
            child(j, s) += acc;
        }
    }
    child.mirror_from_positive_orders();
}

void p2l(double q, const Vec3& y, const Vec3& center, Coefficients& local) {
    const int p = local.order();
    std::vector<cplx> I(coeff_count(p));
    irregular_harmonics(y - center, p, I.data());
    for (int n = 0; n <= p; ++n)
        for (int m = 0; m <= n; ++m) local(n, m) += q * I[cidx(n, m)];
    local.mirror_from_positive_orders();
}

double l2p(const Coefficients& local, const Vec3& u) {
    const int p = local.order();
    std::vector<cplx> R(coeff_count(p));
    regular_harmonics(u, p, R.data());
    double acc = 0.0;
    for (int n = 0; n <= p; ++n) {
        double row = (local(n, 0) * std::conj(R[cidx(n, 0)])).real();
        for (int m = 1; m <= n; ++m) row += 2.0 * (local(n, m) * std::conj(R[cidx(n, m)])).real();
        acc += row;
    }
    return acc;
}

double l2p_gradient(const Coefficients& local, const Vec3& u, Vec3& grad) {
    const int p = local.order();
    std::vector<cplx> R(coeff_count(p));
    regular_harmonics(u, p, R.data());
    // degree-1 coefficients of the expansion re-centred at u
    cplx d10 = 0.0, d11 = 0.0;
    double phi = 0.0;
    for (int k = 0; k <= p; ++k) {
        for (int l = -k; l <= k; ++l) {
            const cplx c = local(k, l);
            phi += (c * std::conj(R[cidx(k, l)])).real();
            if (k == 0) continue;
            if (std::abs(l) <= k - 1) d10 += c * std::conj(R[cidx(k - 1, l)]);
            if (std::abs(l - 1) <= k - 1) d11 += c * std::conj(R[cidx(k - 1, l - 1)]);
        }
    }
    grad = {-d11.real(), -d11.imag(), d10.real()};
    return phi;
}

double m2p(const Coefficients& multipole, const Vec3& d) {
    const int p = multipole.order();
    std::vector<cplx> I(coeff_count(p));
    irregular_harmonics(d, p, I.data());
    double acc = 0.0;
    for (int n = 0; n <= p; ++n) {
        double row = (multipole(n, 0) * I[cidx(n, 0)]).real();
        for (int m = 1; m <= n; ++m) row += 2.0 * (multipole(n, m) * I[cidx(n, m)]).real();
        acc += row;
    }
    return acc;
}

Vec3 dipole_of(const Coefficients& M) {
    if (M.order() < 1) return {};
    const cplx m11 = M(1, 1);
    return {-2.0 * m11.real(), 2.0 * m11.imag(), M(1, 0).real()};
}

}  // namespace mahi::fmm
