#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mahi/error.hpp"
#include "mahi/fmm/engine.hpp"
#include "mahi/generate.hpp"
#include "mahi/oracle.hpp"

using namespace mahi;
using namespace mahi::oracle;

namespace {

fmm::FmmConfig open_config(int p = 10) {
    fmm::FmmConfig c;
    c.order = p;
    c.boundary = fmm::Boundary::open;
    return c;
}

SystemBundle small_system(std::uint64_t seed, int sites, int forms, int background = 60) {
    GeneratorSpec spec;
    spec.background = background;
    spec.sites = sites;
    spec.forms_per_site = forms;
    spec.atoms_per_site = 6;
    spec.seed = seed;
    return generate_random_system(spec);
}

// Least-squares a + b x + c x^2; returns {a, b, c, largest residual}.
std::array<double, 4> quadratic_fit(const std::vector<double>& x, const std::vector<double>& y) {
    double s[5] = {}, t[3] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = 1;
        for (int k = 0; k < 5; ++k, p *= x[i]) s[k] += p;
        t[0] += y[i];
        t[1] += y[i] * x[i];
        t[2] += y[i] * x[i] * x[i];
    }
    double a[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (int k = 0; k < 4; ++k) a[r][k] -= f * a[c][k];
        }
    const double A = a[0][3] / a[0][0], B = a[1][3] / a[1][1], C = a[2][3] / a[2][2];
    double worst = 0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(A + B * x[i] + C * x[i] * x[i] - y[i]));
    return {A, B, C, worst};
}

}  // namespace

TEST_CASE("single pair") {
    const std::vector<Vec3> r = {{1, 1, 1}, {1.5, 1, 1}};
    CHECK(direct_periodic_energy(r, std::vector<double>{1, -1}, 10.0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
    const auto phi = direct_periodic_potentials(r, std::vector<double>{1, -1}, 10.0, 0);
    CHECK(phi[0] == doctest::Approx(-2.0));
    CHECK(phi[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS(direct_periodic_energy(r, std::vector<double>{1, -1}, 10.0, -1), InputError);
}

TEST_CASE("unit shell cap matches the FMM over the same images") {
    const auto b = small_system(1, 1, 2, 100);
    fmm::FmmConfig cfg;
    cfg.lattice = fmm::LatticeMode::none;
    cfg.dipole_compensation = false;
    cfg.order = 4;
    const auto q = assignment_charges(b.system, {0});
    const double fmm_e = fmm::FmmEngine(b.system.positions, b.system.box_length, cfg).solve(q).energy;
    const double ref = direct_periodic_energy(b.system.positions, q, b.system.box_length, 1);
    CHECK(std::abs(fmm_e - ref) <= 1e-13 * std::abs(ref));
}

TEST_CASE("image sums converge monotonically for a dipole-free crystal") {
    const double L = 1.0;
    const std::vector<Vec3> r = {{0.5, 0.5, 0.5}, {0.25, 0.5, 0.5}, {0.75, 0.5, 0.5}};
    const std::vector<double> q = {1.0, -0.5, -0.5};
    double prev = direct_periodic_energy(r, q, L, 0), prev_step = 1e300;
    for (int cap = 1; cap <= 8; ++cap) {
        const double e = direct_periodic_energy(r, q, L, cap);
        const double step = std::abs(e - prev);
        CHECK(step < prev_step);
        prev_step = step;
        prev = e;
    }
    CHECK(prev_step < 1e-3);
}

TEST_CASE("end-state enumeration") {
    const auto one = small_system(2, 1, 2);
    const auto e1 = end_state_hamiltonians(one.system, open_config());
    CHECK(e1.assignments == std::vector<std::vector<int>>{{0}, {1}});
    CHECK(e1.energies.size() == 2);
    CHECK(!e1.relative);

    const auto two = small_system(3, 2, 2);
    const auto e2 = end_state_hamiltonians(two.system, open_config());
    CHECK(e2.assignments == std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    for (std::size_t i = 0; i < 4; ++i) {
        const auto q = assignment_charges(two.system, e2.assignments[i]);
        const double ref = direct_periodic_energy(two.system.positions, q, two.system.box_length, 0);
        CHECK(std::abs(e2.at(e2.assignments[i]) - ref) <= 1e-12 * std::abs(ref));
    }
    CHECK_THROWS_AS(e2.at({2, 0}), InputError);

    const auto many = small_system(4, 9, 2, 10);
    CHECK_THROWS_AS(end_state_hamiltonians(many.system, open_config()), InputError);
}

TEST_CASE("linear blocks reproduce energy differences") {
    const auto b = small_system(5, 2, 4, 200);
    fmm::FmmConfig cfg;
    cfg.order = 12;
    cfg.depth = 1;
    const fmm::FmmEngine engine(b.system.positions, b.system.box_length, cfg);
    const auto full = end_state_hamiltonians(b.system, engine, ReferenceMode::full);
    const auto lin = end_state_hamiltonians(b.system, engine, ReferenceMode::linear_blocks);
    CHECK(lin.relative);
    REQUIRE(full.assignments == lin.assignments);
    const double shift = full.energies[0] - lin.energies[0];
    for (std::size_t i = 0; i < full.energies.size(); ++i)
        CHECK(std::abs(full.energies[i] - lin.energies[i] - shift) <= 1e-9 * std::abs(full.energies[i]));
}

TEST_CASE("two-form reference force") {
    CHECK(two_form_force(-1.7, -1.7) == 0.0);
    CHECK(two_form_force(-3.0, -2.5) == -0.5);
}

TEST_CASE("four-form closed form matches differences of the blend") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-10, 10);
    ParticleSystem sys;
    sys.box_length = 1;
    sys.positions = {{0.1, 0.1, 0.1}};
    sys.charges = {0};
    sys.sites.push_back({{0}, {{0}, {0}, {0}, {0}}});
    for (int t = 0; t < 20; ++t) {
        EndStateEnergySet set;
        set.assignments = {{0}, {1}, {2}, {3}};
        std::array<double, 4> h;
        for (auto& x : h) x = u(rng);
        set.energies.assign(h.begin(), h.end());
        LambdaState l = uniform_lambda(sys, 0.0);
        l.sites[0].values = {0.345, 0.721};
        const auto closed = four_form_forces(h, 0.345, 0.721);
        const auto ref = reference_lambda_forces(sys, set, l);
        for (int k = 0; k < 2; ++k) {
            auto up = l, dn = l;
            const double step = 1e-6;
            up.sites[0].values[k] += step;
            dn.sites[0].values[k] -= step;
            const double fd = -(blended_energy(sys, set, up) - blended_energy(sys, set, dn)) / (2 * step);
            CHECK(std::abs(closed[k] - fd) <= 1e-9 * std::max(1.0, std::abs(fd)));
            CHECK(std::abs(ref[0][k] - closed[k]) <= 1e-13 * std::max(1.0, std::abs(closed[k])));
        }
    }
}

TEST_CASE("k factor") {
    TitratableSite one{{0, 1}, {{0.3, 0.2}, {0.3, -0.1}}};
    const std::vector<Vec3> r = {{1, 1, 1}, {1.15, 1, 1}};
    CHECK(k_factor(one, r, 5.0) == 0.0);
    TitratableSite two{{0, 1}, {{0.4, -0.4}, {0.0, 0.0}}};
    CHECK(k_factor(two, r, 5.0) == doctest::Approx(-2.0 * 0.16 / 0.15).epsilon(1e-14));
    // minimum image across the boundary
    const std::vector<Vec3> wrapped = {{0.05, 1, 1}, {4.9, 1, 1}};
    CHECK(k_factor(two, wrapped, 5.0) == doctest::Approx(-2.0 * 0.16 / 0.15).epsilon(1e-12));
    CHECK(k_factor(two, wrapped, 5.0, false) == doctest::Approx(-2.0 * 0.16 / 4.85).epsilon(1e-12));
    TitratableSite four{{0, 1}, {{0, 0}, {0, 0}, {0, 0}, {0, 0}}};
    CHECK_THROWS_AS(k_factor(four, r, 5.0), InputError);
}

TEST_CASE("QI forces: identical forms, chain rule and finite differences") {
    auto b = small_system(7, 2, 2, 100);
    fmm::FmmConfig cfg;
    cfg.order = 12;
    cfg.depth = 1;
    const fmm::FmmEngine engine(b.system.positions, b.system.box_length, cfg);
    LambdaState l = uniform_lambda(b.system, 0.3);
    const auto qi = qi_reference_force(b.system, engine, l);
    for (std::size_t s = 0; s < 2; ++s)
        CHECK(std::abs(qi.analytic[s][0] - qi.finite_difference[s][0]) <= 1e-6 * std::abs(qi.analytic[s][0]));
    b.system.sites[0].forms[1] = b.system.sites[0].forms[0];
    const fmm::FmmEngine same(b.system.positions, b.system.box_length, cfg);
    CHECK(qi_reference_force(b.system, same, l).analytic[0][0] == 0.0);
}

TEST_CASE("QI equals HI at lambda one half") {
    const auto b = small_system(8, 1, 2, 100);
    for (auto boundary : {fmm::Boundary::open, fmm::Boundary::periodic}) {
        fmm::FmmConfig cfg;
        cfg.order = 16;
        cfg.boundary = boundary;
        const fmm::FmmEngine engine(b.system.positions, b.system.box_length, cfg);
        const LambdaState l = uniform_lambda(b.system, 0.5);
        const double qi = qi_reference_force(b.system, engine, l).analytic[0][0];
        const double hi = reference_lambda_forces(b.system, end_state_hamiltonians(b.system, engine), l)[0][0];
        CHECK(std::abs(qi - hi) <= 1e-11 * std::abs(hi));
    }
}

TEST_CASE("QI minus HI force is linear in lambda with slope k") {
    // Open boundary: no image of the site sees itself, so k is the plain
    // intra-site pair sum.
    for (std::uint64_t seed : {9u, 10u, 11u}) {
        const auto b = small_system(seed, 1, 2, 100);
        const fmm::FmmEngine engine(b.system.positions, b.system.box_length, open_config(12));
        const auto states = end_state_hamiltonians(b.system, engine);
        const double k = k_factor(b.system.sites[0], b.system.positions, b.system.box_length, false);
        std::vector<double> xs, gap;
        for (int i = 0; i <= 10; ++i) {
            const double lam = 0.1 * i;
            LambdaState l = uniform_lambda(b.system, lam);
            const double qi = qi_reference_force(b.system, engine, l).analytic[0][0];
            const double hi = reference_lambda_forces(b.system, states, l)[0][0];
            // forces are -dH/dlambda, so the identity reads with a minus sign
            CHECK(std::abs((qi - hi) + (lam - 0.5) * k) <= 1e-9 * std::abs(k));
            const auto q = scale_charges(b.system, {{1 - lam, lam}});
            xs.push_back(lam);
            gap.push_back(engine.solve(q).energy - blended_energy(b.system, states, l));
        }
        const auto fit = quadratic_fit(xs, gap);
        CHECK(std::abs(fit[2] - k / 2) <= 1e-9 * std::abs(k));
        CHECK(std::abs(fit[1] + k / 2) <= 1e-9 * std::abs(k));
        CHECK(std::abs(fit[0]) <= 1e-9 * std::abs(k));
        CHECK(fit[3] < 1e-10);
    }
}
