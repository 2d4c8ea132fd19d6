// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mahi/bench.hpp"
#include "mahi/cli.hpp"
#include "mahi/corrections.hpp"
#include "mahi/generate.hpp"
#include "mahi/lambda_algebra.hpp"
#include "mahi/oracle.hpp"

using namespace mahi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

fmm::FmmConfig config(int p, int d, bool dipole = true) {
    fmm::FmmConfig c;
    c.order = p;
    c.depth = d;
    c.dipole_compensation = dipole;
    return c;
}

SystemBundle make_system(std::uint64_t seed, int sites, int forms, SiteDistribution dist, int background) {
    GeneratorSpec spec;
    spec.background = background;
    spec.sites = sites;
    spec.forms_per_site = forms;
    spec.distribution = dist;
    spec.seed = seed;
    return generate_random_system(spec);
}

LambdaState paper_lambda(const ParticleSystem& sys) {
    LambdaState l = uniform_lambda(sys, 0.5);
    for (auto& s : l.sites) {
        if (s.values.size() >= 1) s.values[0] = 0.345;
        if (s.values.size() >= 2) s.values[1] = 0.721;
    }
    return l;
}

std::vector<double> delta_charges(const TitratableSite& site) {
    std::vector<double> dq(site.atom_count());
    for (int a = 0; a < site.atom_count(); ++a) dq[a] = site.forms[0][a] - site.forms[1][a];
    return dq;
}

Outcome depth0_exactness() {
    double worst = 0;
    int count = 0;
    for (auto dist : {SiteDistribution::typical, SiteDistribution::worst})
        for (int forms : {2, 4}) {
            const auto b = make_system(42, 1, forms, dist, 1000);
            const auto l = paper_lambda(b.system);
            for (int p = 1; p <= 30; ++p) {
                MahiSolver solver(b.system, config(p, 0));
                const auto r = hi_energy_and_forces(solver, l, Mode::hi, {false, false});
                const auto st = oracle::end_state_hamiltonians(b.system, solver.engine());
                if (forms == 2) {
                    worst = std::max(worst, rel(-r.dh_dlambda[0][0], oracle::two_form_force(st.at({0}), st.at({1}))));
                    ++count;
                } else {
                    const auto ref = oracle::four_form_forces(
                        {st.at({0}), st.at({1}), st.at({2}), st.at({3})}, 0.345, 0.721);
                    for (int k = 0; k < 2; ++k) worst = std::max(worst, rel(-r.dh_dlambda[0][k], ref[k]));
                    count += 2;
                }
            }
        }
    return {worst <= 1e-12, fmt("worst relative deviation %.2e over %.0f forces (p 1..30, both cases, 2 and 4 forms)",
                                worst, count)};
}

std::vector<SweepRow> sweep(SiteDistribution dist, int forms, int p_min, int p_max) {
    SweepSpec spec;
    spec.p_min = p_min;
    spec.p_max = p_max;
    spec.d_min = 1;
    spec.d_max = 3;
    spec.system.distribution = dist;
    spec.system.forms_per_site = forms;
    spec.system.seed = 42;
    return accuracy_sweep(spec);
}

Outcome p_convergence() {
    double worst8 = 0, worst28 = 0;
    for (int forms : {2, 4})
        for (const auto& r : sweep(SiteDistribution::typical, forms, 8, 30)) {
            worst8 = std::max(worst8, std::abs(r.deviation));
            if (r.p >= 28) worst28 = std::max(worst28, std::abs(r.deviation));
        }
    // worst case: every (forms, d, branch) gains at least four orders from p=4 to p=28
    double least_gain = 1e300;
    for (int forms : {2, 4}) {
        const auto lo = sweep(SiteDistribution::worst, forms, 4, 4);
        const auto hi = sweep(SiteDistribution::worst, forms, 28, 28);
        for (std::size_t i = 0; i < lo.size(); ++i)
            least_gain = std::min(least_gain, std::abs(lo[i].deviation) / std::max(std::abs(hi[i].deviation), 1e-300));
    }
    const bool ok = worst8 <= 1e-6 && worst28 <= 1e-12 && least_gain >= 1e4;
    return {ok, fmt("typical d 1..3: worst %.2e for p>=8, %.2e for p>=28; worst case p4/p28 gain >= %.2e", worst8,
                    worst28, least_gain)};
}

// Least-squares quadratic through (x, y); returns the coefficients and the
// largest residual.
std::pair<std::array<double, 3>, double> fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
    double a[3][4] = {};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double row[3] = {x[i] * x[i], x[i], 1.0};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] += row[r] * row[c];
            a[r][3] += row[r] * y[i];
        }
    }
    for (int c = 0; c < 3; ++c)
        for (int r = c + 1; r < 3; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
        }
    std::array<double, 3> coef{};
    for (int r = 2; r >= 0; --r) {
        double s = a[r][3];
        for (int k = r + 1; k < 3; ++k) s -= a[r][k] * coef[k];
        coef[r] = s / a[r][r];
    }
    double resid = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        resid = std::max(resid, std::abs(y[i] - (coef[0] * x[i] * x[i] + coef[1] * x[i] + coef[2])));
    return {coef, resid};
}

Outcome hi_qi_identity() {
    constexpr int sites = 50;
    const auto b = make_system(7, sites, 2, SiteDistribution::typical, 500);
    const auto& sys = b.system;
    double worst_force = 0;
    for (bool periodic : {false, true}) {
        auto cfg = config(8, 2);
        if (!periodic) cfg.boundary = fmm::Boundary::open;
        MahiSolver solver(sys, cfg);
        std::vector<double> k(sites);
        for (int s = 0; s < sites; ++s) {
            const auto dq = delta_charges(sys.sites[s]);
            k[s] = periodic ? solver.site_form(s, dq, dq)
                            : oracle::k_factor(sys.sites[s], sys.positions, sys.box_length, false);
        }
        for (double lam : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto l = uniform_lambda(sys, lam);
            const auto hi = hi_energy_and_forces(solver, l, Mode::hi, {false, false});
            const auto qi = hi_energy_and_forces(solver, l, Mode::qi, {false, false});
            for (int s = 0; s < sites; ++s) {
                const double gap = qi.dh_dlambda[s][0] - hi.dh_dlambda[s][0];
                worst_force = std::max(worst_force, std::abs(gap - (lam - 0.5) * k[s]) / std::abs(k[s]));
            }
        }
    }

    // energy gap along each site's lambda, the others held at one half
    auto cfg = config(8, 2);
    cfg.boundary = fmm::Boundary::open;
    MahiSolver solver(sys, cfg);
    double worst_resid = 0, worst_curv = 0;
    for (int s = 0; s < sites; ++s) {
        const double k = oracle::k_factor(sys.sites[s], sys.positions, sys.box_length, false);
        std::vector<double> x, y;
        for (int i = 0; i <= 10; ++i) {
            auto l = uniform_lambda(sys, 0.5);
            l.sites[s].values[0] = 0.1 * i;
            x.push_back(0.1 * i);
            y.push_back(hi_energy_and_forces(solver, l, Mode::qi).energy - hi_energy_and_forces(solver, l, Mode::hi).energy);
        }
        const auto [coef, resid] = fit_quadratic(x, y);
        worst_resid = std::max(worst_resid, resid);
        worst_curv = std::max(worst_curv, std::abs(coef[0] - 0.5 * k) / std::abs(k));
        worst_curv = std::max(worst_curv, std::abs(coef[1] + 0.5 * k) / std::abs(k));
    }
    const bool ok = worst_force <= 1e-9 && worst_resid < 1e-10 && worst_curv <= 1e-9;
    return {ok, fmt("force gap vs (lambda-1/2)k: worst %.2e |k|; energy gap fit residual %.2e, "
                    "coefficients vs (k/2)(l^2-l) %.2e |k|",
                    worst_force, worst_resid, worst_curv)};
}

Outcome vertex_consistency() {
    double worst = 0;
    int count = 0;
    for (bool dipole : {true, false})
        for (int sites : {1, 2})
            for (int forms : {2, 4}) {
                const auto b = make_system(60 + sites * 10 + forms, sites, forms, SiteDistribution::typical, 300);
                MahiSolver solver(b.system, config(12, 2, dipole));
                const auto st = oracle::end_state_hamiltonians(b.system, solver.engine());
                for (const auto& x : st.assignments) {
                    LambdaState l = uniform_lambda(b.system, 0.0);
                    for (int s = 0; s < sites; ++s)
                        for (std::size_t k = 0; k < l.sites[s].values.size(); ++k)
                            l.sites[s].values[k] = (x[s] >> k) & 1;
                    worst = std::max(worst, rel(hi_energy_and_forces(solver, l, Mode::hi).energy, st.at(x)));
                    ++count;
                }
            }
    return {worst <= 1e-12, fmt("worst relative deviation %.2e over %.0f vertices (dipole on and off)", worst, count)};
}

Outcome gradient_check() {
    double worst = 0;
    int count = 0;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    for (int n = 0; n < 10; ++n) {
        const int forms = n % 2 ? 4 : 2, sites = 1 + n % 3, depth = n % 3;
        const auto b = make_system(100 + n, sites, forms, n % 4 == 3 ? SiteDistribution::worst : SiteDistribution::typical,
                                   300);
        MahiSolver solver(b.system, config(10, depth));
        LambdaState l = uniform_lambda(b.system, 0.5);
        for (auto& s : l.sites)
            for (auto& v : s.values) v = u(rng);
        const auto r = hi_energy_and_forces(solver, l, Mode::hi, {false, false});
        const double h = 1e-5;
        for (int s = 0; s < sites; ++s)
            for (std::size_t k = 0; k < l.sites[s].values.size(); ++k) {
                auto up = l, dn = l;
                up.sites[s].values[k] += h;
                dn.sites[s].values[k] -= h;
                const double fd =
                    (hi_energy_and_forces(solver, up, Mode::hi).energy - hi_energy_and_forces(solver, dn, Mode::hi).energy) /
                    (2 * h);
                worst = std::max(worst, rel(r.dh_dlambda[s][k], fd));
                ++count;
            }
    }
    return {worst <= 1e-7, fmt("worst relative deviation %.2e over %.0f derivatives on 10 systems", worst, count)};
}

Outcome lambda_algebra() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_sum = 0, worst_grad = 0;
    for (int draw = 0; draw < 10000; ++draw) {
        const int L = 1 + draw % 4;
        std::vector<double> l(L);
        for (auto& x : l) x = u(rng);
        double sum = 0;
        for (double w : expand_weights(l)) sum += w;
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        const double h = 1e-6;
        for (int k = 0; k < L; ++k) {
            auto up = l, dn = l;
            up[k] += h;
            dn[k] -= h;
            const auto g = weight_gradient(l, k), wu = expand_weights(up), wd = expand_weights(dn);
            for (std::size_t r = 0; r < g.size(); ++r)
                worst_grad = std::max(worst_grad, std::abs(g[r] - (wu[r] - wd[r]) / (2 * h)));
        }
    }
    // rows of the three-lambda table: the forms each branch multiplies
    const std::vector<std::set<int>> table = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 4, 5},
                                              {2, 3, 6, 7}, {0, 2, 4, 6}, {1, 3, 5, 7}};
    const auto m = branch_index_map(3);
    int rows_ok = 0;
    for (int row = 0; row < 6; ++row) {
        const auto f = m.forms_using(table_branch_to_branch(3, row));
        if (std::set<int>(f.begin(), f.end()) == table[row]) ++rows_ok;
    }
    const bool ok = worst_sum <= 1e-14 && worst_grad <= 1e-8 && rows_ok == 6;
    return {ok, fmt("partition error %.2e, gradient error %.2e over 1e4 draws; table rows matched %.0f/6", worst_sum,
                    worst_grad, rows_ok)};
}

Outcome complexity_trend() {
    std::vector<double> forms, seconds;
    std::vector<SystemBundle> systems;
    std::vector<std::unique_ptr<MahiSolver>> solvers;
    for (int f = 16; f <= 512; f *= 2) {
        GeneratorSpec g;
        g.sites = f / 2;
        g.background = 100000 - g.sites * g.atoms_per_site;
        g.seed = 5;
        systems.push_back(generate_random_system(g));
        solvers.push_back(std::make_unique<MahiSolver>(systems.back().system, config(8, 3)));
        forms.push_back(f);
    }
    // interleaved rounds so slow spells on a shared machine hit every size alike
    std::vector<std::vector<double>> t(forms.size());
    for (int round = 0; round < 21; ++round)
        for (std::size_t i = 0; i < forms.size(); ++i) {
            const auto r = hi_energy_and_forces(*solvers[i], systems[i].lambda, Mode::hi, {false, false});
            if (round > 0) t[i].push_back(r.correction_seconds);
        }
    for (const auto& v : t) seconds.push_back(median(v));
    const auto fit = fit_line(forms, seconds);
    double worst_ratio = 0;
    for (std::size_t i = 1; i < seconds.size(); ++i) worst_ratio = std::max(worst_ratio, seconds[i] / seconds[i - 1]);
    const bool ok = fit.r2 >= 0.95 && worst_ratio <= 2.5;
    return {ok, fmt("correction time 16..512 forms at N=1e5: R^2 %.4f, worst doubling ratio %.2f, %.2e s at 16, "
                    "%.2e s at 512",
                    fit.r2, worst_ratio, seconds.front(), seconds.back())};
}

Outcome fmm_core() {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double L = 2.0;
    std::vector<Vec3> r(100);
    std::vector<double> q(100);
    double total = 0;
    for (int i = 0; i < 100; ++i) {
        r[i] = {u(rng) * L, u(rng) * L, u(rng) * L};
        q[i] = 2 * u(rng) - 1;
        total += q[i];
    }
    for (auto& x : q) x -= total / 100;

    auto c = config(20, 2, false);
    c.lattice = fmm::LatticeMode::shells;
    c.shell_cap = 4;
    const double shells = rel(fmm::FmmEngine(r, L, c).solve(q).energy, oracle::direct_periodic_energy(r, q, L, 4));

    auto o = config(20, 0, false);
    o.boundary = fmm::Boundary::open;
    o.lattice = fmm::LatticeMode::none;
    const double bare = rel(fmm::FmmEngine(r, L, o).solve(q).energy, oracle::direct_periodic_energy(r, q, L, 0));
    return {shells <= 1e-6 && bare <= 1e-13,
            fmt("p20 d2 shells S=4 vs direct %.2e; depth 0 without lattice vs pair sum %.2e", shells, bare)};
}

struct CliRun {
    int code = 0;
    std::string out;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = cli_main(args, out, err);
    r.out = out.str();
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome kinetics() {
    const auto run = cli({"dynamics", "--mode", "both", "--replicas", "20", "--steps", "250000", "--seed", "2024"});
    if (run.code != 0) return {false, "dynamics run failed"};
    std::map<std::string, std::vector<double>> counts;
    std::istringstream in(run.out);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
        counts[f[1]].push_back(std::stod(f[4]));
    }
    const double hi = median(counts["hi"]), qi = median(counts["qi"]);
    return {counts["hi"].size() == 20 && counts["qi"].size() == 20 && hi > qi,
            fmt("median transitions over 20 replicas x 250000 steps: HI %.1f, QI %.1f", hi, qi)};
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "mahi_acceptance";
    std::filesystem::create_directories(dir);
    auto outputs = [&](const std::string& tag) {
        const auto sys = (dir / ("system_" + tag + ".json")).string();
        const auto sweep_csv = (dir / ("sweep_" + tag + ".csv")).string();
        const auto traj = (dir / ("traj_" + tag + ".csv")).string();
        std::vector<std::string> texts;
        texts.push_back(std::to_string(cli({"gen", "--out", sys, "--seed", "3", "--sites", "2", "--forms", "4"}).code));
        texts.push_back(slurp(sys));
        texts.push_back(cli({"energy", "--system", sys, "--p", "10", "--d", "2"}).out);
        texts.push_back(cli({"lambda-forces", "--system", sys, "--p", "10", "--d", "2"}).out);
        texts.push_back(cli({"compare-hi-qi", "--system", sys, "--p", "10", "--d", "1"}).out);
        cli({"accuracy-sweep", "--p", "1..6", "--d", "0..2", "--background", "300", "--out", sweep_csv});
        texts.push_back(slurp(sweep_csv));
        texts.push_back(
            cli({"dynamics", "--replicas", "4", "--steps", "20000", "--seed", "9", "--trajectory", traj}).out);
        texts.push_back(slurp(traj + ".hi.csv") + slurp(traj + ".qi.csv"));
        std::vector<std::size_t> hashes;
        for (const auto& t : texts) hashes.push_back(std::hash<std::string>{}(t));
        return std::make_pair(hashes, texts);
    };
    const auto a = outputs("a"), b = outputs("b");
    int same = 0, nonempty = 0;
    for (std::size_t i = 0; i < a.first.size(); ++i) {
        same += a.first[i] == b.first[i];
        nonempty += !a.second[i].empty();
    }
    std::filesystem::remove_all(dir);
    const int n = static_cast<int>(a.first.size());
    return {same == n && nonempty == n,
            fmt("%.0f/%.0f output hashes identical across reruns (%.0f non-empty)", same, n, nonempty)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"depth-0 exactness", depth0_exactness},
        {"p-convergence", p_convergence},
        {"HI/QI identity", hi_qi_identity},
        {"vertex consistency", vertex_consistency},
        {"gradient check", gradient_check},
        {"lambda algebra", lambda_algebra},
        {"complexity trend", complexity_trend},
        {"FMM core", fmm_core},
        {"HI/QI kinetics direction", kinetics},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": " << o.detail
                  << " [" << fmt("%.1f", secs) << " s]" << std::endl;
    }
    return failed ? 1 : 0;
}
