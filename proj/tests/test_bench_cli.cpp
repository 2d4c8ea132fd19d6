#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mahi/bench.hpp"
#include "mahi/cli.hpp"
#include "mahi/error.hpp"
#include "mahi/generate.hpp"
#include "mahi/system_io.hpp"

using namespace mahi;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

double min_image(const Vec3& a, const Vec3& b, double L) {
    Vec3 d = a - b;
    for (double* c : {&d.x, &d.y, &d.z}) *c -= L * std::round(*c / L);
    return norm(d);
}

const std::string system_path = "test_bench_cli_system.json";

void write_test_system() {
    GeneratorSpec spec;
    spec.background = 300;
    spec.seed = 3;
    save_system(system_path, generate_random_system(spec));
}

}  // namespace

TEST_CASE("generator sizes and layouts") {
    GeneratorSpec spec;
    const auto b = generate_random_system(spec);
    CHECK(b.system.size() == 1010);
    REQUIRE(b.system.sites.size() == 1);
    CHECK(b.system.sites[0].atom_count() == 10);
    CHECK(b.system.sites[0].form_count() == 2);
    CHECK(b.system.box_length == doctest::Approx(std::cbrt(1010 / 100.0)).epsilon(1e-12));
    const auto& idx = b.system.sites[0].indices;
    double widest = 0;
    for (int i : idx)
        for (int j : idx) widest = std::max(widest, min_image(b.system.positions[i], b.system.positions[j], b.system.box_length));
    CHECK(widest <= 0.5);
    for (std::size_t i = 0; i < b.system.size(); ++i)
        for (std::size_t j = i + 1; j < b.system.size(); ++j)
            CHECK(min_image(b.system.positions[i], b.system.positions[j], b.system.box_length) >= spec.min_distance);
    for (double q : b.system.charges) CHECK((q >= -1.0 && q < 1.0));

    spec.distribution = SiteDistribution::worst;
    const auto w = generate_random_system(spec);
    double spread = 0;
    for (int i : w.system.sites[0].indices)
        for (int j : w.system.sites[0].indices)
            spread = std::max(spread, min_image(w.system.positions[i], w.system.positions[j], w.system.box_length));
    CHECK(spread > 0.5);

    CHECK(parse_distribution("worst-case") == SiteDistribution::worst);
    CHECK_THROWS_AS(parse_distribution("best"), InputError);
}

TEST_CASE("generator is deterministic") {
    GeneratorSpec spec;
    spec.seed = 17;
    CHECK(dump_system(generate_random_system(spec)) == dump_system(generate_random_system(spec)));
    spec.seed = 18;
    GeneratorSpec other;
    other.seed = 17;
    CHECK(dump_system(generate_random_system(spec)) != dump_system(generate_random_system(other)));
}

TEST_CASE("list parsing") {
    CHECK(parse_int_list("1..4") == std::vector<int>{1, 2, 3, 4});
    CHECK(parse_int_list("3") == std::vector<int>{3});
    CHECK(parse_int_list("1,4,16") == std::vector<int>{1, 4, 16});
    CHECK(parse_int_list("0..1,5") == std::vector<int>{0, 1, 5});
    CHECK_THROWS_AS(parse_int_list("4..1"), InputError);
    CHECK_THROWS_AS(parse_int_list("x"), InputError);
    CHECK_THROWS_AS(parse_int_list("1.5"), InputError);
    CHECK(parse_double_list("0.1,0.5") == std::vector<double>{0.1, 0.5});
    CHECK_THROWS_AS(parse_double_list("0.1,nan"), InputError);
}

TEST_CASE("line fit and median") {
    const auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(fit_line({1, 2, 3}, {1, 3, 2}).r2 < 0.5);
    CHECK_THROWS_AS(fit_line({1}, {1}), InputError);
    CHECK(median({5, 1, 3}) == 3.0);
    CHECK(median({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("accuracy sweep rows") {
    SweepSpec spec;
    spec.p_min = 2;
    spec.p_max = 6;
    spec.d_min = 0;
    spec.d_max = 1;
    spec.system.background = 300;
    const auto rows = accuracy_sweep(spec);
    CHECK(rows.size() == 10);
    for (const auto& r : rows) {
        CHECK(r.deviation == doctest::Approx((r.force - r.reference) / r.reference));
        if (r.d == 0) CHECK(std::abs(r.deviation) <= 1e-12);
    }
    std::ostringstream a, b;
    write_sweep_csv(a, rows);
    write_sweep_csv(b, accuracy_sweep(spec));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("case,forms,repetition,p,d,precision,site,branch,force,reference,deviation\n", 0) == 0);
    spec.p_max = 31;
    CHECK_THROWS_AS(accuracy_sweep(spec), InputError);
    spec.p_max = 4;
    spec.repetitions = 0;
    CHECK_THROWS_AS(accuracy_sweep(spec), InputError);
}

TEST_CASE("scaling benchmark rows") {
    ScalingSpec spec;
    spec.kind = ScalingKind::particles;
    spec.values = {4000, 8000};
    spec.order = 4;
    spec.max_depth = 2;
    const auto rows = scaling_bench(spec);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sites == 1);
    CHECK(rows[1].sites == 2);
    CHECK(rows[1].particles == 8000);
    for (const auto& r : rows) {
        CHECK(r.t_baseline > 0);
        CHECK(r.t_solve > 0);
        CHECK(r.t_corrections > 0);
        CHECK(r.depth >= 0);
        CHECK(r.depth <= 2);
    }
    std::ostringstream out;
    write_scaling_csv(out, rows);
    CHECK(out.str().rfind("kind,particles,sites,forms,d,p,threads,t_baseline,t_solve,t_corrections,overhead\n", 0) == 0);
    CHECK(parse_scaling_kind("forms") == ScalingKind::forms);
    CHECK_THROWS_AS(parse_scaling_kind("atoms"), InputError);
    spec.values.clear();
    CHECK_THROWS_AS(scaling_bench(spec), InputError);
}

TEST_CASE("cli usage errors and help") {
    const auto help = cli({"--help"});
    CHECK(help.code == 0);
    for (const char* sub : {"gen", "energy", "lambda-forces", "compare-hi-qi", "accuracy-sweep", "bench", "dynamics"})
        CHECK(help.out.find(sub) != std::string::npos);
    const auto sub_help = cli({"lambda-forces", "--help"});
    CHECK(sub_help.code == 0);
    for (const char* flag : {"--system", "--p", "--d", "--mode", "--lambda", "--csv", "--no-dipole"})
        CHECK(sub_help.out.find(flag) != std::string::npos);
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"energy", "--system", "x.json", "--bogus"}).code == 1);
    CHECK(cli({"energy", "--system", "definitely_missing.json"}).code == 1);
    CHECK(cli({"energy"}).code == 1);
}

TEST_CASE("cli gen is byte-identical on rerun") {
    CHECK(cli({"gen", "--out", "cli_gen_a.json", "--seed", "5", "--background", "100"}).code == 0);
    CHECK(cli({"gen", "--out", "cli_gen_b.json", "--seed", "5", "--background", "100"}).code == 0);
    CHECK(slurp("cli_gen_a.json") == slurp("cli_gen_b.json"));
    CHECK(load_system("cli_gen_a.json").system.size() == 110);
    std::remove("cli_gen_a.json");
    std::remove("cli_gen_b.json");
}

TEST_CASE("cli lambda-forces prints and writes CSV") {
    write_test_system();
    const auto r = cli({"lambda-forces", "--system", system_path, "--p", "8", "--d", "2", "--mode", "hi", "--csv",
                        "cli_forces.csv"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("site,branch,lambda,dh_dlambda,force_kj_mol\n", 0) == 0);
    CHECK(slurp("cli_forces.csv") == r.out);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][4]) == doctest::Approx(-138.935458 * std::stod(rows[1][3])));
    std::remove("cli_forces.csv");
}

TEST_CASE("cli compare-hi-qi reports no gap at one half") {
    write_test_system();
    const auto r = cli({"compare-hi-qi", "--system", system_path, "--lambda", "0.5"});
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(std::stod(rows[1][5])) <= 1e-12 * std::abs(std::stod(rows[1][3])));
    const auto all = csv_rows(cli({"compare-hi-qi", "--system", system_path, "--p", "10"}).out);
    CHECK(all.size() == 6);
    for (std::size_t i = 1; i < all.size(); ++i)
        CHECK(std::abs(std::stod(all[i][7])) <= 1e-9 * std::abs(std::stod(all[i][6])) + 1e-12);
}

TEST_CASE("cli config files set flags and flags win") {
    write_test_system();
    {
        std::ofstream c("cli_config.json");
        c << R"({"lambda-forces": {"system": ")" << system_path << R"(", "p": 3, "lambda": 0.25}})";
    }
    const auto from_file = cli({"--config", "cli_config.json", "lambda-forces"});
    CHECK(from_file.code == 0);
    const auto direct = cli({"lambda-forces", "--system", system_path, "--p", "3", "--lambda", "0.25"});
    CHECK(from_file.out == direct.out);
    const auto override = cli({"--config", "cli_config.json", "lambda-forces", "--p", "9"});
    const auto direct9 = cli({"lambda-forces", "--system", system_path, "--p", "9", "--lambda", "0.25"});
    CHECK(override.out == direct9.out);
    CHECK(override.out != from_file.out);
    {
        std::ofstream c("cli_config.json");
        c << R"({"lambda-forces": {"nonsense": 1}})";
    }
    CHECK(cli({"--config", "cli_config.json", "lambda-forces", "--system", system_path}).code == 1);
    {
        std::ofstream c("cli_config.json");
        c << "{ not json";
    }
    CHECK(cli({"--config", "cli_config.json", "lambda-forces", "--system", system_path}).code == 1);
    std::remove("cli_config.json");
}

TEST_CASE("cli accuracy-sweep, bench and dynamics") {
    const auto s = cli({"accuracy-sweep", "--p", "1..3", "--d", "0", "--background", "200"});
    CHECK(s.code == 0);
    CHECK(csv_rows(s.out).size() == 4);
    CHECK(cli({"accuracy-sweep", "--p", "1,3", "--d", "0"}).code == 1);

    const auto b = cli({"bench", "--kind", "forms", "--sizes", "2,4", "--background", "500", "--sites", "2", "--p",
                        "4", "--d", "1", "--reps", "5"});
    CHECK(b.code == 0);
    CHECK(csv_rows(b.out).size() == 3);
    CHECK(cli({"bench", "--reps", "2"}).code == 1);

    const auto d1 = cli({"dynamics", "--replicas", "3", "--steps", "2000", "--seed", "4"});
    const auto d2 = cli({"dynamics", "--replicas", "3", "--steps", "2000", "--seed", "4"});
    CHECK(d1.code == 0);
    CHECK(d1.out == d2.out);
    CHECK(csv_rows(d1.out).size() == 7);
    CHECK(cli({"dynamics", "--mode", "sideways"}).code == 1);
}

TEST_CASE("cli numerical failure exits with 2") {
    const auto r = cli({"dynamics", "--replicas", "1", "--steps", "200", "--dt", "5", "--mode", "hi"});
    CHECK(r.code == 2);
    CHECK(r.err.find("numerical") != std::string::npos);
}
