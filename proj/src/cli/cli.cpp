#include "mahi/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "mahi/bench.hpp"
#include "mahi/corrections.hpp"
#include "mahi/dynamics.hpp"
#include "mahi/error.hpp"
#include "mahi/frozen.hpp"
#include "mahi/generate.hpp"
#include "mahi/system_io.hpp"
#include "mahi/units.hpp"

namespace mahi {

namespace {

// Config files use the same JSON dialect as system files. Top-level keys
// set global flags, objects named after a subcommand set its flags.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::json j = to_json(app, default_also);
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

private:
    static nlohmann::json to_json(const CLI::App* app, bool default_also) {
        nlohmann::json j = nlohmann::json::object();
        for (const CLI::Option* opt : app->get_options({})) {
            if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
            const std::string name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& r = opt->results();
                j[name] = r.size() == 1 ? nlohmann::json(r.front()) : nlohmann::json(r);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            auto s = to_json(sub, default_also);
            if (!s.empty()) j[sub->get_name()] = s;
        }
        return j;
    }

    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConfigError("config values must be strings, numbers, booleans or lists of them");
    }

    static void collect(const nlohmann::json& j, std::vector<std::string> parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_object()) {
                auto p = parents;
                p.push_back(it.key());
                collect(*it, p, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = it.key();
            if (it->is_array())
                for (const auto& v : *it) item.inputs.push_back(scalar(v));
            else
                item.inputs.push_back(scalar(*it));
            items.push_back(std::move(item));
        }
    }
};

struct EngineFlags {
    std::string system;
    int order = 8;
    int depth = 0;
    std::string boundary = "periodic";
    std::string lattice = "renormalized";
    int shell_cap = 4;
    bool no_dipole = false;
    std::string precision = "double";
    std::string lambda;  // empty: use the system file

    void add(CLI::App* app, bool need_system) {
        auto* s = app->add_option("--system", system, "System file (JSON)");
        if (need_system) s->required();
        app->add_option("--p", order, "Multipole order, 0..30")->capture_default_str();
        app->add_option("--d", depth, "Tree depth, 0..5")->capture_default_str();
        app->add_option("--boundary", boundary, "periodic or open")
            ->check(CLI::IsMember({"periodic", "open"}))
            ->capture_default_str();
        app->add_option("--lattice", lattice, "Far field: renormalized, shells or none")
            ->check(CLI::IsMember({"renormalized", "shells", "none"}))
            ->capture_default_str();
        app->add_option("--shells", shell_cap, "Outermost image shell in shells mode")->capture_default_str();
        app->add_flag("--no-dipole", no_dipole, "Disable dipole compensation (tin-foil sum)");
        app->add_option("--precision", precision, "double or single (single-rounded far field)")
            ->check(CLI::IsMember({"double", "single"}))
            ->capture_default_str();
        app->add_option("--lambda", lambda,
                        "Lambda values: one value for every coordinate, or a comma list in site order");
    }

    fmm::FmmConfig config() const {
        fmm::FmmConfig c;
        c.order = order;
        c.depth = depth;
        c.boundary = boundary == "open" ? fmm::Boundary::open : fmm::Boundary::periodic;
        c.lattice = lattice == "shells" ? fmm::LatticeMode::shells
                    : lattice == "none" ? fmm::LatticeMode::none
                                        : fmm::LatticeMode::renormalized;
        c.shell_cap = shell_cap;
        c.dipole_compensation = !no_dipole && c.boundary == fmm::Boundary::periodic;
        c.precision = precision == "single" ? fmm::Precision::single_rounded : fmm::Precision::full;
        fmm::validate_config(c);
        return c;
    }
};

LambdaState apply_lambda(const ParticleSystem& system, LambdaState state, const std::string& text) {
    if (text.empty()) return state;
    const auto values = parse_double_list(text);
    std::size_t total = 0;
    for (const auto& s : state.sites) total += s.values.size();
    if (values.size() != 1 && values.size() != total)
        throw InputError("--lambda needs 1 or " + std::to_string(total) + " values");
    std::size_t next = 0;
    for (auto& s : state.sites)
        for (auto& v : s.values) v = values.size() == 1 ? values[0] : values[next++];
    const auto problems = validate_lambda(system, state);
    if (!problems.empty()) throw InputError("invalid lambda state: " + problems.front());
    return state;
}

// Writes through `path`, or to `fallback` when the path is "-".
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path == "-") {
            out_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw InputError("cannot write '" + path + "'");
            out_ = file_.get();
        }
    }
    std::ostream& operator*() { return *out_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int run_gen(std::ostream& out, const GeneratorSpec& spec, const std::string& path) {
    const auto bundle = generate_random_system(spec);
    if (path.empty() || path == "-") {
        out << dump_system(bundle);
    } else {
        save_system(path, bundle);
        out << "wrote " << path << ": " << bundle.system.size() << " particles, " << bundle.system.sites.size()
            << " sites, box " << fmt("%.6f", bundle.system.box_length) << " nm\n";
    }
    return 0;
}

int run_energy(std::ostream& out, const EngineFlags& f, const std::string& mode_text) {
    const auto bundle = load_system(f.system);
    const auto lambda = apply_lambda(bundle.system, bundle.lambda, f.lambda);
    const Mode mode = parse_mode(mode_text);
    MahiSolver solver(bundle.system, f.config());
    const auto r = hi_energy_and_forces(solver, lambda, mode, {true, false});
    out << "mode " << mode_name(mode) << "\n";
    out << "energy_e2_per_nm " << fmt("%.17g", r.energy) << "\n";
    out << "energy_kj_mol " << fmt("%.17g", units::to_kj_mol(r.energy)) << "\n";
    return 0;
}

void lambda_force_csv(std::ostream& out, const LambdaState& lambda, const std::vector<std::vector<double>>& dh) {
    out << "site,branch,lambda,dh_dlambda,force_kj_mol\n";
    char buf[160];
    for (std::size_t s = 0; s < dh.size(); ++s)
        for (std::size_t k = 0; k < dh[s].size(); ++k) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", s, k, lambda.sites[s].values[k], dh[s][k],
                          -units::to_kj_mol(dh[s][k]));
            out << buf;
        }
}

int run_lambda_forces(std::ostream& out, const EngineFlags& f, const std::string& mode_text,
                      const std::string& csv) {
    const auto bundle = load_system(f.system);
    const auto lambda = apply_lambda(bundle.system, bundle.lambda, f.lambda);
    const Mode mode = parse_mode(mode_text);
    MahiSolver solver(bundle.system, f.config());
    const auto r = hi_energy_and_forces(solver, lambda, mode, {false, false});
    lambda_force_csv(out, lambda, r.dh_dlambda);
    if (!csv.empty() && csv != "-") {
        Sink sink(csv, out);
        lambda_force_csv(*sink, lambda, r.dh_dlambda);
    }
    return 0;
}

// dH~/dlambda - dH/dlambda against (lambda - 1/2) k for two-form sites.
int run_compare(std::ostream& out, const EngineFlags& f, const std::string& values, const std::string& csv) {
    const auto bundle = load_system(f.system);
    MahiSolver solver(bundle.system, f.config());
    const auto& sys = bundle.system;
    std::vector<double> k(sys.sites.size(), NAN);
    for (std::size_t s = 0; s < sys.sites.size(); ++s) {
        const auto& site = sys.sites[s];
        if (site.form_count() != 2) continue;
        std::vector<double> dq(site.atom_count());
        for (int a = 0; a < site.atom_count(); ++a) dq[a] = site.forms[0][a] - site.forms[1][a];
        k[s] = solver.site_form(int(s), dq, dq);
    }
    Sink sink(csv.empty() ? "-" : csv, out);
    *sink << "lambda,site,branch,dh_hi,dh_qi,difference,expected,residual\n";
    char buf[256];
    double worst = 0.0;
    for (double l : parse_double_list(values)) {
        const auto lambda = apply_lambda(sys, bundle.lambda, fmt("%.17g", l));
        const auto hi = hi_energy_and_forces(solver, lambda, Mode::hi, {false, false});
        const auto qi = hi_energy_and_forces(solver, lambda, Mode::qi, {false, false});
        for (std::size_t s = 0; s < sys.sites.size(); ++s)
            for (std::size_t b = 0; b < hi.dh_dlambda[s].size(); ++b) {
                const double diff = qi.dh_dlambda[s][b] - hi.dh_dlambda[s][b];
                const double expected = (l - 0.5) * k[s];
                const double res = std::isnan(k[s]) ? NAN : diff - expected;
                if (!std::isnan(res)) worst = std::max(worst, std::abs(res) / std::max(std::abs(k[s]), 1e-300));
                std::snprintf(buf, sizeof buf, "%.17g,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.6e\n", l, s, b,
                              hi.dh_dlambda[s][b], qi.dh_dlambda[s][b], diff, expected, res);
                *sink << buf;
            }
    }
    if (!csv.empty() && csv != "-") out << "max |residual|/|k| " << fmt("%.3e", worst) << "\n";
    return 0;
}

struct SweepFlags {
    std::string p = "1..30";
    std::string d = "0..3";
    std::string precision = "double";
    std::string distribution = "typical";
    int forms = 2;
    int background = 1000;
    int repetitions = 1;
    std::uint64_t seed = 42;
    std::string lambda;
    bool no_dipole = false;
    std::string out = "-";
};

std::pair<int, int> bounds(const std::string& text, const char* what) {
    const auto v = parse_int_list(text);
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] != v[i - 1] + 1) throw InputError(std::string(what) + " must be a contiguous range");
    return {v.front(), v.back()};
}

int run_sweep(std::ostream& out, const SweepFlags& f) {
    SweepSpec spec;
    std::tie(spec.p_min, spec.p_max) = bounds(f.p, "--p");
    std::tie(spec.d_min, spec.d_max) = bounds(f.d, "--d");
    spec.precision = f.precision == "single" ? fmm::Precision::single_rounded : fmm::Precision::full;
    spec.system.distribution = parse_distribution(f.distribution);
    spec.system.forms_per_site = f.forms;
    spec.system.background = f.background;
    spec.system.seed = f.seed;
    spec.repetitions = f.repetitions;
    spec.dipole_compensation = !f.no_dipole;
    if (!f.lambda.empty()) spec.lambda = parse_double_list(f.lambda);
    const auto rows = accuracy_sweep(spec);
    Sink sink(f.out, out);
    write_sweep_csv(*sink, rows);
    return 0;
}

struct BenchFlags {
    std::string kind = "sites";
    std::string sizes = "1,2,4,8,16";
    int background = 10000;
    int sites = 8;
    int forms = 2;
    int order = 8;
    int depth = -1;
    int max_depth = 4;
    int repetitions = 5;
    int warmup = 1;
    std::uint64_t seed = 1;
    std::string out = "-";
};

int run_bench(std::ostream& out, const BenchFlags& f) {
    ScalingSpec spec;
    spec.kind = parse_scaling_kind(f.kind);
    spec.values = parse_int_list(f.sizes);
    spec.background = f.background;
    spec.sites = f.sites;
    spec.forms_per_site = f.forms;
    spec.order = f.order;
    spec.depth = f.depth;
    spec.max_depth = f.max_depth;
    spec.repetitions = f.repetitions;
    spec.warmup = f.warmup;
    spec.seed = f.seed;
    if (spec.repetitions < 5) throw InputError("--reps must be at least 5 for a stable median");
    const auto rows = scaling_bench(spec);
    Sink sink(f.out, out);
    write_scaling_csv(*sink, rows);
    return 0;
}

struct DynamicsFlags {
    std::string mode = "both";
    long steps = 250000;
    double dt = 0.002;
    double temperature = 300.0;
    double friction = 5.0;
    double barrier = 5.0;
    double initial = 0.0;
    int replicas = 20;
    std::uint64_t seed = 2024;
    int stride = 100;
    std::string trajectory;
    std::string transitions = "-";
};

int run_dynamics(std::ostream& out, const EngineFlags& e, const DynamicsFlags& f) {
    SystemBundle bundle = e.system.empty() ? toy_two_form_site() : load_system(e.system);
    LambdaState initial = e.system.empty() ? uniform_lambda(bundle.system, f.initial) : bundle.lambda;
    if (!e.system.empty() || !e.lambda.empty()) initial = apply_lambda(bundle.system, initial, e.lambda);
    if (f.replicas < 1) throw InputError("--replicas must be at least 1");
    if (f.steps < 0) throw InputError("--steps must be non-negative");
    MahiSolver solver(bundle.system, e.config());
    const FrozenCoordinateCache cache(solver);

    std::vector<Mode> modes;
    if (f.mode == "both" || f.mode == "hi") modes.push_back(Mode::hi);
    if (f.mode == "both" || f.mode == "qi") modes.push_back(Mode::qi);

    DynamicsConfig cfg;
    cfg.steps = f.steps;
    cfg.langevin = {f.dt, f.temperature, f.friction};
    cfg.bias.barrier = f.barrier;
    cfg.output_stride = f.stride;

    Sink sink(f.transitions, out);
    write_transition_header(*sink);
    for (Mode mode : modes) {
        cfg.mode = mode;
        std::vector<Trajectory> runs(f.replicas);
        std::vector<std::string> failures(f.replicas);
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < f.replicas; ++r) {
            DynamicsConfig c = cfg;
            c.seed = replica_seed(f.seed, std::uint64_t(r));
            try {
                runs[r] = run_trajectory(cache, initial, c);
            } catch (const std::exception& ex) {
                failures[r] = ex.what();
            }
        }
        for (const auto& msg : failures)
            if (!msg.empty()) throw NumericalError(msg);
        for (int r = 0; r < f.replicas; ++r) write_transition_rows(*sink, r, mode, runs[r]);
        if (!f.trajectory.empty()) {
            const std::string path =
                modes.size() == 1 ? f.trajectory : f.trajectory + "." + mode_name(mode) + ".csv";
            Sink traj(path, out);
            write_trajectory_csv(*traj, runs[0]);
        }
    }
    return 0;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw InputError("not an integer list: '" + text + "'");
        return v;
    };
    std::vector<int> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(part));
            continue;
        }
        const int a = to_int(part.substr(0, dots)), b = to_int(part.substr(dots + 2));
        if (a > b) throw InputError("empty range '" + part + "'");
        for (int v = a; v <= b; ++v) out.push_back(v);
    }
    if (out.empty()) throw InputError("empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size() || !std::isfinite(v))
            throw InputError("not a number list: '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw InputError("empty list");
    return out;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Periodic FMM electrostatics with Hamiltonian-interpolation lambda forces", "mahi"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; command-line flags take precedence");
    app.allow_config_extras(false);
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.footer("Environment: MAHI_THREADS sets the worker thread count.\n"
               "Exit codes: 0 success, 1 usage or input error, 2 numerical failure.");

    GeneratorSpec gen;
    std::string gen_out, gen_case = "typical";
    auto* g = app.add_subcommand("gen", "Generate a random system file");
    g->add_option("--out", gen_out, "Output path, '-' for stdout")->capture_default_str();
    g->add_option("--background", gen.background, "Environment particles")->capture_default_str();
    g->add_option("--sites", gen.sites, "Titratable sites")->capture_default_str();
    g->add_option("--atoms-per-site", gen.atoms_per_site, "Atoms per site")->capture_default_str();
    g->add_option("--forms", gen.forms_per_site, "Forms per site: 2, 4, 8 or 16")->capture_default_str();
    g->add_option("--case", gen_case, "Site layout: typical (clustered) or worst (spread over the box)")
        ->capture_default_str();
    g->add_option("--density", gen.density, "Particles per nm^3")->capture_default_str();
    g->add_option("--min-distance", gen.min_distance, "Minimum pair distance, nm")->capture_default_str();
    g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();

    EngineFlags energy_flags;
    std::string energy_mode = "hi";
    auto* en = app.add_subcommand("energy", "Total electrostatic energy at the file's lambda state");
    energy_flags.add(en, true);
    en->add_option("--mode", energy_mode, "hi (interpolated Hamiltonian) or qi (charge-scaled)")
        ->capture_default_str();

    EngineFlags lf_flags;
    std::string lf_mode = "hi", lf_csv;
    auto* lf = app.add_subcommand("lambda-forces", "Per-branch lambda forces; CSV on stdout");
    lf_flags.add(lf, true);
    lf->add_option("--mode", lf_mode, "hi or qi")->capture_default_str();
    lf->add_option("--csv", lf_csv, "Also write the CSV to this path");

    EngineFlags cmp_flags;
    std::string cmp_values = "0.1,0.3,0.5,0.7,0.9", cmp_csv;
    auto* cmp = app.add_subcommand("compare-hi-qi", "QI minus HI lambda-force gap against (lambda - 1/2) k");
    cmp_flags.add(cmp, true);
    cmp->add_option("--values", cmp_values, "Lambda values applied to every coordinate")->capture_default_str();
    cmp->add_option("--csv", cmp_csv, "Write the CSV here instead of stdout");
    cmp->callback([&] {
        if (!cmp_flags.lambda.empty()) cmp_values = cmp_flags.lambda;
        cmp_flags.lambda.clear();
    });

    SweepFlags sw;
    auto* s = app.add_subcommand("accuracy-sweep", "Relative lambda-force deviation over p and d");
    s->add_option("--p", sw.p, "Multipole orders, e.g. 1..30")->capture_default_str();
    s->add_option("--d", sw.d, "Tree depths, e.g. 0..3")->capture_default_str();
    s->add_option("--case", sw.distribution, "typical or worst")->capture_default_str();
    s->add_option("--forms", sw.forms, "Forms per site")->capture_default_str();
    s->add_option("--background", sw.background, "Environment particles")->capture_default_str();
    s->add_option("--precision", sw.precision, "double or single")
        ->check(CLI::IsMember({"double", "single"}))
        ->capture_default_str();
    s->add_option("--repetitions", sw.repetitions, "Systems per case, seeds seed, seed+1, ...")
        ->capture_default_str();
    s->add_option("--seed", sw.seed, "Generator seed")->capture_default_str();
    s->add_option("--lambda", sw.lambda, "Lambda values in site order (default 0.345, 0.721, ...)");
    s->add_flag("--no-dipole", sw.no_dipole, "Disable dipole compensation");
    s->add_option("--out", sw.out, "CSV path, '-' for stdout")->capture_default_str();

    BenchFlags bf;
    auto* b = app.add_subcommand("bench", "Runtime scaling over sites, forms or particles");
    b->add_option("--kind", bf.kind, "sites, forms or particles")
        ->check(CLI::IsMember({"sites", "forms", "particles"}))
        ->capture_default_str();
    b->add_option("--sizes", bf.sizes, "Values of the swept quantity, e.g. 1,2,4 or 16..20")
        ->capture_default_str();
    b->add_option("--background", bf.background, "Environment particles (sites and forms sweeps)")
        ->capture_default_str();
    b->add_option("--sites", bf.sites, "Sites (forms sweep)")->capture_default_str();
    b->add_option("--forms", bf.forms, "Forms per site (sites and particles sweeps)")->capture_default_str();
    b->add_option("--p", bf.order, "Multipole order")->capture_default_str();
    b->add_option("--d", bf.depth, "Tree depth, -1 picks the fastest")->capture_default_str();
    b->add_option("--max-d", bf.max_depth, "Deepest tree tried when picking the depth")->capture_default_str();
    b->add_option("--reps", bf.repetitions, "Timed repetitions (median reported), at least 5")
        ->capture_default_str();
    b->add_option("--warmup", bf.warmup, "Discarded warm-up repetitions")->capture_default_str();
    b->add_option("--seed", bf.seed, "Generator seed")->capture_default_str();
    b->add_option("--out", bf.out, "CSV path, '-' for stdout")->capture_default_str();

    EngineFlags dyn_engine;
    DynamicsFlags df;
    auto* dy = app.add_subcommand("dynamics", "Frozen-coordinate lambda dynamics; transition counts as CSV");
    dyn_engine.add(dy, false);
    dy->add_option("--mode", df.mode, "hi, qi or both")
        ->check(CLI::IsMember({"hi", "qi", "both"}))
        ->capture_default_str();
    dy->add_option("--steps", df.steps, "Steps per replica")->capture_default_str();
    dy->add_option("--dt", df.dt, "Time step, ps")->capture_default_str();
    dy->add_option("--temperature", df.temperature, "K")->capture_default_str();
    dy->add_option("--friction", df.friction, "1/ps")->capture_default_str();
    dy->add_option("--barrier", df.barrier, "Double-well barrier height, kJ/mol")->capture_default_str();
    dy->add_option("--start", df.initial, "Initial lambda for the built-in toy site")->capture_default_str();
    dy->add_option("--replicas", df.replicas, "Independent replicas")->capture_default_str();
    dy->add_option("--seed", df.seed, "Master seed")->capture_default_str();
    dy->add_option("--stride", df.stride, "Trajectory frame stride")->capture_default_str();
    dy->add_option("--trajectory", df.trajectory, "Trajectory CSV of replica 0");
    dy->add_option("--transitions", df.transitions, "Transition summary CSV, '-' for stdout")
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (g->parsed()) {
            gen.distribution = parse_distribution(gen_case);
            return run_gen(out, gen, gen_out);
        }
        if (en->parsed()) return run_energy(out, energy_flags, energy_mode);
        if (lf->parsed()) return run_lambda_forces(out, lf_flags, lf_mode, lf_csv);
        if (cmp->parsed()) return run_compare(out, cmp_flags, cmp_values, cmp_csv);
        if (s->parsed()) return run_sweep(out, sw);
        if (b->parsed()) return run_bench(out, bf);
        if (dy->parsed()) return run_dynamics(out, dyn_engine, df);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return 2;
    }
    return 1;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace mahi
