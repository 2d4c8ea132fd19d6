#include "mahi/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "mahi/error.hpp"
#include "mahi/units.hpp"

namespace mahi {

double BiasPotential::energy(double l) const {
    const double w = l * (1.0 - l);
    double e = 16.0 * barrier * w * w;
    if (l < wall_low) e += wall_stiffness * std::pow(wall_low - l, 4);
    if (l > wall_high) e += wall_stiffness * std::pow(l - wall_high, 4);
    return e;
}

double BiasPotential::derivative(double l) const {
    const double w = l * (1.0 - l);
    double d = 32.0 * barrier * w * (1.0 - 2.0 * l);
    if (l < wall_low) d -= 4.0 * wall_stiffness * std::pow(wall_low - l, 3);
    if (l > wall_high) d += 4.0 * wall_stiffness * std::pow(l - wall_high, 3);
    return d;
}

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    auto uniform = [&] { return (double(rng_() >> 11) + 0.5) * 0x1.0p-53; };
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) {
    // splitmix64
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (replica + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

void check_finite(const LambdaForces& f) {
    for (const auto& site : f)
        for (double v : site)
            if (!std::isfinite(v)) throw NumericalError("non-finite lambda force");
}

}  // namespace

void baoab_step(LambdaState& state, LambdaForces& forces, const ForceField& field, const LangevinParams& p,
                NormalStream& noise) {
    if (!(p.dt > 0.0)) throw InputError("time step must be positive");
    check_finite(forces);
    const double kT = units::boltzmann_kj_mol * p.temperature;
    const double c1 = std::exp(-p.friction * p.dt);
    const double c2 = std::sqrt(std::max(0.0, 1.0 - c1 * c1));
    const double half = 0.5 * p.dt;
    for (std::size_t s = 0; s < state.sites.size(); ++s) {
        auto& site = state.sites[s];
        const double m = site.mass;
        const double sigma = std::sqrt(kT / m);
        for (std::size_t k = 0; k < site.values.size(); ++k) {
            double& x = site.values[k];
            double& v = site.velocities[k];
            v += half * forces[s][k] / m;
            x += half * v;
            v = c1 * v + (kT > 0.0 ? c2 * sigma * noise.next() : 0.0);
            x += half * v;
        }
    }
    forces = field(state);
    check_finite(forces);
    for (std::size_t s = 0; s < state.sites.size(); ++s) {
        auto& site = state.sites[s];
        for (std::size_t k = 0; k < site.values.size(); ++k) site.velocities[k] += half * forces[s][k] / site.mass;
    }
}

TransitionCounter::TransitionCounter(double low, double high) : low_(low), high_(high) {
    if (!(low < high)) throw InputError("transition thresholds need low < high");
}

void TransitionCounter::observe(double time, double lambda) {
    int next = record_.state;
    if (lambda <= low_) next = 0;
    else if (lambda >= high_) next = 1;
    if (next != record_.state) {
        if (record_.state != -1) {
            ++record_.count;
            record_.times.push_back(time);
        }
        record_.state = next;
    }
}

TransitionRecord count_transitions(const std::vector<double>& lambda, const std::vector<double>& times, double low,
                                   double high) {
    if (lambda.empty()) throw InputError("empty lambda series");
    if (times.size() != lambda.size()) throw InputError("time and lambda series differ in length");
    TransitionCounter c(low, high);
    for (std::size_t i = 0; i < lambda.size(); ++i) c.observe(times[i], lambda[i]);
    return c.record();
}

ForceField make_force_field(const FrozenCoordinateCache& cache, Mode mode, const BiasPotential& bias) {
    return [&cache, mode, bias](const LambdaState& state) {
        auto f = cache.dh_dlambda(state, mode);
        for (std::size_t s = 0; s < f.size(); ++s)
            for (std::size_t k = 0; k < f[s].size(); ++k)
                f[s][k] = -units::to_kj_mol(f[s][k]) - bias.derivative(state.sites[s].values[k]);
        return f;
    };
}

Trajectory run_trajectory(const FrozenCoordinateCache& cache, const LambdaState& initial, const DynamicsConfig& config) {
    if (config.steps < 0) throw InputError("step count must be non-negative");
    if (config.output_stride < 1) throw InputError("output stride must be positive");
    Trajectory traj;
    LambdaState state = initial;
    const auto field = make_force_field(cache, config.mode, config.bias);
    LambdaForces forces = field(state);
    NormalStream noise(config.seed);
    std::vector<std::vector<TransitionCounter>> counters;
    for (const auto& s : state.sites) counters.emplace_back(s.values.size(), TransitionCounter(config.low, config.high));
    auto observe = [&](long step) {
        const double t = step * config.langevin.dt;
        for (std::size_t s = 0; s < state.sites.size(); ++s)
            for (std::size_t k = 0; k < state.sites[s].values.size(); ++k)
                counters[s][k].observe(t, state.sites[s].values[k]);
        if (step % config.output_stride == 0) traj.frames.push_back({t, state, forces});
    };
    observe(0);
    for (long step = 1; step <= config.steps; ++step) {
        baoab_step(state, forces, field, config.langevin, noise);
        observe(step);
    }
    for (const auto& site : counters) {
        traj.transitions.emplace_back();
        for (const auto& c : site) traj.transitions.back().push_back(c.record());
    }
    return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "time_ps,site,branch,lambda,force\n";
    char buf[160];
    for (const auto& f : trajectory.frames)
        for (std::size_t s = 0; s < f.state.sites.size(); ++s)
            for (std::size_t k = 0; k < f.state.sites[s].values.size(); ++k) {
                std::snprintf(buf, sizeof buf, "%.6f,%zu,%zu,%.17g,%.17g\n", f.time, s, k, f.state.sites[s].values[k],
                              f.forces[s][k]);
                out << buf;
            }
}

void write_transition_header(std::ostream& out) { out << "replica,mode,site,branch,transitions,final_state\n"; }

void write_transition_rows(std::ostream& out, int replica, Mode mode, const Trajectory& trajectory) {
    for (std::size_t s = 0; s < trajectory.transitions.size(); ++s)
        for (std::size_t k = 0; k < trajectory.transitions[s].size(); ++k) {
            const auto& r = trajectory.transitions[s][k];
            out << replica << ',' << mode_name(mode) << ',' << s << ',' << k << ',' << r.count << ',' << r.state
                << '\n';
        }
}

}  // namespace mahi
