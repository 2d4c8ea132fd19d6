#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

#include "mahi/corrections.hpp"
#include "mahi/frozen.hpp"
#include "mahi/system.hpp"

namespace mahi {

// Double well 16 h (l (1 - l))^2 with quartic walls outside [low, high];
// zero at 0 and 1, h at 1/2. kJ/mol.
struct BiasPotential {
    double barrier = 5.0;
    double wall_stiffness = 1e5;
    double wall_low = -0.1;
    double wall_high = 1.1;

    double energy(double lambda) const;
    double derivative(double lambda) const;
};

// Seeded normal deviates; Box-Muller on 53-bit uniforms, so streams are the
// same on every platform.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
    double next();

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Independent replica seeds from one master seed.
std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica);

struct LangevinParams {
    double dt = 0.002;           // ps
    double temperature = 300.0;  // K
    double friction = 5.0;       // 1/ps
};

// Forces -dU/dlambda in kJ/mol, [site][k].
using LambdaForces = std::vector<std::vector<double>>;
using ForceField = std::function<LambdaForces(const LambdaState&)>;

// One BAOAB step. `forces` holds the forces at the current state on entry
// and at the new state on return.
void baoab_step(LambdaState& state, LambdaForces& forces, const ForceField& field, const LangevinParams& params,
                NormalStream& noise);

struct TransitionRecord {
    int state = -1;  // -1 until the first band is reached
    long count = 0;
    std::vector<double> times;  // ps
};

class TransitionCounter {
public:
    TransitionCounter(double low, double high);
    void observe(double time, double lambda);
    const TransitionRecord& record() const { return record_; }

private:
    double low_, high_;
    TransitionRecord record_;
};

TransitionRecord count_transitions(const std::vector<double>& lambda, const std::vector<double>& times, double low,
                                   double high);

struct DynamicsConfig {
    Mode mode = Mode::hi;
    long steps = 1000;
    LangevinParams langevin;
    BiasPotential bias;
    std::uint64_t seed = 1;
    int output_stride = 100;  // frames kept every n steps
    double low = 0.2;
    double high = 0.8;
};

struct TrajectoryFrame {
    double time = 0.0;
    LambdaState state;
    LambdaForces forces;
};

struct Trajectory {
    std::vector<TrajectoryFrame> frames;
    std::vector<std::vector<TransitionRecord>> transitions;  // [site][k]
};

// Electrostatic lambda forces from the cache plus the bias on every lambda.
ForceField make_force_field(const FrozenCoordinateCache& cache, Mode mode, const BiasPotential& bias);

Trajectory run_trajectory(const FrozenCoordinateCache& cache, const LambdaState& initial, const DynamicsConfig& config);

// time_ps,site,branch,lambda,force
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
// replica,mode,site,branch,transitions,final_state
void write_transition_header(std::ostream& out);
void write_transition_rows(std::ostream& out, int replica, Mode mode, const Trajectory& trajectory);

}  // namespace mahi
