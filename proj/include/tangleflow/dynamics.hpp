#pragma once

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "tangleflow/error.hpp"
#include "tangleflow/model.hpp"

namespace tangleflow {

/// Integration controls. Times are in flow units.
struct FlowParams {
    double dt_init = 1e-3;
    double dt_min = 1e-9;
    double dt_max = 1e-1;
    double t_max = 1e3;
    /// Converged once the sup-norm of the height flow drops below this.
    double grad_tol = 1e-10;
    /// Gap guard at gap_safety / E(initial), in (0, 1).
    double gap_safety = 0.5;
    /// Record every n-th accepted step (first and last are always kept).
    std::size_t record_stride = 1;
    /// Extra samples at 10^(k / samples_per_decade); 0 disables.
    std::size_t samples_per_decade = 0;
    /// Cap dt at stability_margin / (Gershgorin bound of the flow Jacobian); 0 disables.
    double stability_margin = 2.5;
    /// Stop with Termination::StepLimit after this many accepted steps; 0 means no limit.
    std::size_t max_steps = 0;
    /// Also integrate the planar coordinates by their (linear) heat flow.
    bool flow_planar = false;

    /// Throws InvalidArgument when the invariants above do not hold.
    void validate() const;
};

/// Negative energy gradient with respect to the heights (the flow velocity).
struct FlowField {
    std::vector<double> blue;
    std::vector<double> red;
};

/// Planar part: Σ_edges |x(v) + T(shift) - x(u)|².
double planar_energy(const System& system, std::span<const Vec2> x);

/// Full energy; dispatches on the model kind. Throws ZeroGap.
double energy(const System& system, const Configuration& config);
/// Throws InvalidArgument when `system` is a weave.
double energy_entangled(const System& system, const Configuration& config);
/// Throws InvalidArgument when `system` is not a weave.
double energy_weave(const System& system, const Configuration& config);

/// gz_blue = 2 L z_blue + r, gz_red = 2 L z_red - r with r(v) = S(v) / d(v)²,
/// L = L_X for graphs and L_B, L_R for weaves. Throws ZeroGap.
FlowField gradient(const System& system, const Configuration& config);

/// Sup-norm of gradient(system, config).
double stationarity_residual(const System& system, const Configuration& config);

/// One classical RK4 step. Throws GapGuardTripped if a stage changes the sign
/// of any gap, or the result has min |d| below `gap_floor`.
Configuration step(const System& system, const Configuration& config, double dt, double gap_floor);
/// Same, with gap_floor = 0.5 / E(config).
Configuration step(const System& system, const Configuration& config, double dt);

enum class Termination { Converged, Truncated, StepLimit };

std::string_view to_string(Termination t) noexcept;

struct Sample {
    double t = 0.0;
    Configuration config;
    double energy = 0.0;
    double grad_norm = 0.0;
    double min_gap = 0.0;
    /// Means of z_blue and z_red.
    double m_blue = 0.0;
    double m_red = 0.0;
    /// Σ (z_blue + z_red), conserved by the flow.
    double m_total = 0.0;
    /// Subweave barycenters M_W of the tracked thread sets.
    std::vector<double> m_components;
};

struct Trajectory {
    std::vector<Sample> samples;
    Termination termination = Termination::Truncated;
    double initial_energy = 0.0;
    double gap_floor = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    /// Largest E(t_{k+1}) - E(t_k) over accepted steps (may be slightly positive from rounding).
    double max_energy_increase = 0.0;
    /// Smallest min |d| over all accepted steps.
    double min_gap_seen = 0.0;
    /// False if any accepted step changed a crossing sign (never expected).
    bool signs_preserved = true;
    std::vector<ThreadSet> tracked;

    const Sample& front() const { return samples.front(); }
    const Sample& back() const { return samples.back(); }
    bool converged() const noexcept { return termination == Termination::Converged; }
};

struct IntegrateOptions {
    /// Thread sets whose barycenters are recorded (weaves only).
    std::vector<ThreadSet> tracked;
    /// Called every `progress_every` accepted steps.
    std::function<void(const Sample&)> progress;
    std::size_t progress_every = 10000;
};

/// Thrown when dt would drop below dt_min; carries the last accepted state.
class StepUnderflowError : public Error {
public:
    StepUnderflowError(const std::string& message, double t, double dt, Configuration snapshot);

    double time() const noexcept { return t_; }
    double dt() const noexcept { return dt_; }
    const Configuration& snapshot() const noexcept { return snapshot_; }

private:
    double t_;
    double dt_;
    Configuration snapshot_;
};

/// Adaptive RK4 integration of the flow from `initial` up to convergence or t_max.
/// Throws InvalidInitial, StepUnderflowError.
Trajectory integrate(const System& system, const Configuration& initial, const FlowParams& params,
                     const IntegrateOptions& options = {});

} // namespace tangleflow
