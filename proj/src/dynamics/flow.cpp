#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tangleflow/dynamics.hpp"
#include "tangleflow/kernels.hpp"

namespace tangleflow {
namespace {

/// Heights and (optionally) planar coordinates packed as
/// [z_blue | z_red | x.x | x.y] so the RK4 stages are plain vector ops.
struct State {
    std::size_t n = 0;
    bool planar = false;
    std::vector<double> data;

    double* zb() { return data.data(); }
    double* zr() { return data.data() + n; }
    const double* zb() const { return data.data(); }
    const double* zr() const { return data.data() + n; }
    const double* xx() const { return data.data() + 2 * n; }
    const double* xy() const { return data.data() + 3 * n; }
};

State pack(const Configuration& c, bool planar)
{
    State s;
    s.n = c.size();
    s.planar = planar;
    s.data.resize((planar ? 4 : 2) * s.n);
    std::copy(c.z_blue().begin(), c.z_blue().end(), s.data.begin());
    std::copy(c.z_red().begin(), c.z_red().end(), s.data.begin() + static_cast<std::ptrdiff_t>(s.n));
    if (planar)
        for (std::size_t v = 0; v < s.n; ++v) {
            s.data[2 * s.n + v] = c.x()[v].x;
            s.data[3 * s.n + v] = c.x()[v].y;
        }
    return s;
}

std::vector<Vec2> planar_of(const State& s, const Configuration& fallback)
{
    if (!s.planar)
        return {fallback.x().begin(), fallback.x().end()};
    std::vector<Vec2> x(s.n);
    for (std::size_t v = 0; v < s.n; ++v)
        x[v] = {s.xx()[v], s.xy()[v]};
    return x;
}

Configuration unpack(const System& system, const State& s, const Configuration& fallback)
{
    return Configuration(planar_of(s, fallback), std::vector<double>(s.zb(), s.zb() + s.n),
                         std::vector<double>(s.zr(), s.zr() + s.n), system.crossing());
}

double quadratic_term(const Adjacency& adj, const double* z)
{
    // Each undirected edge is listed once from each end.
    double acc = 0.0;
    for (VertexId u = 0; u < adj.size(); ++u)
        for (VertexId v : adj.of(u)) {
            const double diff = z[u] - z[v];
            acc += diff * diff;
        }
    return 0.5 * acc;
}

double raw_energy(const System& system, std::span<const Vec2> x, const double* zb, const double* zr)
{
    double rep = 0.0;
    for (VertexId v = 0; v < system.vertex_count(); ++v) {
        const double d = zb[v] - zr[v];
        if (d == 0.0)
            throw Error(ErrorCode::ZeroGap, "zero gap at vertex " + std::to_string(v), v);
        rep += 1.0 / std::fabs(d);
    }
    return planar_energy(system, x) + quadratic_term(system.blue_adjacency(), zb) +
           quadratic_term(system.red_adjacency(), zr) + rep;
}

class FlowEvaluator {
public:
    FlowEvaluator(const System& system, bool planar)
        : system_(system), kt_(kernels::active()), n_(system.vertex_count()), planar_(planar), force_(n_),
          inv_gap_(n_)
    {
    }

    /// Writes the flow velocity at `y` into `out`. Returns false when some gap
    /// has the wrong sign or vanished.
    bool operator()(const double* y, double* out)
    {
        const double* zb = y;
        const double* zr = y + n_;
        const double* s = system_.sign_values().data();
        for (std::size_t v = 0; v < n_; ++v)
            if (!(s[v] * (zb[v] - zr[v]) > 0.0))
                return false;
        kt_.repulsion(zb, zr, s, force_.data(), inv_gap_.data(), n_);
        apply_laplacian(system_.blue_adjacency(), {zb, n_}, {out, n_});
        apply_laplacian(system_.red_adjacency(), {zr, n_}, {out + n_, n_});
        for (std::size_t v = 0; v < n_; ++v) {
            out[v] = 2.0 * out[v] + force_[v];
            out[n_ + v] = 2.0 * out[n_ + v] - force_[v];
        }
        if (planar_)
            planar_flow(y + 2 * n_, y + 3 * n_, out + 2 * n_, out + 3 * n_);
        return true;
    }

    const kernels::KernelTable& kernels() const { return kt_; }

private:
    void planar_flow(const double* xx, const double* xy, double* ox, double* oy) const
    {
        std::fill(ox, ox + n_, 0.0);
        std::fill(oy, oy + n_, 0.0);
        for (const QuotientEdge& e : system_.graph().edges()) {
            const Vec2 t = system_.graph().translation(e.shift);
            const double dx = xx[e.to] + t.x - xx[e.from];
            const double dy = xy[e.to] + t.y - xy[e.from];
            ox[e.from] += 2.0 * dx;
            oy[e.from] += 2.0 * dy;
            ox[e.to] -= 2.0 * dx;
            oy[e.to] -= 2.0 * dy;
        }
    }

    const System& system_;
    const kernels::KernelTable& kt_;
    std::size_t n_;
    bool planar_;
    std::vector<double> force_;
    std::vector<double> inv_gap_;
};

/// RK4 workspace reused across steps.
struct Stepper {
    FlowEvaluator eval;
    std::vector<double> k2, k3, k4, tmp;

    Stepper(const System& system, bool planar, std::size_t len)
        : eval(system, planar), k2(len), k3(len), k4(len), tmp(len)
    {
    }

    /// Advances `y` by h into `out` using the precomputed k1.
    void advance(const std::vector<double>& y, const std::vector<double>& k1, double h, std::vector<double>& out,
                 std::size_t n, double gap_floor)
    {
        const auto& kt = eval.kernels();
        const std::size_t len = y.size();
        kt.axpy(0.5 * h, k1.data(), y.data(), tmp.data(), len);
        if (!eval(tmp.data(), k2.data()))
            trip("stage 2");
        kt.axpy(0.5 * h, k2.data(), y.data(), tmp.data(), len);
        if (!eval(tmp.data(), k3.data()))
            trip("stage 3");
        kt.axpy(h, k3.data(), y.data(), tmp.data(), len);
        if (!eval(tmp.data(), k4.data()))
            trip("stage 4");
        out.resize(len);
        kt.rk4_combine(h / 6.0, y.data(), k1.data(), k2.data(), k3.data(), k4.data(), out.data(), len);
        for (std::size_t v = 0; v < len; ++v)
            if (!std::isfinite(out[v]))
                trip("non-finite result");
        const double min_gap = kt.min_abs_diff(out.data(), out.data() + n, n);
        if (!(min_gap >= gap_floor))
            trip("min |d| = " + std::to_string(min_gap) + " below floor " + std::to_string(gap_floor));
    }

    [[noreturn]] static void trip(const std::string& what)
    {
        throw Error(ErrorCode::GapGuardTripped, "gap guard tripped: " + what);
    }
};

bool signs_match(const System& system, const double* zb, const double* zr)
{
    const auto s = system.sign_values();
    for (std::size_t v = 0; v < s.size(); ++v)
        if (!(s[v] * (zb[v] - zr[v]) > 0.0))
            return false;
    return true;
}

/// Gershgorin bound on the spectral radius of the flow Jacobian.
double jacobian_bound(const System& system, const State& s)
{
    const std::size_t n = s.n;
    double rho = 0.0;
    for (VertexId v = 0; v < n; ++v) {
        const double deg = static_cast<double>(
            std::max(system.blue_adjacency().of(v).size(), system.red_adjacency().of(v).size()));
        double lap = 4.0 * deg;
        if (s.planar)
            lap = std::max(lap, 4.0 * static_cast<double>(system.graph().degree(v)));
        const double ad = std::fabs(s.zb()[v] - s.zr()[v]);
        rho = std::max(rho, lap + 4.0 / (ad * ad * ad));
    }
    return rho;
}

Sample make_sample(const System& system, double t, Configuration config, double e, double grad_norm,
                   const std::vector<ThreadSet>& tracked)
{
    Sample smp{t, std::move(config), e, grad_norm, 0.0, 0.0, 0.0, 0.0, {}};
    smp.min_gap = smp.config.min_abs_gap();
    smp.m_blue = smp.config.mean_blue();
    smp.m_red = smp.config.mean_red();
    smp.m_total = smp.config.total_height();
    if (!tracked.empty()) {
        const auto& weave = static_cast<const WeaveSystem&>(system);
        for (const ThreadSet& ts : tracked)
            smp.m_components.push_back(subweave_barycenter(weave, smp.config, ts));
    }
    return smp;
}

void check_same_size(const System& system, const Configuration& config)
{
    if (config.size() != system.vertex_count())
        throw Error(ErrorCode::MismatchedVertexSet, "configuration has " + std::to_string(config.size()) +
                                                        " vertices, system has " +
                                                        std::to_string(system.vertex_count()));
}

} // namespace

void FlowParams::validate() const
{
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(dt_init) || !positive(dt_min) || !positive(dt_max) || !positive(t_max) || !positive(grad_tol))
        throw Error(ErrorCode::InvalidArgument, "flow parameters must be positive and finite");
    if (!(dt_min <= dt_init && dt_init <= dt_max))
        throw Error(ErrorCode::InvalidArgument, "need dt_min <= dt_init <= dt_max");
    if (!(gap_safety > 0.0 && gap_safety < 1.0))
        throw Error(ErrorCode::InvalidArgument, "gap_safety must lie in (0, 1)");
    if (record_stride == 0)
        throw Error(ErrorCode::InvalidArgument, "record_stride must be positive");
    if (!(stability_margin >= 0.0) || !std::isfinite(stability_margin))
        throw Error(ErrorCode::InvalidArgument, "stability_margin must be nonnegative");
}

std::string_view to_string(Termination t) noexcept
{
    switch (t) {
    case Termination::Converged:
        return "converged";
    case Termination::Truncated:
        return "truncated";
    case Termination::StepLimit:
        return "step-limit";
    }
    return "unknown";
}

StepUnderflowError::StepUnderflowError(const std::string& message, double t, double dt, Configuration snapshot)
    : Error(ErrorCode::StepUnderflow, message), t_(t), dt_(dt), snapshot_(std::move(snapshot))
{
}

double planar_energy(const System& system, std::span<const Vec2> x)
{
    double acc = 0.0;
    for (const QuotientEdge& e : system.graph().edges()) {
        const Vec2 diff = x[e.to] + system.graph().translation(e.shift) - x[e.from];
        acc += squared_norm(diff);
    }
    return acc;
}

double energy(const System& system, const Configuration& config)
{
    check_same_size(system, config);
    return raw_energy(system, config.x(), config.z_blue().data(), config.z_red().data());
}

double energy_entangled(const System& system, const Configuration& config)
{
    if (system.is_weave())
        throw Error(ErrorCode::InvalidArgument, "energy_entangled called on a weave");
    return energy(system, config);
}

double energy_weave(const System& system, const Configuration& config)
{
    if (!system.is_weave())
        throw Error(ErrorCode::InvalidArgument, "energy_weave called on an entangled graph");
    return energy(system, config);
}

FlowField gradient(const System& system, const Configuration& config)
{
    check_same_size(system, config);
    const std::size_t n = system.vertex_count();
    for (VertexId v = 0; v < n; ++v)
        if (config.gap(v) == 0.0)
            throw Error(ErrorCode::ZeroGap, "zero gap at vertex " + std::to_string(v), v);
    const State s = pack(config, false);
    std::vector<double> out(2 * n);
    FlowEvaluator eval(system, false);
    eval(s.data.data(), out.data());
    return {std::vector<double>(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n)),
            std::vector<double>(out.begin() + static_cast<std::ptrdiff_t>(n), out.end())};
}

double stationarity_residual(const System& system, const Configuration& config)
{
    const FlowField f = gradient(system, config);
    const auto& kt = kernels::active();
    return std::max(kt.max_abs(f.blue.data(), f.blue.size()), kt.max_abs(f.red.data(), f.red.size()));
}

Configuration step(const System& system, const Configuration& config, double dt, double gap_floor)
{
    check_same_size(system, config);
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    const State s = pack(config, false);
    Stepper stepper(system, false, s.data.size());
    std::vector<double> k1(s.data.size());
    if (!stepper.eval(s.data.data(), k1.data()))
        throw Error(ErrorCode::ZeroGap, "configuration has a vanishing gap");
    State next = s;
    stepper.advance(s.data, k1, dt, next.data, s.n, gap_floor);
    if (!signs_match(system, next.zb(), next.zr()))
        Stepper::trip("crossing sign changed");
    return unpack(system, next, config);
}

Configuration step(const System& system, const Configuration& config, double dt)
{
    return step(system, config, dt, 0.5 / energy(system, config));
}

Trajectory integrate(const System& system, const Configuration& initial, const FlowParams& params,
                     const IntegrateOptions& options)
{
    params.validate();
    if (initial.size() != system.vertex_count())
        throw Error(ErrorCode::InvalidInitial, "initial configuration does not match the system");
    for (VertexId v = 0; v < system.vertex_count(); ++v)
        if (!(system.sign_values()[v] * initial.gap(v) > 0.0))
            throw Error(ErrorCode::InvalidInitial, "initial configuration violates the crossing sign at vertex " +
                                                       std::to_string(v), v);
    if (!options.tracked.empty() && !system.is_weave())
        throw Error(ErrorCode::InvalidArgument, "thread sets can only be tracked on weaves");

    const bool planar = params.flow_planar;
    State state = pack(initial, planar);
    const std::size_t n = state.n;
    const std::size_t len = state.data.size();
    Stepper stepper(system, planar, len);
    const auto& kt = stepper.eval.kernels();

    Trajectory traj;
    traj.tracked = options.tracked;
    const double e0 = energy(system, initial);
    traj.initial_energy = e0;
    traj.gap_floor = params.gap_safety / e0;
    traj.min_gap_seen = initial.min_abs_gap();
    traj.max_energy_increase = -std::numeric_limits<double>::infinity();

    std::vector<double> k1(len);
    stepper.eval(state.data.data(), k1.data());
    double grad_norm = kt.max_abs(k1.data(), 2 * n);
    double e = e0;
    double t = 0.0;
    double dt = params.dt_init;
    Configuration current = initial;
    traj.samples.push_back(make_sample(system, t, current, e, grad_norm, options.tracked));
    bool last_recorded = true;

    std::vector<double> candidate(len);
    const double e_slack = 1e-12 * std::fabs(e0);
    const auto spd = static_cast<double>(params.samples_per_decade);

    for (;;) {
        if (grad_norm < params.grad_tol) {
            traj.termination = Termination::Converged;
            break;
        }
        if (t >= params.t_max) {
            traj.termination = Termination::Truncated;
            break;
        }
        if (params.max_steps != 0 && traj.accepted_steps >= params.max_steps) {
            traj.termination = Termination::StepLimit;
            break;
        }

        double h = std::min(dt, params.t_max - t);
        bool limited = h < dt;
        if (params.stability_margin > 0.0) {
            const double cap = params.stability_margin / jacobian_bound(system, state);
            if (cap < h) {
                h = cap;
                limited = true;
            }
        }

        bool ok = true;
        try {
            stepper.advance(state.data, k1, h, candidate, n, traj.gap_floor);
            if (!signs_match(system, candidate.data(), candidate.data() + n))
                ok = false;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::GapGuardTripped)
                throw;
            ok = false;
        }
        double e_new = 0.0;
        if (ok) {
            const std::vector<Vec2> x = planar ? planar_of(State{n, true, candidate}, current)
                                               : std::vector<Vec2>(current.x().begin(), current.x().end());
            e_new = raw_energy(system, x, candidate.data(), candidate.data() + n);
            ok = e_new <= e + e_slack;
        }
        if (!ok) {
            ++traj.rejected_steps;
            dt = 0.5 * h;
            if (dt < params.dt_min)
                throw StepUnderflowError("step size fell below dt_min = " + std::to_string(params.dt_min) +
                                             " at t = " + std::to_string(t),
                                         t, dt, current);
            continue;
        }

        const double t_old = t;
        t = (h == params.t_max - t) ? params.t_max : t + h;
        traj.max_energy_increase = std::max(traj.max_energy_increase, e_new - e);
        e = e_new;
        state.data.swap(candidate);
        ++traj.accepted_steps;
        if (!limited)
            dt = std::min(dt * 1.25, params.dt_max);

        stepper.eval(state.data.data(), k1.data());
        grad_norm = kt.max_abs(k1.data(), 2 * n);
        const double min_gap = kt.min_abs_diff(state.zb(), state.zr(), n);
        traj.min_gap_seen = std::min(traj.min_gap_seen, min_gap);
        traj.signs_preserved = traj.signs_preserved && signs_match(system, state.zb(), state.zr());
        current = unpack(system, state, current);

        bool record = traj.accepted_steps % params.record_stride == 0;
        if (spd > 0.0 && t > 0.0 &&
            (t_old <= 0.0 || std::floor(spd * std::log10(t)) > std::floor(spd * std::log10(t_old))))
            record = true;
        if (record)
            traj.samples.push_back(make_sample(system, t, current, e, grad_norm, options.tracked));
        last_recorded = record;

        if (options.progress && options.progress_every > 0 && traj.accepted_steps % options.progress_every == 0)
            options.progress(record ? traj.samples.back()
                                    : make_sample(system, t, current, e, grad_norm, options.tracked));
    }

    if (!last_recorded)
        traj.samples.push_back(make_sample(system, t, current, e, grad_norm, options.tracked));
    if (traj.accepted_steps == 0)
        traj.max_energy_increase = 0.0;
    return traj;
}

} // namespace tangleflow
