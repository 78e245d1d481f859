#include "tangleflow/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "tangleflow/analysis.hpp"
#include "tangleflow/io.hpp"
#include "tangleflow/kernels.hpp"
#include "tangleflow/topology.hpp"

namespace tangleflow {
namespace {

/// Raised for bad user input discovered after CLI parsing (exit code 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void setup_logging()
{
    auto logger = spdlog::stderr_logger_st("tangleflow");
    logger->set_pattern("[%l] %v");
    const char* env = std::getenv("TANGLEFLOW_LOG");
    const std::string level = env ? env : "info";
    if (level == "quiet")
        logger->set_level(spdlog::level::off);
    else if (level == "debug")
        logger->set_level(spdlog::level::debug);
    else {
        logger->set_level(spdlog::level::info);
        if (level != "info")
            logger->warn("unknown TANGLEFLOW_LOG value '{}', using info", level);
    }
    spdlog::set_default_logger(logger);
}

bool has_flow_key(const DesignFile& d, std::string_view key)
{
    for (const auto& kv : d.flow)
        if (kv.first == key)
            return true;
    return false;
}

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> t_max;
    std::optional<double> grad_tol;
    std::optional<double> dt_init;
    std::optional<double> dt_max;
    std::optional<std::size_t> record_stride;
};

void add_run_options(CLI::App* cmd, RunOptions& o)
{
    cmd->add_option("--seed", o.seed, "Seed of the random initial heights (overrides heights in the file)");
    cmd->add_option("--t-max", o.t_max, "Integration horizon")->check(CLI::PositiveNumber);
    cmd->add_option("--grad-tol", o.grad_tol, "Convergence threshold on the flow sup-norm")->check(CLI::PositiveNumber);
    cmd->add_option("--dt-init", o.dt_init, "Initial step size")->check(CLI::PositiveNumber);
    cmd->add_option("--dt-max", o.dt_max, "Largest step size")->check(CLI::PositiveNumber);
    cmd->add_option("--record-stride", o.record_stride, "Record every n-th accepted step")->check(CLI::PositiveNumber);
}

FlowParams resolve_params(const DesignFile& d, const RunOptions& o, double default_t_max)
{
    FlowParams p = d.flow_params();
    if (!has_flow_key(d, "t_max"))
        p.t_max = default_t_max;
    if (o.t_max)
        p.t_max = *o.t_max;
    if (o.grad_tol)
        p.grad_tol = *o.grad_tol;
    if (o.dt_max)
        p.dt_max = *o.dt_max;
    if (o.dt_init)
        p.dt_init = *o.dt_init;
    if (o.record_stride)
        p.record_stride = *o.record_stride;
    try {
        p.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return p;
}

IntegrateOptions tracking_options(const System& system)
{
    IntegrateOptions opt;
    if (system.is_weave()) {
        try {
            for (const TangleComponent& c : tangle_decomposition(static_cast<const WeaveSystem&>(system)).components)
                opt.tracked.push_back(c.threads);
        } catch (const Error& e) {
            spdlog::warn("no component barycenters recorded: {}", e.what());
        }
    }
    opt.progress_every = 100000;
    opt.progress = [](const Sample& s) {
        spdlog::info("t={} energy={} grad_norm={} min_gap={}", format_number(s.t), format_number(s.energy),
                     format_number(s.grad_norm), format_number(s.min_gap));
    };
    return opt;
}

Trajectory run(const System& system, const Configuration& c0, const FlowParams& p, const IntegrateOptions& opt)
{
    spdlog::debug("kernels: {}", kernels::active().name);
    spdlog::info("integrating {} vertices to t_max={}", system.vertex_count(), format_number(p.t_max));
    Trajectory tr = integrate(system, c0, p, opt);
    spdlog::info("{} at t={} after {} accepted / {} rejected steps", to_string(tr.termination),
                 format_number(tr.back().t), tr.accepted_steps, tr.rejected_steps);
    return tr;
}

int cmd_classify(const DesignFile& d)
{
    auto system = build_system(d);
    if (!system->is_weave()) {
        std::cout << to_string(classify_crossings(system->crossing())) << '\n';
        return kExitOk;
    }
    const TangleDecomposition td = tangle_decomposition(static_cast<const WeaveSystem&>(*system));
    std::cout << format_decomposition(td) << '\n';
    if (td.order_ambiguous)
        spdlog::warn("component order not forced by any crossing; ties broken by thread index");
    return kExitOk;
}

int cmd_relax(const DesignFile& d, const RunOptions& o, const std::string& out_traj, const std::string& out_config)
{
    auto system = build_system(d);
    const FlowParams p = resolve_params(d, o, 1e3);
    const Configuration c0 = initial_configuration(d, *system, o.seed);
    const Trajectory tr = run(*system, c0, p, tracking_options(*system));
    const Sample& last = tr.back();
    std::cout << "termination " << to_string(tr.termination) << '\n'
              << "t " << format_number(last.t) << '\n'
              << "accepted_steps " << tr.accepted_steps << '\n'
              << "rejected_steps " << tr.rejected_steps << '\n'
              << "initial_energy " << format_number(tr.initial_energy) << '\n'
              << "energy " << format_number(last.energy) << '\n'
              << "grad_norm " << format_number(last.grad_norm) << '\n'
              << "min_gap " << format_number(last.min_gap) << '\n'
              << "M_B " << format_number(last.m_blue) << '\n'
              << "M_R " << format_number(last.m_red) << '\n';
    if (!out_traj.empty()) {
        export_trajectory(tr, out_traj);
        spdlog::info("trajectory written to {}", out_traj);
    }
    if (!out_config.empty()) {
        export_configuration(*system, last.config, out_config);
        spdlog::info("configuration written to {}", out_config);
    }
    return kExitOk;
}

int cmd_scaling(const DesignFile& d, const RunOptions& o, std::optional<double> t_lo, std::optional<double> t_hi)
{
    auto system = build_system(d);
    FlowParams p = resolve_params(d, o, 1e5);
    p.samples_per_decade = std::max<std::size_t>(p.samples_per_decade, 20);
    if (!o.record_stride && !has_flow_key(d, "record_stride"))
        p.record_stride = 1000000;
    std::vector<Series> series;
    std::optional<TangleDecomposition> td;
    if (system->is_weave()) {
        td = tangle_decomposition(static_cast<const WeaveSystem&>(*system));
        if (td->entangled())
            throw Error(ErrorCode::EntangledInput, "scaling needs an untangled design");
    } else if (classify_crossings(system->crossing()) == Entanglement::Entangled) {
        throw Error(ErrorCode::EntangledInput, "scaling needs an untangled design");
    }
    const Configuration c0 = initial_configuration(d, *system, o.seed);
    const Trajectory tr = run(*system, c0, p, tracking_options(*system));
    series = separation_series(*system, tr);
    for (const Series& s : series) {
        const double hi = t_hi.value_or(s.t.back());
        const double lo = t_lo.value_or(hi / 100.0);
        const ScalingReport r = fit_power_law(s, lo, hi);
        std::cout << "series " << r.series_name << " slope " << format_number(r.slope) << " intercept "
                  << format_number(r.intercept) << " r_squared " << format_number(r.r_squared) << " window "
                  << format_number(r.t_lo) << ' ' << format_number(r.t_hi) << " samples " << r.sample_count << '\n';
    }
    if (td) {
        const auto& weave = static_cast<const WeaveSystem&>(*system);
        for (std::size_t k = 0; k < td->size(); ++k)
            std::cout << "flatness W" << k + 1 << ' '
                      << format_number(flatness_series(weave, tr, td->components[k].threads).value.back()) << '\n';
    } else {
        std::cout << "flatness blue " << format_number(flatness_series(*system, tr, Copy::Blue).value.back()) << '\n'
                  << "flatness red " << format_number(flatness_series(*system, tr, Copy::Red).value.back()) << '\n';
    }
    return kExitOk;
}

void print_spectrum(const char* name, const Matrix& l)
{
    const SpectralData sd = eigendecompose(l);
    std::cout << name;
    for (double lambda : sd.eigenvalues)
        std::cout << ' ' << format_number(lambda);
    std::cout << '\n';
}

int cmd_spectrum(const DesignFile& d)
{
    auto system = build_system(d);
    const LaplacianSet& l = system->laplacians();
    print_spectrum("lambda_X", l.graph);
    if (system->is_weave()) {
        print_spectrum("lambda_B", *l.blue);
        print_spectrum("lambda_R", *l.red);
        const double c = commutation_check(static_cast<const WeaveSystem&>(*system));
        std::cout << "commutator " << format_number(c) << '\n';
        return c == 0.0 ? kExitOk : kExitViolation;
    }
    return kExitOk;
}

int cmd_verify(const DesignFile& d, const RunOptions& o)
{
    auto system = build_system(d);
    FlowParams p = resolve_params(d, o, 1e3);
    if (!o.record_stride)
        p.record_stride = 1;
    const std::uint64_t seed = o.seed.value_or(d.seed.value_or(1));
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        all_ok = all_ok && ok;
    };

    std::vector<Trajectory> runs;
    for (std::uint64_t s : {seed, seed + 1}) {
        const Configuration c0 = random_initial_configuration(*system, s, d.gap_scale.value_or(1.0));
        runs.push_back(run(*system, c0, p, tracking_options(*system)));
    }
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const Trajectory& tr = runs[k];
        const std::string tag = " (seed " + std::to_string(seed + k) + ")";
        const double slack = 1e-12 * std::fabs(tr.initial_energy);
        report("energy monotone" + tag, tr.max_energy_increase <= slack,
               "max step increase " + format_number(tr.max_energy_increase));
        double drift = 0.0;
        bool drift_ok = true;
        const double m0 = tr.front().m_total;
        for (const Sample& s : tr.samples) {
            const double dm = std::fabs(s.m_total - m0);
            drift = std::max(drift, dm);
            drift_ok = drift_ok && dm <= 1e-8 * (1.0 + s.t);
        }
        report("barycenter conserved" + tag, drift_ok, "max drift " + format_number(drift));
        report("gap floor" + tag, tr.min_gap_seen >= tr.gap_floor,
               "min gap " + format_number(tr.min_gap_seen) + " vs floor " + format_number(tr.gap_floor));
        report("crossing signs preserved" + tag, tr.signs_preserved, tr.signs_preserved ? "yes" : "no");
    }

    bool entangled = classify_crossings(system->crossing()) == Entanglement::Entangled;
    if (system->is_weave()) {
        try {
            entangled = tangle_decomposition(static_cast<const WeaveSystem&>(*system)).entangled();
        } catch (const Error& e) {
            report("height order", false, e.what());
        }
    }
    if (entangled) {
        if (!runs[0].converged() || !runs[1].converged()) {
            report("unique limit", false, "a run did not converge by t_max");
        } else {
            const LimitComparison cmp = compare_limits(runs[0], runs[1], 1e-4);
            report("unique limit", cmp.within_tolerance, "aligned distance " + format_number(cmp.residual));
        }
    } else {
        std::cout << "SKIP unique limit: untangled input drifts apart and has no limit\n";
    }
    return all_ok ? kExitOk : kExitViolation;
}

} // namespace

int cli_main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"Relaxation and topology of periodic entangled graphs and weaves"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tangleflow 1.0");

    std::string file;
    RunOptions run_opts;
    std::string out_traj;
    std::string out_config;
    std::optional<double> t_lo;
    std::optional<double> t_hi;

    auto* classify = app.add_subcommand("classify", "Entangled/untangled verdict and tangle decomposition");
    classify->add_option("file", file, "Design file")->required();

    auto* relax = app.add_subcommand("relax", "Integrate the flow and report the final state");
    relax->add_option("file", file, "Design file")->required();
    add_run_options(relax, run_opts);
    relax->add_option("--out-traj", out_traj, "Write the trajectory as CSV");
    relax->add_option("--out-config", out_config, "Write the final configuration as JSON");

    auto* scaling = app.add_subcommand("scaling", "Fit the separation power law of an untangled design");
    scaling->add_option("file", file, "Design file")->required();
    add_run_options(scaling, run_opts);
    scaling->add_option("--t-lo", t_lo, "Start of the fit window")->check(CLI::PositiveNumber);
    scaling->add_option("--t-hi", t_hi, "End of the fit window")->check(CLI::PositiveNumber);

    auto* spectrum = app.add_subcommand("spectrum", "Laplacian eigenvalues and the commutator norm");
    spectrum->add_option("file", file, "Design file")->required();

    auto* verify = app.add_subcommand("verify", "Run the invariant suite on two seeded runs");
    verify->add_option("file", file, "Design file")->required();
    add_run_options(verify, run_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    DesignFile design;
    try {
        design = load_design(file);
    } catch (const Error& e) {
        std::cerr << file << ": " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*classify)
            return cmd_classify(design);
        if (*relax)
            return cmd_relax(design, run_opts, out_traj, out_config);
        if (*scaling)
            return cmd_scaling(design, run_opts, t_lo, t_hi);
        if (*spectrum)
            return cmd_spectrum(design);
        return cmd_verify(design, run_opts);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::IoError ? kExitUsage : kExitViolation;
    }
}

} // namespace tangleflow
