#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "tangleflow/dynamics.hpp"
#include "tangleflow/error.hpp"

using namespace tangleflow;

namespace {

/// z_blue = S (1 + 0.1 (v mod 3)), z_red = -S (1 + 0.05 v)
Configuration test_heights(const System& sys)
{
    const std::size_t n = sys.vertex_count();
    std::vector<double> zb(n);
    std::vector<double> zr(n);
    for (std::size_t v = 0; v < n; ++v) {
        const double s = sys.crossing()[v];
        zb[v] = s * (1.0 + 0.1 * static_cast<double>(v % 3));
        zr[v] = -s * (1.0 + 0.05 * static_cast<double>(v));
    }
    return make_configuration(sys, zb, zr);
}

Configuration perturbed(const System& sys, const Configuration& c, std::size_t slot, double h)
{
    std::vector<double> zb(c.z_blue().begin(), c.z_blue().end());
    std::vector<double> zr(c.z_red().begin(), c.z_red().end());
    const std::size_t n = sys.vertex_count();
    (slot < n ? zb[slot] : zr[slot - n]) += h;
    return make_configuration(sys, zb, zr);
}

double max_rel_fd_error(const System& sys, const Configuration& c)
{
    const FlowField g = gradient(sys, c);
    const std::size_t n = sys.vertex_count();
    double worst = 0.0;
    for (std::size_t slot = 0; slot < 2 * n; ++slot) {
        const double h = 1e-6 * std::max(1.0, std::fabs(slot < n ? c.z_blue()[slot] : c.z_red()[slot - n]));
        const double fd =
            (energy(sys, perturbed(sys, c, slot, h)) - energy(sys, perturbed(sys, c, slot, -h))) / (2.0 * h);
        const double analytic = -(slot < n ? g.blue[slot] : g.red[slot - n]);
        worst = std::max(worst, std::fabs(fd - analytic) / std::max(1.0, std::fabs(analytic)));
    }
    return worst;
}

template <class F>
ErrorCode code_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("weave energy matches the independent oracle")
{
    const WeaveSystem w = build_weave_system(fixtures::plain_weave(4));
    const Configuration c = test_heights(w);
    CHECK(energy(w, c) == doctest::Approx(237.78865301110702).epsilon(1e-13));
    CHECK(energy_weave(w, c) == energy(w, c));
    CHECK(planar_energy(w, c.x()) == doctest::Approx(32.0).epsilon(1e-13));
    CHECK(code_of([&] { energy_entangled(w, c); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("two-vertex energy")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    const double a = 0.3;
    const Configuration c = make_configuration(sys, {a, -a}, {-a, a});
    // 16 a^2 + 1/a plus the planar energy of the harmonic placement, 2 (1/2)^2.
    CHECK(energy(sys, c) == doctest::Approx(16 * a * a + 1 / a + 0.5).epsilon(1e-14));
    CHECK(code_of([&] { energy_weave(sys, c); }) == ErrorCode::InvalidArgument);
}


TEST_CASE("gradient matches central differences")
{
    std::mt19937_64 rng(23);
    for (int k = 0; k < 20; ++k) {
        const WeaveSystem w = fixtures::random_weave_system(rng, 5);
        CHECK(max_rel_fd_error(w, random_initial_configuration(w, 100 + k, 0.5)) <= 1e-6);
        const EntangledSystem g = fixtures::random_graph_system(rng, 8);
        CHECK(max_rel_fd_error(g, random_initial_configuration(g, 200 + k, 0.5)) <= 1e-6);
    }
}

TEST_CASE("gradient is the stated closed form on the two-vertex system")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    const double a = 0.4;
    const FlowField g = gradient(sys, make_configuration(sys, {a, -a}, {-a, a}));
    // 2 L z_blue = 2 * 2 * (-2a, 2a); r = (1, -1) / (2a)^2.
    const double r = 1.0 / (4 * a * a);
    CHECK(g.blue[0] == doctest::Approx(-8 * a + r));
    CHECK(g.blue[1] == doctest::Approx(8 * a - r));
    CHECK(g.red[0] == doctest::Approx(8 * a - r));
    CHECK(g.red[1] == doctest::Approx(-8 * a + r));
}

TEST_CASE("flow parameter validation")
{
    FlowParams p;
    CHECK_NOTHROW(p.validate());
    p.gap_safety = 1.0;
    CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
    p = FlowParams{};
    p.dt_init = 1.0;
    CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
    p = FlowParams{};
    p.record_stride = 0;
    CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
    p = FlowParams{};
    p.t_max = -1.0;
    CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("single RK4 step decreases the energy")
{
    const WeaveSystem w = build_weave_system(fixtures::plain_weave(4));
    const Configuration c = test_heights(w);
    const Configuration next = step(w, c, 1e-3);
    CHECK(energy(w, next) < energy(w, c));
    CHECK(next.total_height() == doctest::Approx(c.total_height()).epsilon(1e-12));
    CHECK(code_of([&] { step(w, c, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("gap guard trips on an oversized step")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    const Configuration c = make_configuration(sys, {0.005, -5.0}, {-0.005, 5.0});
    CHECK(energy(sys, c) == doctest::Approx(200.8).epsilon(1e-3));
    CHECK(code_of([&] { step(sys, c, 1.0); }) == ErrorCode::GapGuardTripped);
    CHECK_NOTHROW(step(sys, c, 1e-7));
}

TEST_CASE("step underflow carries the last accepted state")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    const Configuration c = make_configuration(sys, {0.005, -5.0}, {-0.005, 5.0});
    FlowParams p;
    p.dt_init = p.dt_min = p.dt_max = 1.0;
    p.stability_margin = 0.0;
    try {
        integrate(sys, c, p);
        FAIL("expected StepUnderflowError");
    } catch (const StepUnderflowError& e) {
        CHECK(e.code() == ErrorCode::StepUnderflow);
        CHECK(e.time() == 0.0);
        CHECK(e.dt() == 0.5);
        CHECK(e.snapshot().z_blue()[1] == -5.0);
    }
}

TEST_CASE("invalid initial configurations are rejected")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    const EntangledSystem other = fixtures::two_vertex(1, 1);
    const Configuration wrong_signs = make_configuration(other, {1, 1}, {-1, -1});
    CHECK(code_of([&] { integrate(sys, wrong_signs, FlowParams{}); }) == ErrorCode::InvalidInitial);
    const WeaveSystem w = build_weave_system(fixtures::plain_weave(2));
    CHECK(code_of([&] { integrate(sys, random_initial_configuration(w, 1, 1.0), FlowParams{}); }) ==
          ErrorCode::InvalidInitial);
    IntegrateOptions opt;
    opt.tracked = {ThreadSet{{0}, {}}};
    CHECK(code_of([&] { integrate(sys, make_configuration(sys, {1, -1}, {-1, 1}), FlowParams{}, opt); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("two-vertex system relaxes to the closed-form stationary point")
{
    const EntangledSystem sys = fixtures::two_vertex(1, -1);
    const Trajectory tr = integrate(sys, make_configuration(sys, {1, -1}, {-1, 1}), FlowParams{});
    REQUIRE(tr.converged());
    const double a_star = std::cbrt(1.0 / 32.0);
    CHECK(tr.back().config.z_blue()[0] == doctest::Approx(a_star).epsilon(1e-8));
    CHECK(tr.back().config.z_red()[0] == doctest::Approx(-a_star).epsilon(1e-8));
    CHECK(stationarity_residual(sys, tr.back().config) <= 1e-8);
    CHECK(tr.back().grad_norm < FlowParams{}.grad_tol);
    CHECK(to_string(tr.termination) == "converged");
}

TEST_CASE("trajectory invariants on random systems")
{
    std::mt19937_64 rng(31);
    FlowParams p;
    p.t_max = 20.0;
    for (int k = 0; k < 12; ++k) {
        const bool weave = k % 2 == 0;
        std::unique_ptr<System> sys;
        if (weave)
            sys = std::make_unique<WeaveSystem>(fixtures::random_weave_system(rng, 4));
        else
            sys = std::make_unique<EntangledSystem>(fixtures::random_graph_system(rng, 8));
        const Trajectory tr = integrate(*sys, random_initial_configuration(*sys, k, 1.0), p);
        REQUIRE(tr.samples.size() >= 2);
        CHECK(tr.signs_preserved);
        CHECK(tr.min_gap_seen >= tr.gap_floor);
        CHECK(tr.max_energy_increase <= 1e-12 * std::fabs(tr.initial_energy));
        for (std::size_t i = 1; i < tr.samples.size(); ++i) {
            const Sample& s = tr.samples[i];
            CHECK(s.t > tr.samples[i - 1].t);
            CHECK(s.energy <= tr.samples[i - 1].energy + 1e-12 * std::fabs(tr.initial_energy));
            CHECK(std::fabs(s.m_total - tr.front().m_total) <= 1e-8 * (1.0 + s.t));
            CHECK(s.min_gap >= tr.gap_floor);
        }
    }
}

TEST_CASE("termination modes and recording")
{
    const WeaveSystem w = build_weave_system(fixtures::plain_weave(4));
    const Configuration c0 = random_initial_configuration(w, 3, 1.0);

    FlowParams p;
    p.max_steps = 7;
    const Trajectory limited = integrate(w, c0, p);
    CHECK(limited.termination == Termination::StepLimit);
    CHECK(limited.accepted_steps == 7);
    CHECK(limited.samples.size() == 8);

    p = FlowParams{};
    p.t_max = 0.5;
    p.record_stride = 1000000;
    const Trajectory truncated = integrate(w, c0, p);
    CHECK(truncated.termination == Termination::Truncated);
    CHECK(truncated.back().t == 0.5);
    CHECK(truncated.samples.size() == 2);

    p.t_max = 100.0;
    p.samples_per_decade = 10;
    const Trajectory logged = integrate(w, c0, p);
    // About one sample per tenth of a decade from the first step to the end.
    const double bins = std::floor(10 * std::log10(logged.back().t)) - std::floor(10 * std::log10(1e-3));
    CHECK(static_cast<double>(logged.samples.size()) >= bins - 5);
    CHECK(static_cast<double>(logged.samples.size()) <= bins + 3);
}

TEST_CASE("tracked barycenters are recorded and the planar flow stays put at equilibrium")
{
    const WeaveSystem w = fixtures::weave_of("fig2c.weave");
    IntegrateOptions opt;
    opt.tracked = {ThreadSet{{0, 1}, {0, 1}}, ThreadSet{{2, 3}, {2, 3}}};
    int calls = 0;
    opt.progress = [&](const Sample&) { ++calls; };
    opt.progress_every = 10;
    FlowParams p;
    p.t_max = 5.0;
    p.flow_planar = true;
    const Configuration c0 = random_initial_configuration(w, 1, 1.0);
    const Trajectory tr = integrate(w, c0, p, opt);
    CHECK(calls > 0);
    for (const Sample& s : tr.samples) {
        REQUIRE(s.m_components.size() == 2);
        CHECK(s.m_components[0] + s.m_components[1] == doctest::Approx(s.m_total).epsilon(1e-9));
    }
    double drift = 0.0;
    for (std::size_t v = 0; v < w.vertex_count(); ++v)
        drift = std::max(drift, std::sqrt(squared_norm(tr.back().config.x()[v] - c0.x()[v])));
    CHECK(drift <= 1e-12);
}
