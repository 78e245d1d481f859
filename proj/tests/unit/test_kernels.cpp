#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "tangleflow/dynamics.hpp"
#include "tangleflow/kernels.hpp"

using namespace tangleflow;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v)
        x = u(rng);
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i]))
            return false;
    return true;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

struct ForceScope {
    explicit ForceScope(const kernels::KernelTable* t) { kernels::force(t); }
    ~ForceScope() { kernels::force(nullptr); }
    ForceScope(const ForceScope&) = delete;
    ForceScope& operator=(const ForceScope&) = delete;
};

} // namespace

TEST_CASE("scalar table is the reference")
{
    const kernels::KernelTable& s = kernels::scalar_table();
    CHECK(s.name == "scalar");
    const std::vector<double> zb = {2.0, -1.0, 0.5};
    const std::vector<double> zr = {1.0, 1.0, 0.25};
    const std::vector<double> sg = {1.0, -1.0, 1.0};
    std::vector<double> force(3);
    std::vector<double> inv(3);
    s.repulsion(zb.data(), zr.data(), sg.data(), force.data(), inv.data(), 3);
    CHECK(force == std::vector<double>{1.0, -0.25, 16.0});
    CHECK(inv == std::vector<double>{1.0, 0.5, 4.0});
    CHECK(s.min_abs_diff(zb.data(), zr.data(), 3) == 0.25);
    CHECK(s.max_abs(zb.data(), 3) == 2.0);
    CHECK(s.max_abs(zb.data(), 0) == 0.0);
    CHECK(s.min_abs_diff(zb.data(), zr.data(), 0) == std::numeric_limits<double>::infinity());
    std::vector<double> out(3);
    s.axpy(2.0, zb.data(), zr.data(), out.data(), 3);
    CHECK(out == std::vector<double>{5.0, -1.0, 1.25});
}

TEST_CASE("active table honours the override")
{
    {
        ForceScope scope(&kernels::scalar_table());
        CHECK(kernels::active().name == "scalar");
    }
    if (kernels::avx2_table() != nullptr) {
        ForceScope scope(kernels::avx2_table());
        CHECK(kernels::active().name == kernels::avx2_table()->name);
    }
}

TEST_CASE("AVX2 kernels are bit-identical to scalar")
{
    const kernels::KernelTable* v = kernels::avx2_table();
    if (v == nullptr) {
        MESSAGE("AVX2 unavailable; equivalence not exercised");
        return;
    }
    const kernels::KernelTable& s = kernels::scalar_table();
    std::mt19937_64 rng(71);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t n = 0; n <= 67; ++n) {
        CAPTURE(n);
        const auto zb = random_vector(rng, n, -5.0, 5.0);
        auto zr = random_vector(rng, n, -5.0, 5.0);
        std::vector<double> sg(n);
        for (std::size_t i = 0; i < n; ++i) {
            sg[i] = coin(rng) ? 1.0 : -1.0;
            if (zr[i] == zb[i])
                zr[i] += 1.0;
        }
        std::vector<double> f1(n), f2(n), g1(n), g2(n);
        s.repulsion(zb.data(), zr.data(), sg.data(), f1.data(), g1.data(), n);
        v->repulsion(zb.data(), zr.data(), sg.data(), f2.data(), g2.data(), n);
        CHECK(same_bits(f1, f2));
        CHECK(same_bits(g1, g2));

        const double a = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        s.axpy(a, zb.data(), zr.data(), f1.data(), n);
        v->axpy(a, zb.data(), zr.data(), f2.data(), n);
        CHECK(same_bits(f1, f2));

        const auto k1 = random_vector(rng, n, -1.0, 1.0);
        const auto k2 = random_vector(rng, n, -1.0, 1.0);
        const auto k3 = random_vector(rng, n, -1.0, 1.0);
        const auto k4 = random_vector(rng, n, -1.0, 1.0);
        s.rk4_combine(a / 6.0, zb.data(), k1.data(), k2.data(), k3.data(), k4.data(), f1.data(), n);
        v->rk4_combine(a / 6.0, zb.data(), k1.data(), k2.data(), k3.data(), k4.data(), f2.data(), n);
        CHECK(same_bits(f1, f2));

        CHECK(same_bits(s.max_abs(zb.data(), n), v->max_abs(zb.data(), n)));
        CHECK(same_bits(s.min_abs_diff(zb.data(), zr.data(), n), v->min_abs_diff(zb.data(), zr.data(), n)));
    }
}

TEST_CASE("whole trajectories agree bit for bit across kernel variants")
{
    const kernels::KernelTable* v = kernels::avx2_table();
    if (v == nullptr) {
        MESSAGE("AVX2 unavailable; equivalence not exercised");
        return;
    }
    std::mt19937_64 rng(73);
    FlowParams p;
    p.t_max = 10.0;
    for (int k = 0; k < 6; ++k) {
        const WeaveSystem w = fixtures::random_weave_system(rng, 7);
        const Configuration c0 = random_initial_configuration(w, k, 1.0);
        Trajectory a;
        Trajectory b;
        {
            ForceScope scope(&kernels::scalar_table());
            a = integrate(w, c0, p);
        }
        {
            ForceScope scope(v);
            b = integrate(w, c0, p);
        }
        REQUIRE(a.samples.size() == b.samples.size());
        CHECK(a.accepted_steps == b.accepted_steps);
        CHECK(a.rejected_steps == b.rejected_steps);
        for (std::size_t i = 0; i < a.samples.size(); ++i) {
            const Configuration& ca = a.samples[i].config;
            const Configuration& cb = b.samples[i].config;
            CHECK(same_bits(a.samples[i].t, b.samples[i].t));
            CHECK(same_bits(a.samples[i].energy, b.samples[i].energy));
            CHECK(same_bits({ca.z_blue().begin(), ca.z_blue().end()}, {cb.z_blue().begin(), cb.z_blue().end()}));
            CHECK(same_bits({ca.z_red().begin(), ca.z_red().end()}, {cb.z_red().begin(), cb.z_red().end()}));
        }
    }
}
