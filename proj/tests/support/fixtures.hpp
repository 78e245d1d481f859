#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tangleflow/io.hpp"
#include "tangleflow/model.hpp"

namespace fixtures {

using namespace tangleflow;

inline std::string design_path(const std::string& name)
{
    return std::string(TANGLEFLOW_DESIGN_DIR) + "/" + name;
}

inline DesignFile design(const std::string& name) { return load_design(design_path(name)); }

inline std::unique_ptr<System> system_of(const std::string& name) { return build_system(design(name)); }

inline WeaveSystem weave_of(const std::string& name) { return build_weave_system(*design(name).weave); }

/// Two vertices joined by two parallel edges, one of them wrapping around
/// the first period of the unit square lattice.
inline PeriodicQuotientGraph two_cycle()
{
    return PeriodicQuotientGraph(2, {{0, 1, {0, 0}}, {0, 1, {1, 0}}}, {Vec2{1, 0}, Vec2{0, 1}});
}

inline EntangledSystem two_vertex(int s0, int s1) { return build_entangled_system(two_cycle(), CrossingMap({s0, s1})); }

inline WeaveDesign plain_weave(std::size_t n)
{
    std::vector<int> s(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            s[i * n + j] = (i + j) % 2 == 0 ? 1 : -1;
    return WeaveDesign(n, n, s);
}

inline std::vector<int> random_signs(std::mt19937_64& rng, std::size_t n)
{
    std::bernoulli_distribution coin(0.5);
    std::vector<int> s(n);
    for (int& x : s)
        x = coin(rng) ? 1 : -1;
    return s;
}

/// Connected random quotient graph: a random spanning tree plus extra edges,
/// shifts drawn from {-1, 0, 1}^2, occasional shifted self-loops.
inline PeriodicQuotientGraph random_graph(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_int_distribution<int> shift(-1, 1);
    std::vector<QuotientEdge> edges;
    for (std::size_t v = 1; v < n; ++v) {
        std::uniform_int_distribution<std::size_t> parent(0, v - 1);
        edges.push_back({parent(rng), v, {shift(rng), shift(rng)}});
    }
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    const std::size_t extra = n / 2 + 2;
    for (std::size_t k = 0; k < extra; ++k) {
        const std::size_t u = any(rng);
        const std::size_t v = any(rng);
        LatticeShift s{shift(rng), shift(rng)};
        if (u == v && s.is_zero())
            s = {1, 0};
        edges.push_back({u, v, s});
    }
    std::uniform_real_distribution<double> skew(-0.4, 0.4);
    return PeriodicQuotientGraph(n, std::move(edges), {Vec2{1.0, 0.0}, Vec2{skew(rng), 1.0}});
}

inline EntangledSystem random_graph_system(std::mt19937_64& rng, std::size_t max_n = 12)
{
    std::uniform_int_distribution<std::size_t> size(2, max_n);
    const std::size_t n = size(rng);
    return build_entangled_system(random_graph(rng, n), CrossingMap(random_signs(rng, n)));
}

inline WeaveSystem random_weave_system(std::mt19937_64& rng, std::size_t max_threads = 6)
{
    std::uniform_int_distribution<std::size_t> size(1, max_threads);
    const std::size_t nb = size(rng);
    const std::size_t nr = size(rng);
    return build_weave_system(WeaveDesign(nb, nr, random_signs(rng, nb * nr)));
}

} // namespace fixtures
