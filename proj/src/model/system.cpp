#include <string>

#include "tangleflow/error.hpp"
#include "tangleflow/model.hpp"

namespace tangleflow {
namespace {

Adjacency build_adjacency(std::size_t n, std::span<const QuotientEdge> edges)
{
    Adjacency adj;
    adj.offsets.assign(n + 1, 0);
    for (const QuotientEdge& e : edges) {
        if (e.from == e.to)
            continue;
        ++adj.offsets[e.from + 1];
        ++adj.offsets[e.to + 1];
    }
    for (std::size_t v = 0; v < n; ++v)
        adj.offsets[v + 1] += adj.offsets[v];
    adj.neighbors.resize(adj.offsets[n]);
    std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
    for (const QuotientEdge& e : edges) {
        if (e.from == e.to)
            continue;
        adj.neighbors[fill[e.from]++] = e.to;
        adj.neighbors[fill[e.to]++] = e.from;
    }
    return adj;
}

Matrix laplacian_of(std::size_t n, std::span<const QuotientEdge> edges)
{
    Matrix lap(n, n);
    for (const QuotientEdge& e : edges) {
        if (e.from == e.to)
            continue;
        lap(e.from, e.to) += 1.0;
        lap(e.to, e.from) += 1.0;
        lap(e.from, e.from) -= 1.0;
        lap(e.to, e.to) -= 1.0;
    }
    return lap;
}

} // namespace

System::System(ModelKind kind, PeriodicQuotientGraph graph, CrossingMap crossing, Adjacency blue, Adjacency red,
               LaplacianSet laplacians)
    : kind_(kind), graph_(std::move(graph)), crossing_(std::move(crossing)), blue_adj_(std::move(blue)),
      red_adj_(std::move(red)), laplacians_(std::move(laplacians))
{
    planar_ = tangleflow::harmonic_planar_coordinates(graph_);
    sign_values_.resize(crossing_.size());
    for (VertexId v = 0; v < crossing_.size(); ++v)
        sign_values_[v] = static_cast<double>(crossing_[v]);
}

EntangledSystem::EntangledSystem(PeriodicQuotientGraph graph, CrossingMap crossing, Adjacency adjacency,
                                 LaplacianSet laplacians)
    : System(ModelKind::EntangledGraph, std::move(graph), std::move(crossing), adjacency, adjacency,
             std::move(laplacians))
{
}

WeaveSystem::WeaveSystem(WeaveDesign design, PeriodicQuotientGraph graph, CrossingMap crossing, Adjacency blue,
                         Adjacency red, LaplacianSet laplacians)
    : System(ModelKind::Weave, std::move(graph), std::move(crossing), std::move(blue), std::move(red),
             std::move(laplacians)),
      design_(std::move(design))
{
}

EntangledSystem build_entangled_system(PeriodicQuotientGraph graph, CrossingMap crossing)
{
    if (crossing.size() != graph.vertex_count())
        throw Error(ErrorCode::MismatchedVertexSet, "crossing map has " + std::to_string(crossing.size()) +
                                                        " entries for " + std::to_string(graph.vertex_count()) +
                                                        " vertices");
    const std::size_t n = graph.vertex_count();
    Adjacency adj = build_adjacency(n, graph.edges());
    LaplacianSet laps{laplacian_of(n, graph.edges()), std::nullopt, std::nullopt};
    return EntangledSystem(std::move(graph), std::move(crossing), std::move(adj), std::move(laps));
}

WeaveSystem build_weave_system(WeaveDesign design)
{
    const std::size_t nb = design.n_blue();
    const std::size_t nr = design.n_red();
    const double s = design.spacing();

    std::vector<QuotientEdge> blue_edges;
    std::vector<QuotientEdge> red_edges;
    blue_edges.reserve(nb * nr);
    red_edges.reserve(nb * nr);
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nr; ++j) {
            // Along blue thread i (vertical): v_{i,j} -> v_{i,j+1}, wrapping by the second period.
            blue_edges.push_back({design.vertex(i, j), design.vertex(i, (j + 1) % nr), {0, j + 1 == nr ? 1 : 0}});
            // Along red thread j (horizontal): v_{i,j} -> v_{i+1,j}, wrapping by the first period.
            red_edges.push_back({design.vertex(i, j), design.vertex((i + 1) % nb, j), {i + 1 == nb ? 1 : 0, 0}});
        }

    std::vector<QuotientEdge> all = blue_edges;
    all.insert(all.end(), red_edges.begin(), red_edges.end());
    const LatticeBasis basis{Vec2{static_cast<double>(nb) * s, 0.0}, Vec2{0.0, static_cast<double>(nr) * s}};
    PeriodicQuotientGraph graph(nb * nr, std::move(all), basis);

    const std::size_t n = nb * nr;
    LaplacianSet laps{laplacian_of(n, graph.edges()), laplacian_of(n, blue_edges), laplacian_of(n, red_edges)};
    Adjacency blue = build_adjacency(n, blue_edges);
    Adjacency red = build_adjacency(n, red_edges);
    CrossingMap crossing(std::vector<int>(design.signs().begin(), design.signs().end()));
    return WeaveSystem(std::move(design), std::move(graph), std::move(crossing), std::move(blue), std::move(red),
                       std::move(laps));
}

std::vector<Vec2> harmonic_planar_coordinates(const System& system)
{
    return std::vector<Vec2>(system.planar().begin(), system.planar().end());
}

} // namespace tangleflow
