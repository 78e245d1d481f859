#include <cmath>
#include <numeric>
#include <string>

#include "tangleflow/error.hpp"
#include "tangleflow/model.hpp"

namespace tangleflow {
namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v)
{
    while (parent[v] != v) {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    return v;
}

} // namespace

PeriodicQuotientGraph::PeriodicQuotientGraph(std::size_t vertex_count, std::vector<QuotientEdge> edges,
                                             LatticeBasis basis)
    : vertex_count_(vertex_count), edges_(std::move(edges)), basis_(basis), degree_(vertex_count, 0)
{
    if (vertex_count_ == 0)
        throw Error(ErrorCode::InvalidGraph, "quotient graph has no vertices");

    const double det = basis_[0].x * basis_[1].y - basis_[0].y * basis_[1].x;
    const double scale = std::sqrt(squared_norm(basis_[0]) * squared_norm(basis_[1]));
    if (!std::isfinite(det) || !(std::fabs(det) > 1e-12 * std::max(scale, 1e-300)))
        throw Error(ErrorCode::InvalidLattice, "lattice basis vectors are linearly dependent");

    std::vector<std::size_t> parent(vertex_count_);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const QuotientEdge& edge = edges_[e];
        if (edge.from >= vertex_count_ || edge.to >= vertex_count_)
            throw Error(ErrorCode::InvalidGraph, "edge " + std::to_string(e) + " references a missing vertex");
        if (edge.from == edge.to && edge.shift.is_zero())
            throw Error(ErrorCode::InvalidGraph, "edge " + std::to_string(e) + " is a self-loop with zero shift",
                        edge.from);
        ++degree_[edge.from];
        ++degree_[edge.to];
        parent[find_root(parent, edge.from)] = find_root(parent, edge.to);
    }
    for (VertexId v = 0; v < vertex_count_; ++v)
        if (degree_[v] == 0)
            throw Error(ErrorCode::InvalidGraph, "vertex " + std::to_string(v) + " has no incident edge", v);
    const std::size_t root = find_root(parent, 0);
    for (VertexId v = 1; v < vertex_count_; ++v)
        if (find_root(parent, v) != root)
            throw Error(ErrorCode::DisconnectedGraph, "vertex " + std::to_string(v) + " is not reachable from vertex 0",
                        v);
}

Vec2 PeriodicQuotientGraph::translation(LatticeShift shift) const noexcept
{
    return static_cast<double>(shift.a) * basis_[0] + static_cast<double>(shift.b) * basis_[1];
}

CrossingMap::CrossingMap(std::vector<int> signs) : signs_(std::move(signs))
{
    for (std::size_t v = 0; v < signs_.size(); ++v) {
        if (signs_[v] == 0)
            throw Error(ErrorCode::ZeroSignEntry, "crossing sign of vertex " + std::to_string(v) + " is zero", v);
        if (signs_[v] != 1 && signs_[v] != -1)
            throw Error(ErrorCode::InvalidArgument, "crossing sign of vertex " + std::to_string(v) + " is not ±1", v);
    }
}

WeaveDesign::WeaveDesign(std::size_t n_blue, std::size_t n_red, std::vector<int> signs, double spacing)
    : n_blue_(n_blue), n_red_(n_red), signs_(std::move(signs)), spacing_(spacing)
{
    if (n_blue_ < 1 || n_red_ < 1)
        throw Error(ErrorCode::DegenerateSize, "a weave needs at least one thread of each colour");
    if (signs_.size() != n_blue_ * n_red_)
        throw Error(ErrorCode::InvalidArgument, "sign matrix has " + std::to_string(signs_.size()) +
                                                    " entries, expected " + std::to_string(n_blue_ * n_red_));
    for (std::size_t k = 0; k < signs_.size(); ++k) {
        if (signs_[k] == 0)
            throw Error(ErrorCode::ZeroSignEntry, "sign(" + std::to_string(k / n_red_ + 1) + ", " +
                                                      std::to_string(k % n_red_ + 1) + ") is zero");
        if (signs_[k] != 1 && signs_[k] != -1)
            throw Error(ErrorCode::InvalidArgument, "sign entries must be ±1");
    }
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
        throw Error(ErrorCode::InvalidArgument, "thread spacing must be positive");
}

void apply_laplacian(const Adjacency& adj, std::span<const double> z, std::span<double> out)
{
    const std::size_t n = adj.size();
    for (VertexId u = 0; u < n; ++u) {
        const double zu = z[u];
        double acc = 0.0;
        for (VertexId v : adj.of(u))
            acc += z[v] - zu;
        out[u] = acc;
    }
}

Matrix graph_laplacian(const PeriodicQuotientGraph& graph)
{
    const std::size_t n = graph.vertex_count();
    Matrix lap(n, n);
    for (const QuotientEdge& e : graph.edges()) {
        if (e.from == e.to)
            continue;
        lap(e.from, e.to) += 1.0;
        lap(e.to, e.from) += 1.0;
        lap(e.from, e.from) -= 1.0;
        lap(e.to, e.to) -= 1.0;
    }
    return lap;
}

std::vector<Vec2> harmonic_planar_coordinates(const PeriodicQuotientGraph& graph)
{
    // Stationarity: Σ_{edges at u} (x(v) + T(shift) - x(u)) = 0, i.e. Δ x = -b
    // with b(u) = Σ outgoing translations. Δ has the constants as kernel; adding
    // -11ᵀ/n makes it definite and forces Σ x = 0 because Σ b = 0.
    const std::size_t n = graph.vertex_count();
    Matrix a = graph_laplacian(graph);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) -= 1.0 / static_cast<double>(n);

    Matrix rhs(n, 2);
    for (const QuotientEdge& e : graph.edges()) {
        const Vec2 t = graph.translation(e.shift);
        rhs(e.from, 0) -= t.x;
        rhs(e.from, 1) -= t.y;
        rhs(e.to, 0) += t.x;
        rhs(e.to, 1) += t.y;
    }
    const Matrix sol = solve(std::move(a), std::move(rhs));
    std::vector<Vec2> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = {sol(i, 0), sol(i, 1)};
    return x;
}

} // namespace tangleflow
