#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tangleflow/matrix.hpp"

namespace tangleflow {

using VertexId = std::size_t;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) noexcept = default;
};

inline double squared_norm(Vec2 v) noexcept { return v.x * v.x + v.y * v.y; }

/// Integer coordinates of a translation in the rank-2 period lattice.
struct LatticeShift {
    int a = 0;
    int b = 0;

    bool is_zero() const noexcept { return a == 0 && b == 0; }
    LatticeShift operator-() const noexcept { return {-a, -b}; }
    friend bool operator==(LatticeShift, LatticeShift) noexcept = default;
};

/// Edge from `from` to the copy of `to` translated by `shift`.
struct QuotientEdge {
    VertexId from = 0;
    VertexId to = 0;
    LatticeShift shift;

    friend bool operator==(const QuotientEdge&, const QuotientEdge&) noexcept = default;
};

using LatticeBasis = std::array<Vec2, 2>;

/// Finite quotient of a 2-periodic plane graph. Vertices are 0..n-1.
///
/// Invariants (checked on construction): connected as a multigraph when
/// shifts are ignored, every vertex has an incident edge, no self-loop with a
/// zero shift, and linearly independent basis vectors. Parallel edges and
/// shifted self-loops are allowed.
class PeriodicQuotientGraph {
public:
    PeriodicQuotientGraph(std::size_t vertex_count, std::vector<QuotientEdge> edges, LatticeBasis basis);

    std::size_t vertex_count() const noexcept { return vertex_count_; }
    std::span<const QuotientEdge> edges() const noexcept { return edges_; }
    const LatticeBasis& basis() const noexcept { return basis_; }

    Vec2 translation(LatticeShift shift) const noexcept;
    /// Number of edge ends at v; a shifted self-loop counts twice.
    std::size_t degree(VertexId v) const noexcept { return degree_[v]; }

    friend bool operator==(const PeriodicQuotientGraph&, const PeriodicQuotientGraph&) = default;

private:
    std::size_t vertex_count_;
    std::vector<QuotientEdge> edges_;
    LatticeBasis basis_;
    std::vector<std::size_t> degree_;
};

/// Over/under information: +1 where the blue copy passes over, -1 where red does.
class CrossingMap {
public:
    CrossingMap() = default;
    explicit CrossingMap(std::vector<int> signs);

    std::size_t size() const noexcept { return signs_.size(); }
    int operator[](VertexId v) const noexcept { return signs_[v]; }
    std::span<const int> values() const noexcept { return signs_; }

    friend bool operator==(const CrossingMap&, const CrossingMap&) = default;

private:
    std::vector<int> signs_;
};

/// Periodic two-family weave: blue thread i crosses red thread j at v_{i,j},
/// with the blue thread on top when sign(i, j) = +1.
class WeaveDesign {
public:
    WeaveDesign(std::size_t n_blue, std::size_t n_red, std::vector<int> signs, double spacing = 1.0);

    std::size_t n_blue() const noexcept { return n_blue_; }
    std::size_t n_red() const noexcept { return n_red_; }
    double spacing() const noexcept { return spacing_; }
    int sign(std::size_t blue, std::size_t red) const noexcept { return signs_[blue * n_red_ + red]; }
    std::span<const int> signs() const noexcept { return signs_; }

    VertexId vertex(std::size_t blue, std::size_t red) const noexcept { return blue * n_red_ + red; }
    std::size_t blue_of(VertexId v) const noexcept { return v / n_red_; }
    std::size_t red_of(VertexId v) const noexcept { return v % n_red_; }

    friend bool operator==(const WeaveDesign&, const WeaveDesign&) = default;

private:
    std::size_t n_blue_;
    std::size_t n_red_;
    std::vector<int> signs_;
    double spacing_;
};

/// Sparse neighbour lists of a Laplacian, parallel edges repeated, self-loops
/// dropped (they do not contribute to z-differences).
struct Adjacency {
    std::vector<std::size_t> offsets; // size n + 1
    std::vector<VertexId> neighbors;

    std::size_t size() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::span<const VertexId> of(VertexId v) const noexcept
    {
        return {neighbors.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
};

/// Graph Laplacians in the A - D (negative semidefinite) convention.
/// `blue`/`red` are the per-family Laplacians and only exist for weaves,
/// in which case graph = blue + red.
struct LaplacianSet {
    Matrix graph;
    std::optional<Matrix> blue;
    std::optional<Matrix> red;
};

/// Adds (Δ z)(u) = Σ_{v ~ u} (z(v) - z(u)) into `out` (overwrites).
void apply_laplacian(const Adjacency& adj, std::span<const double> z, std::span<double> out);

/// Threads of a subweave, by 0-based index within each family.
struct ThreadSet {
    std::vector<std::size_t> blue;
    std::vector<std::size_t> red;

    bool empty() const noexcept { return blue.empty() && red.empty(); }
    std::size_t size() const noexcept { return blue.size() + red.size(); }
    friend bool operator==(const ThreadSet&, const ThreadSet&) = default;
};

enum class ModelKind { EntangledGraph, Weave };

/// Validated, immutable simulation input: quotient graph, crossing map,
/// Laplacians and the fixed harmonic planar coordinates.
class System {
public:
    ModelKind kind() const noexcept { return kind_; }
    bool is_weave() const noexcept { return kind_ == ModelKind::Weave; }
    std::size_t vertex_count() const noexcept { return graph_.vertex_count(); }

    const PeriodicQuotientGraph& graph() const noexcept { return graph_; }
    const CrossingMap& crossing() const noexcept { return crossing_; }
    const LaplacianSet& laplacians() const noexcept { return laplacians_; }

    /// Neighbour lists driving z_blue (graph edges, or blue-thread edges for weaves).
    const Adjacency& blue_adjacency() const noexcept { return blue_adj_; }
    /// Neighbour lists driving z_red (graph edges, or red-thread edges for weaves).
    const Adjacency& red_adjacency() const noexcept { return red_adj_; }

    /// Harmonic planar realization, barycenter at the origin.
    std::span<const Vec2> planar() const noexcept { return planar_; }
    /// S(v) as ±1.0, for the numeric kernels.
    std::span<const double> sign_values() const noexcept { return sign_values_; }

protected:
    System(ModelKind kind, PeriodicQuotientGraph graph, CrossingMap crossing, Adjacency blue, Adjacency red,
           LaplacianSet laplacians);

private:
    ModelKind kind_;
    PeriodicQuotientGraph graph_;
    CrossingMap crossing_;
    Adjacency blue_adj_;
    Adjacency red_adj_;
    LaplacianSet laplacians_;
    std::vector<Vec2> planar_;
    std::vector<double> sign_values_;
};

class EntangledSystem : public System {
private:
    friend EntangledSystem build_entangled_system(PeriodicQuotientGraph, CrossingMap);
    EntangledSystem(PeriodicQuotientGraph graph, CrossingMap crossing, Adjacency adjacency, LaplacianSet laplacians);
};

class WeaveSystem : public System {
public:
    const WeaveDesign& design() const noexcept { return design_; }

private:
    friend WeaveSystem build_weave_system(WeaveDesign);
    WeaveSystem(WeaveDesign design, PeriodicQuotientGraph graph, CrossingMap crossing, Adjacency blue, Adjacency red,
                LaplacianSet laplacians);
    WeaveDesign design_;
};

EntangledSystem build_entangled_system(PeriodicQuotientGraph graph, CrossingMap crossing);

/// Quotient of the two-family line grid: blue thread i is the vertical line
/// x = i * spacing, red thread j the horizontal line y = j * spacing, and the
/// period lattice is spanned by (N_b * spacing, 0) and (0, N_r * spacing).
WeaveSystem build_weave_system(WeaveDesign design);

/// Laplacian (A - D) of a quotient multigraph, edge multiplicities counted.
Matrix graph_laplacian(const PeriodicQuotientGraph& graph);

/// Stationary point of the planar heat flow: every vertex at the
/// shift-corrected mean of its neighbours, barycenter pinned to the origin.
std::vector<Vec2> harmonic_planar_coordinates(const PeriodicQuotientGraph& graph);
std::vector<Vec2> harmonic_planar_coordinates(const System& system);

/// z-heights of both copies over fixed planar coordinates.
///
/// Sign consistency sign(z_blue(v) - z_red(v)) = S(v), strict, is enforced on
/// construction, as is finiteness of every value.
class Configuration {
public:
    Configuration(std::vector<Vec2> x, std::vector<double> z_blue, std::vector<double> z_red,
                  const CrossingMap& crossing);

    std::size_t size() const noexcept { return z_blue_.size(); }
    std::span<const Vec2> x() const noexcept { return x_; }
    std::span<const double> z_blue() const noexcept { return z_blue_; }
    std::span<const double> z_red() const noexcept { return z_red_; }

    /// d(v) = z_blue(v) - z_red(v)
    double gap(VertexId v) const noexcept { return z_blue_[v] - z_red_[v]; }
    /// m(v) = z_blue(v) + z_red(v)
    double mid(VertexId v) const noexcept { return z_blue_[v] + z_red_[v]; }

    double min_abs_gap() const noexcept;
    /// Σ_v (z_blue(v) + z_red(v))
    double total_height() const noexcept;
    double mean_blue() const noexcept;
    double mean_red() const noexcept;

private:
    std::vector<Vec2> x_;
    std::vector<double> z_blue_;
    std::vector<double> z_red_;
};

Configuration make_configuration(const System& system, std::vector<double> z_blue, std::vector<double> z_red);

/// Deterministic random start: z_blue = S (g + u), z_red = -S (g + w) with u, w
/// uniform on [0, g], then shifted so that Σ (z_blue + z_red) = 0.
Configuration random_initial_configuration(const System& system, std::uint64_t seed, double gap_scale);

/// Subweave barycenter M_W: sum of z_blue over all crossings of the
/// blue threads in `threads` plus sum of z_red over all crossings of its red
/// threads (a sum, not a mean).
double subweave_barycenter(const WeaveSystem& system, const Configuration& config, const ThreadSet& threads);

} // namespace tangleflow
