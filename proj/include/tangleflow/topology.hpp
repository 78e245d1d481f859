#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "tangleflow/model.hpp"

namespace tangleflow {

enum class Entanglement { Entangled, Untangled };

std::string_view to_string(Entanglement e) noexcept;

/// Entangled iff the crossing map takes both values.
Entanglement classify_entangled_graph(const EntangledSystem& system);
Entanglement classify_crossings(const CrossingMap& crossing);

/// Two blue and two red threads whose crossings alternate in sign around the
/// cycle v(i1,j1), v(i1,j2), v(i2,j2), v(i2,j1). Indices are 0-based, i1 < i2, j1 < j2.
struct MinimalWeavedComponent {
    std::array<std::size_t, 2> blue_pair{};
    std::array<std::size_t, 2> red_pair{};
    /// sign at v(i1, j1)
    int orientation = 1;

    friend bool operator==(const MinimalWeavedComponent&, const MinimalWeavedComponent&) = default;
};

/// All minimal weaved components, in lexicographic (i1, i2, j1, j2) order.
std::vector<MinimalWeavedComponent> minimal_weaved_components(const WeaveDesign& design);
inline std::vector<MinimalWeavedComponent> minimal_weaved_components(const WeaveSystem& weave)
{
    return minimal_weaved_components(weave.design());
}

struct WeavelyConnectedComponents {
    /// Thread unions over chains of components sharing a thread, ordered by
    /// their smallest blue thread.
    std::vector<ThreadSet> components;
    /// Threads in no minimal weaved component.
    ThreadSet singles;
};

WeavelyConnectedComponents weavely_connected_components(const WeaveDesign& design);
inline WeavelyConnectedComponents weavely_connected_components(const WeaveSystem& weave)
{
    return weavely_connected_components(weave.design());
}

enum class ComponentKind { WeavelyConnected, SingleUntangledThreads };

struct TangleComponent {
    ThreadSet threads;
    ComponentKind kind = ComponentKind::WeavelyConnected;

    friend bool operator==(const TangleComponent&, const TangleComponent&) = default;
};

/// Components W_1..W_K ordered from top to bottom.
struct TangleDecomposition {
    std::vector<TangleComponent> components;
    /// weights[k] = number of crossings between W_{k+1} and its complement
    std::vector<long> weights;
    /// Set when the order between two components was not forced by any
    /// crossing and was broken by lowest thread index.
    bool order_ambiguous = false;

    std::size_t size() const noexcept { return components.size(); }
    bool entangled() const noexcept { return components.size() == 1; }
};

/// Unique tangle decomposition with height order.
///
/// Throws InconsistentHeightOrder, naming a cycle of crossings, when no
/// stacking of the components is compatible with the signs.
TangleDecomposition tangle_decomposition(const WeaveDesign& design);
inline TangleDecomposition tangle_decomposition(const WeaveSystem& weave) { return tangle_decomposition(weave.design()); }

/// w_k for 1-based k. Throws IndexOutOfRange.
long boundary_weight(const TangleDecomposition& decomposition, std::size_t k);

/// Checks the height-order law at every crossing: for every prefix union
/// U = W_1 ∪ ... ∪ W_k, blue in U over red outside is +1 and blue outside
/// under red in U is -1.
bool satisfies_height_order(const WeaveDesign& design, const TangleDecomposition& decomposition);

/// "{b1,b2|r1,r2}" with 1-based thread numbers.
std::string format_threads(const ThreadSet& threads);

/// "untangled, K=2: W1={b1,b2|r1,r2}, W2={b3,b4|r3,r4}"
std::string format_decomposition(const TangleDecomposition& decomposition);

} // namespace tangleflow
