#include <algorithm>
#include <numeric>
#include <optional>
#include <string>

#include "tangleflow/error.hpp"
#include "tangleflow/topology.hpp"

namespace tangleflow {
namespace {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }

    std::size_t find(std::size_t v)
    {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
};

std::size_t lowest_thread(const ThreadSet& t)
{
    // Blue threads rank before red ones with the same number.
    std::size_t best = static_cast<std::size_t>(-1);
    for (std::size_t i : t.blue)
        best = std::min(best, 2 * i);
    for (std::size_t j : t.red)
        best = std::min(best, 2 * j + 1);
    return best;
}

std::string thread_name(bool blue, std::size_t index)
{
    return (blue ? "b" : "r") + std::to_string(index + 1);
}

} // namespace

std::string_view to_string(Entanglement e) noexcept
{
    return e == Entanglement::Entangled ? "entangled" : "untangled";
}

Entanglement classify_crossings(const CrossingMap& crossing)
{
    bool pos = false;
    bool neg = false;
    for (int s : crossing.values()) {
        pos = pos || s > 0;
        neg = neg || s < 0;
    }
    return pos && neg ? Entanglement::Entangled : Entanglement::Untangled;
}

Entanglement classify_entangled_graph(const EntangledSystem& system)
{
    return classify_crossings(system.crossing());
}

std::vector<MinimalWeavedComponent> minimal_weaved_components(const WeaveDesign& design)
{
    std::vector<MinimalWeavedComponent> out;
    const std::size_t nb = design.n_blue();
    const std::size_t nr = design.n_red();
    for (std::size_t i1 = 0; i1 < nb; ++i1)
        for (std::size_t i2 = i1 + 1; i2 < nb; ++i2)
            for (std::size_t j1 = 0; j1 < nr; ++j1)
                for (std::size_t j2 = j1 + 1; j2 < nr; ++j2) {
                    const int s = design.sign(i1, j1);
                    if (design.sign(i2, j2) == s && design.sign(i1, j2) == -s && design.sign(i2, j1) == -s)
                        out.push_back({{i1, i2}, {j1, j2}, s});
                }
    return out;
}

WeavelyConnectedComponents weavely_connected_components(const WeaveDesign& design)
{
    const std::size_t nb = design.n_blue();
    const std::size_t nr = design.n_red();
    // Threads as union-find nodes: blue i -> i, red j -> nb + j. Two minimal
    // components sharing a thread end up in one set, which is exactly the
    // connectivity of the meta-graph.
    UnionFind uf(nb + nr);
    std::vector<bool> covered(nb + nr, false);
    for (const MinimalWeavedComponent& c : minimal_weaved_components(design)) {
        const std::size_t nodes[4] = {c.blue_pair[0], c.blue_pair[1], nb + c.red_pair[0], nb + c.red_pair[1]};
        for (std::size_t n : nodes) {
            covered[n] = true;
            uf.unite(nodes[0], n);
        }
    }

    WeavelyConnectedComponents result;
    std::vector<std::optional<std::size_t>> slot(nb + nr);
    for (std::size_t t = 0; t < nb + nr; ++t) {
        if (!covered[t]) {
            if (t < nb)
                result.singles.blue.push_back(t);
            else
                result.singles.red.push_back(t - nb);
            continue;
        }
        const std::size_t root = uf.find(t);
        if (!slot[root]) {
            slot[root] = result.components.size();
            result.components.emplace_back();
        }
        ThreadSet& set = result.components[*slot[root]];
        if (t < nb)
            set.blue.push_back(t);
        else
            set.red.push_back(t - nb);
    }
    return result;
}

TangleDecomposition tangle_decomposition(const WeaveDesign& design)
{
    const std::size_t nb = design.n_blue();
    const std::size_t nr = design.n_red();
    const WeavelyConnectedComponents wcc = weavely_connected_components(design);

    struct Node {
        ThreadSet threads;
        ComponentKind kind;
    };
    std::vector<Node> nodes;
    std::vector<std::size_t> blue_node(nb);
    std::vector<std::size_t> red_node(nr);
    for (const ThreadSet& c : wcc.components) {
        for (std::size_t i : c.blue)
            blue_node[i] = nodes.size();
        for (std::size_t j : c.red)
            red_node[j] = nodes.size();
        nodes.push_back({c, ComponentKind::WeavelyConnected});
    }
    for (std::size_t i : wcc.singles.blue) {
        blue_node[i] = nodes.size();
        nodes.push_back({ThreadSet{{i}, {}}, ComponentKind::SingleUntangledThreads});
    }
    for (std::size_t j : wcc.singles.red) {
        red_node[j] = nodes.size();
        nodes.push_back({ThreadSet{{}, {j}}, ComponentKind::SingleUntangledThreads});
    }

    // above[a][b] holds a crossing forcing node a above node b.
    const std::size_t m = nodes.size();
    std::vector<std::vector<std::optional<std::pair<std::size_t, std::size_t>>>> above(
        m, std::vector<std::optional<std::pair<std::size_t, std::size_t>>>(m));
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nr; ++j) {
            const std::size_t a = blue_node[i];
            const std::size_t c = red_node[j];
            if (a == c)
                continue;
            auto& slot = design.sign(i, j) > 0 ? above[a][c] : above[c][a];
            if (!slot)
                slot = std::pair{i, j};
        }

    std::vector<std::size_t> indegree(m, 0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (above[a][b])
                ++indegree[b];

    TangleDecomposition result;
    std::vector<bool> done(m, false);
    std::size_t remaining = m;
    while (remaining > 0) {
        std::vector<std::size_t> sources;
        for (std::size_t a = 0; a < m; ++a)
            if (!done[a] && indegree[a] == 0)
                sources.push_back(a);

        if (sources.empty()) {
            // Walk predecessors inside the remaining subgraph until a node repeats.
            std::size_t cur = 0;
            while (done[cur])
                ++cur;
            std::vector<std::size_t> path;
            std::vector<std::optional<std::size_t>> seen(m);
            while (!seen[cur]) {
                seen[cur] = path.size();
                path.push_back(cur);
                for (std::size_t p = 0; p < m; ++p)
                    if (!done[p] && above[p][cur]) {
                        cur = p;
                        break;
                    }
            }
            std::vector<std::size_t> cycle(path.begin() + static_cast<std::ptrdiff_t>(*seen[cur]), path.end());
            std::reverse(cycle.begin(), cycle.end());
            std::string msg = "crossing signs admit no height order; cycle:";
            for (std::size_t k = 0; k < cycle.size(); ++k) {
                const std::size_t a = cycle[k];
                const std::size_t b = cycle[(k + 1) % cycle.size()];
                const auto [i, j] = *above[a][b];
                msg += " " + format_threads(nodes[a].threads) + " above " + format_threads(nodes[b].threads) +
                       " at (" + thread_name(true, i) + "," + thread_name(false, j) + ")";
                if (k + 1 < cycle.size())
                    msg += ";";
            }
            throw Error(ErrorCode::InconsistentHeightOrder, msg);
        }

        std::vector<std::size_t> level;
        const bool same_color_singles = std::all_of(sources.begin(), sources.end(), [&](std::size_t a) {
            const Node& n = nodes[a];
            const Node& f = nodes[sources.front()];
            return n.kind == ComponentKind::SingleUntangledThreads && n.threads.blue.empty() == f.threads.blue.empty();
        });
        if (sources.size() == 1 || same_color_singles) {
            level = sources;
        } else {
            result.order_ambiguous = true;
            level.push_back(*std::min_element(sources.begin(), sources.end(), [&](std::size_t a, std::size_t b) {
                return lowest_thread(nodes[a].threads) < lowest_thread(nodes[b].threads);
            }));
        }

        TangleComponent comp{{}, nodes[level.front()].kind};
        for (std::size_t a : level) {
            const ThreadSet& t = nodes[a].threads;
            comp.threads.blue.insert(comp.threads.blue.end(), t.blue.begin(), t.blue.end());
            comp.threads.red.insert(comp.threads.red.end(), t.red.begin(), t.red.end());
            done[a] = true;
            --remaining;
            for (std::size_t b = 0; b < m; ++b)
                if (above[a][b])
                    --indegree[b];
        }
        std::sort(comp.threads.blue.begin(), comp.threads.blue.end());
        std::sort(comp.threads.red.begin(), comp.threads.red.end());
        result.components.push_back(std::move(comp));
    }

    const std::size_t k_count = result.components.size();
    std::vector<std::size_t> blue_comp(nb);
    std::vector<std::size_t> red_comp(nr);
    for (std::size_t k = 0; k < k_count; ++k) {
        for (std::size_t i : result.components[k].threads.blue)
            blue_comp[i] = k;
        for (std::size_t j : result.components[k].threads.red)
            red_comp[j] = k;
    }
    result.weights.assign(k_count, 0);
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nr; ++j)
            if (blue_comp[i] != red_comp[j]) {
                ++result.weights[blue_comp[i]];
                ++result.weights[red_comp[j]];
            }
    return result;
}

long boundary_weight(const TangleDecomposition& decomposition, std::size_t k)
{
    if (k < 1 || k > decomposition.weights.size())
        throw Error(ErrorCode::IndexOutOfRange, "component " + std::to_string(k) + " outside 1.." +
                                                    std::to_string(decomposition.weights.size()));
    return decomposition.weights[k - 1];
}

bool satisfies_height_order(const WeaveDesign& design, const TangleDecomposition& decomposition)
{
    const std::size_t nb = design.n_blue();
    const std::size_t nr = design.n_red();
    std::vector<std::optional<std::size_t>> blue_comp(nb);
    std::vector<std::optional<std::size_t>> red_comp(nr);
    for (std::size_t k = 0; k < decomposition.components.size(); ++k) {
        for (std::size_t i : decomposition.components[k].threads.blue) {
            if (i >= nb || blue_comp[i])
                return false;
            blue_comp[i] = k;
        }
        for (std::size_t j : decomposition.components[k].threads.red) {
            if (j >= nr || red_comp[j])
                return false;
            red_comp[j] = k;
        }
    }
    for (std::size_t i = 0; i < nb; ++i)
        if (!blue_comp[i])
            return false;
    for (std::size_t j = 0; j < nr; ++j)
        if (!red_comp[j])
            return false;
    // For the prefix law it suffices that a crossing between different
    // components has the sign of "upper component on top".
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nr; ++j) {
            if (*blue_comp[i] == *red_comp[j])
                continue;
            const int expected = *blue_comp[i] < *red_comp[j] ? 1 : -1;
            if (design.sign(i, j) != expected)
                return false;
        }
    return true;
}

std::string format_threads(const ThreadSet& threads)
{
    std::string s = "{";
    for (std::size_t k = 0; k < threads.blue.size(); ++k)
        s += (k ? "," : "") + thread_name(true, threads.blue[k]);
    s += "|";
    for (std::size_t k = 0; k < threads.red.size(); ++k)
        s += (k ? "," : "") + thread_name(false, threads.red[k]);
    return s + "}";
}

std::string format_decomposition(const TangleDecomposition& decomposition)
{
    std::string s = decomposition.entangled() ? "entangled" : "untangled";
    s += ", K=" + std::to_string(decomposition.size()) + ":";
    for (std::size_t k = 0; k < decomposition.size(); ++k)
        s += (k ? ", W" : " W") + std::to_string(k + 1) + "=" + format_threads(decomposition.components[k].threads);
    return s;
}

} // namespace tangleflow
