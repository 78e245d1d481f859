#include <algorithm>
#include <cmath>

#include "tangleflow/analysis.hpp"
#include "tangleflow/error.hpp"

namespace tangleflow {

HeightSymmetry vertex_symmetry(const std::vector<VertexId>& permutation)
{
    const std::size_t n = permutation.size();
    std::vector<bool> hit(n, false);
    HeightSymmetry g;
    g.image.resize(2 * n);
    for (VertexId v = 0; v < n; ++v) {
        if (permutation[v] >= n || hit[permutation[v]])
            throw Error(ErrorCode::InvalidArgument, "vertex map is not a permutation");
        hit[permutation[v]] = true;
        g.image[v] = permutation[v];
        g.image[n + v] = n + permutation[v];
    }
    return g;
}

HeightSymmetry weave_quarter_turn(const WeaveDesign& design)
{
    if (design.n_blue() != design.n_red())
        throw Error(ErrorCode::InvalidArgument, "the quarter turn needs a square weave");
    const std::size_t n = design.n_blue();
    const std::size_t count = n * n;
    HeightSymmetry g;
    g.image.resize(2 * count);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const VertexId v = design.vertex(i, j);
            const VertexId w = design.vertex(n - 1 - j, i);
            g.image[v] = count + w;
            g.image[count + v] = w;
        }
    return g;
}

bool preserves_crossings(const CrossingMap& crossing, const HeightSymmetry& g)
{
    const std::size_t n = crossing.size();
    if (g.image.size() != 2 * n)
        return false;
    for (VertexId v = 0; v < n; ++v) {
        const std::size_t img = g.image[v];
        const VertexId w = img % n;
        const bool swaps = img >= n;
        // The partner slot must land on the same image vertex, other colour.
        if (g.image[n + v] != (swaps ? w : n + w))
            return false;
        if (crossing[w] != (swaps ? -crossing[v] : crossing[v]))
            return false;
    }
    return true;
}

double symmetry_residual(const Configuration& config, const HeightSymmetry& g)
{
    const std::size_t n = config.size();
    if (g.image.size() != 2 * n)
        throw Error(ErrorCode::InvalidArgument, "symmetry does not match the configuration size");
    auto z = [&](std::size_t slot) { return slot < n ? config.z_blue()[slot] : config.z_red()[slot - n]; };
    double r = 0.0;
    for (std::size_t p = 0; p < 2 * n; ++p)
        r = std::max(r, std::fabs(z(g.image[p]) - z(p)));
    return r;
}

} // namespace tangleflow
