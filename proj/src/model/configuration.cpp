#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "tangleflow/error.hpp"
#include "tangleflow/model.hpp"

namespace tangleflow {

Configuration::Configuration(std::vector<Vec2> x, std::vector<double> z_blue, std::vector<double> z_red,
                             const CrossingMap& crossing)
    : x_(std::move(x)), z_blue_(std::move(z_blue)), z_red_(std::move(z_red))
{
    const std::size_t n = crossing.size();
    if (x_.size() != n || z_blue_.size() != n || z_red_.size() != n)
        throw Error(ErrorCode::MismatchedVertexSet, "height maps must cover exactly the " + std::to_string(n) +
                                                        " vertices of the system");
    for (VertexId v = 0; v < n; ++v) {
        if (!std::isfinite(z_blue_[v]) || !std::isfinite(z_red_[v]) || !std::isfinite(x_[v].x) ||
            !std::isfinite(x_[v].y))
            throw Error(ErrorCode::InvalidArgument, "non-finite coordinate at vertex " + std::to_string(v), v);
        const double d = z_blue_[v] - z_red_[v];
        if (!(d * crossing[v] > 0.0))
            throw Error(ErrorCode::SignViolation,
                        d == 0.0 ? "zero gap at vertex " + std::to_string(v)
                                 : "gap sign disagrees with the crossing at vertex " + std::to_string(v),
                        v);
    }
}

double Configuration::min_abs_gap() const noexcept
{
    double m = std::numeric_limits<double>::infinity();
    for (VertexId v = 0; v < size(); ++v)
        m = std::min(m, std::fabs(gap(v)));
    return m;
}

double Configuration::total_height() const noexcept
{
    double s = 0.0;
    for (VertexId v = 0; v < size(); ++v)
        s += z_blue_[v] + z_red_[v];
    return s;
}

double Configuration::mean_blue() const noexcept
{
    double s = 0.0;
    for (double z : z_blue_)
        s += z;
    return size() == 0 ? 0.0 : s / static_cast<double>(size());
}

double Configuration::mean_red() const noexcept
{
    double s = 0.0;
    for (double z : z_red_)
        s += z;
    return size() == 0 ? 0.0 : s / static_cast<double>(size());
}

Configuration make_configuration(const System& system, std::vector<double> z_blue, std::vector<double> z_red)
{
    const std::size_t n = system.vertex_count();
    if (z_blue.size() != n || z_red.size() != n)
        throw Error(ErrorCode::MismatchedVertexSet, "height maps must have " + std::to_string(n) + " entries");
    return Configuration(harmonic_planar_coordinates(system), std::move(z_blue), std::move(z_red), system.crossing());
}

Configuration random_initial_configuration(const System& system, std::uint64_t seed, double gap_scale)
{
    if (!(gap_scale > 0.0) || !std::isfinite(gap_scale))
        throw Error(ErrorCode::InvalidArgument, "gap_scale must be positive");
    const std::size_t n = system.vertex_count();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, gap_scale);
    std::vector<double> zb(n);
    std::vector<double> zr(n);
    for (VertexId v = 0; v < n; ++v) {
        const double s = system.sign_values()[v];
        const double u = unit(rng);
        const double w = unit(rng);
        zb[v] = s * (gap_scale + u);
        zr[v] = -s * (gap_scale + w);
    }
    double total = 0.0;
    for (VertexId v = 0; v < n; ++v)
        total += zb[v] + zr[v];
    const double shift = total / (2.0 * static_cast<double>(n));
    for (VertexId v = 0; v < n; ++v) {
        zb[v] -= shift;
        zr[v] -= shift;
    }
    return make_configuration(system, std::move(zb), std::move(zr));
}

double subweave_barycenter(const WeaveSystem& system, const Configuration& config, const ThreadSet& threads)
{
    const WeaveDesign& w = system.design();
    double s = 0.0;
    for (std::size_t i : threads.blue) {
        if (i >= w.n_blue())
            throw Error(ErrorCode::IndexOutOfRange, "blue thread " + std::to_string(i) + " does not exist");
        for (std::size_t j = 0; j < w.n_red(); ++j)
            s += config.z_blue()[w.vertex(i, j)];
    }
    for (std::size_t j : threads.red) {
        if (j >= w.n_red())
            throw Error(ErrorCode::IndexOutOfRange, "red thread " + std::to_string(j) + " does not exist");
        for (std::size_t i = 0; i < w.n_blue(); ++i)
            s += config.z_red()[w.vertex(i, j)];
    }
    return s;
}

} // namespace tangleflow
