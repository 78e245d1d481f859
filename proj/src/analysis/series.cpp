#include <algorithm>
#include <cmath>
#include <string>

#include "tangleflow/analysis.hpp"
#include "tangleflow/error.hpp"

namespace tangleflow {
namespace {

ThreadSet complement(const WeaveDesign& design, const ThreadSet& set)
{
    std::vector<bool> in_blue(design.n_blue(), false);
    std::vector<bool> in_red(design.n_red(), false);
    for (std::size_t i : set.blue)
        in_blue[i] = true;
    for (std::size_t j : set.red)
        in_red[j] = true;
    ThreadSet out;
    for (std::size_t i = 0; i < design.n_blue(); ++i)
        if (!in_blue[i])
            out.blue.push_back(i);
    for (std::size_t j = 0; j < design.n_red(); ++j)
        if (!in_red[j])
            out.red.push_back(j);
    return out;
}

long cut_weight(const WeaveDesign& design, const ThreadSet& set)
{
    std::vector<bool> in_blue(design.n_blue(), false);
    std::vector<bool> in_red(design.n_red(), false);
    for (std::size_t i : set.blue)
        in_blue[i] = true;
    for (std::size_t j : set.red)
        in_red[j] = true;
    long w = 0;
    for (std::size_t i = 0; i < design.n_blue(); ++i)
        for (std::size_t j = 0; j < design.n_red(); ++j)
            if (in_blue[i] != in_red[j])
                ++w;
    return w;
}

double deviation(std::span<const double> values)
{
    double mean = 0.0;
    for (double z : values)
        mean += z;
    mean /= static_cast<double>(values.size());
    double m = 0.0;
    for (double z : values)
        m = std::max(m, std::fabs(z - mean));
    return m;
}

} // namespace

std::vector<Series> separation_series(const System& system, const Trajectory& trajectory)
{
    if (system.is_weave()) {
        const auto& weave = static_cast<const WeaveSystem&>(system);
        return separation_series(weave, trajectory, tangle_decomposition(weave));
    }
    if (classify_crossings(system.crossing()) == Entanglement::Entangled)
        throw Error(ErrorCode::EntangledInput, "separation is only defined for untangled inputs");
    Series s{"|M_B-M_R|", {}, {}};
    for (const Sample& smp : trajectory.samples) {
        s.t.push_back(smp.t);
        s.value.push_back(std::fabs(smp.m_blue - smp.m_red));
    }
    return {s};
}

std::vector<Series> separation_series(const WeaveSystem& weave, const Trajectory& trajectory,
                                      const TangleDecomposition& decomposition)
{
    if (decomposition.size() < 2)
        throw Error(ErrorCode::EntangledInput, "an entangled weave has no separating cut");
    const WeaveDesign& design = weave.design();
    std::vector<Series> out;
    ThreadSet upper;
    for (std::size_t k = 0; k + 1 < decomposition.size(); ++k) {
        const ThreadSet& c = decomposition.components[k].threads;
        upper.blue.insert(upper.blue.end(), c.blue.begin(), c.blue.end());
        upper.red.insert(upper.red.end(), c.red.begin(), c.red.end());
        const ThreadSet lower = complement(design, upper);
        const double w = static_cast<double>(cut_weight(design, upper));
        Series s{"cut" + std::to_string(k + 1), {}, {}};
        for (const Sample& smp : trajectory.samples) {
            const double mu = subweave_barycenter(weave, smp.config, upper);
            const double ml = subweave_barycenter(weave, smp.config, lower);
            s.t.push_back(smp.t);
            s.value.push_back(std::fabs(mu - ml) / w);
        }
        out.push_back(std::move(s));
    }
    return out;
}

ScalingReport fit_power_law(const Series& series, double t_lo, double t_hi)
{
    if (!(t_lo > 0.0) || !(t_lo < t_hi))
        throw Error(ErrorCode::InvalidArgument, "fit window must satisfy 0 < t_lo < t_hi");
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double t = series.t[k];
        if (t < t_lo || t > t_hi)
            continue;
        if (!(series.value[k] > 0.0))
            throw Error(ErrorCode::NonpositiveValue, series.name + ": nonpositive value at t = " + std::to_string(t));
        lx.push_back(std::log(t));
        ly.push_back(std::log(series.value[k]));
    }
    if (lx.size() < 20)
        throw Error(ErrorCode::InsufficientSamples, series.name + ": " + std::to_string(lx.size()) +
                                                        " samples in the fit window, need at least 20");
    const double m = static_cast<double>(lx.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double dx = lx[k] - mx;
        const double dy = ly[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw Error(ErrorCode::InsufficientSamples, series.name + ": all samples share one time");
    ScalingReport r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    r.t_lo = t_lo;
    r.t_hi = t_hi;
    r.sample_count = lx.size();
    r.series_name = series.name;
    return r;
}

ScalingReport fit_power_law(const Series& series)
{
    if (series.size() == 0)
        throw Error(ErrorCode::InsufficientSamples, series.name + ": empty series");
    const double t_end = series.t.back();
    return fit_power_law(series, t_end / 100.0, t_end);
}

Series flatness_series(const System& system, const Trajectory& trajectory, Copy copy)
{
    if (!trajectory.samples.empty() && trajectory.front().config.size() != system.vertex_count())
        throw Error(ErrorCode::UnknownComponent, "trajectory does not belong to this system");
    Series s{copy == Copy::Blue ? "flatness_blue" : "flatness_red", {}, {}};
    for (const Sample& smp : trajectory.samples) {
        s.t.push_back(smp.t);
        s.value.push_back(deviation(copy == Copy::Blue ? smp.config.z_blue() : smp.config.z_red()));
    }
    return s;
}

Series flatness_series(const WeaveSystem& weave, const Trajectory& trajectory, const ThreadSet& component)
{
    const WeaveDesign& d = weave.design();
    if (component.empty())
        throw Error(ErrorCode::UnknownComponent, "empty component");
    for (std::size_t i : component.blue)
        if (i >= d.n_blue())
            throw Error(ErrorCode::UnknownComponent, "blue thread " + std::to_string(i + 1) + " does not exist");
    for (std::size_t j : component.red)
        if (j >= d.n_red())
            throw Error(ErrorCode::UnknownComponent, "red thread " + std::to_string(j + 1) + " does not exist");

    Series s{"flatness" + format_threads(component), {}, {}};
    std::vector<double> heights;
    for (const Sample& smp : trajectory.samples) {
        heights.clear();
        for (std::size_t i : component.blue)
            for (std::size_t j = 0; j < d.n_red(); ++j)
                heights.push_back(smp.config.z_blue()[d.vertex(i, j)]);
        for (std::size_t j : component.red)
            for (std::size_t i = 0; i < d.n_blue(); ++i)
                heights.push_back(smp.config.z_red()[d.vertex(i, j)]);
        s.t.push_back(smp.t);
        s.value.push_back(deviation(heights));
    }
    return s;
}

double aligned_distance(const Configuration& a, const Configuration& b)
{
    if (a.size() != b.size())
        throw Error(ErrorCode::InvalidArgument, "configurations have different vertex counts");
    const double n = static_cast<double>(a.size());
    const double shift = (a.total_height() - b.total_height()) / (2.0 * n);
    double r = 0.0;
    for (VertexId v = 0; v < a.size(); ++v) {
        r = std::max(r, std::fabs(a.z_blue()[v] - (b.z_blue()[v] + shift)));
        r = std::max(r, std::fabs(a.z_red()[v] - (b.z_red()[v] + shift)));
    }
    return r;
}

LimitComparison compare_limits(const Trajectory& a, const Trajectory& b, double tol)
{
    if (!a.converged() || !b.converged())
        throw Error(ErrorCode::NotConverged, "compare_limits needs two converged trajectories");
    const double r = aligned_distance(a.back().config, b.back().config);
    return {r <= tol, r};
}

double shape_drift(const Trajectory& trajectory, double tail_fraction)
{
    if (trajectory.samples.empty())
        return 0.0;
    const Configuration& last = trajectory.back().config;
    const double t_end = trajectory.back().t;
    const double t_from = t_end * (1.0 - tail_fraction);
    auto mean_free_distance = [](const Configuration& p, const Configuration& q) {
        const double db = (p.mean_blue() - q.mean_blue());
        const double dr = (p.mean_red() - q.mean_red());
        double r = 0.0;
        for (VertexId v = 0; v < p.size(); ++v) {
            r = std::max(r, std::fabs(p.z_blue()[v] - q.z_blue()[v] - db));
            r = std::max(r, std::fabs(p.z_red()[v] - q.z_red()[v] - dr));
        }
        return r;
    };
    double drift = 0.0;
    for (const Sample& s : trajectory.samples)
        if (s.t >= t_from)
            drift = std::max(drift, mean_free_distance(s.config, last));
    return drift;
}

} // namespace tangleflow
