#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tangleflow/error.hpp"
#include "tangleflow/io.hpp"

namespace tangleflow {

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out)
{
    const std::size_t k = trajectory.samples.empty() ? 0 : trajectory.front().m_components.size();
    out << "t,energy,grad_norm,min_gap,M_B,M_R";
    for (std::size_t c = 0; c < k; ++c)
        out << ",M_W" << c + 1;
    out << '\n';
    for (const Sample& s : trajectory.samples) {
        out << format_number(s.t) << ',' << format_number(s.energy) << ',' << format_number(s.grad_norm) << ','
            << format_number(s.min_gap) << ',' << format_number(s.m_blue) << ',' << format_number(s.m_red);
        for (double m : s.m_components)
            out << ',' << format_number(m);
        out << '\n';
    }
}

void export_trajectory(const Trajectory& trajectory, const std::filesystem::path& path)
{
    if (trajectory.samples.empty())
        throw Error(ErrorCode::IoError, "refusing to write an empty trajectory");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    write_trajectory_csv(trajectory, out);
    out.flush();
    if (!out)
        throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

std::string configuration_json(const System& system, const Configuration& config)
{
    using json = nlohmann::ordered_json;
    json doc;
    doc["kind"] = system.is_weave() ? "weave" : "entangled-graph";
    const auto& basis = system.graph().basis();
    doc["basis"] = {{basis[0].x, basis[0].y}, {basis[1].x, basis[1].y}};
    json vertices = json::array();
    for (VertexId v = 0; v < config.size(); ++v)
        vertices.push_back({{"id", v},
                            {"x", config.x()[v].x},
                            {"y", config.x()[v].y},
                            {"z_blue", config.z_blue()[v]},
                            {"z_red", config.z_red()[v]},
                            {"sign", system.crossing()[v]}});
    doc["vertices"] = std::move(vertices);

    if (system.is_weave()) {
        const WeaveDesign& w = static_cast<const WeaveSystem&>(system).design();
        json threads = json::array();
        for (std::size_t i = 0; i < w.n_blue(); ++i) {
            json path = json::array();
            for (std::size_t j = 0; j < w.n_red(); ++j)
                path.push_back(w.vertex(i, j));
            threads.push_back({{"color", "blue"}, {"index", i + 1}, {"vertices", path}, {"closing_shift", {0, 1}}});
        }
        for (std::size_t j = 0; j < w.n_red(); ++j) {
            json path = json::array();
            for (std::size_t i = 0; i < w.n_blue(); ++i)
                path.push_back(w.vertex(i, j));
            threads.push_back({{"color", "red"}, {"index", j + 1}, {"vertices", path}, {"closing_shift", {1, 0}}});
        }
        doc["threads"] = std::move(threads);
    } else {
        json edges = json::array();
        for (const QuotientEdge& e : system.graph().edges())
            edges.push_back({{"from", e.from}, {"to", e.to}, {"shift", {e.shift.a, e.shift.b}}});
        doc["edges"] = std::move(edges);
    }
    return doc.dump(2) + "\n";
}

void export_configuration(const System& system, const Configuration& config, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << configuration_json(system, config);
    out.flush();
    if (!out)
        throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

} // namespace tangleflow
