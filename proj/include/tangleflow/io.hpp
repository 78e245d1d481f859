#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tangleflow/dynamics.hpp"
#include "tangleflow/model.hpp"

namespace tangleflow {

/// Parsed design file. Exactly one of (graph, crossing) or weave is set,
/// according to `kind`.
struct DesignFile {
    ModelKind kind = ModelKind::EntangledGraph;
    std::optional<PeriodicQuotientGraph> graph;
    std::optional<CrossingMap> crossing;
    std::optional<WeaveDesign> weave;

    std::optional<std::vector<double>> z_blue;
    std::optional<std::vector<double>> z_red;
    std::optional<std::uint64_t> seed;
    std::optional<double> gap_scale;
    /// `flow KEY VALUE` lines in file order.
    std::vector<std::pair<std::string, double>> flow;

    /// Defaults overridden by the `flow` lines.
    FlowParams flow_params() const;

    friend bool operator==(const DesignFile&, const DesignFile&) = default;
};

/// Keys accepted by `flow KEY VALUE`.
std::span<const std::string_view> flow_keys() noexcept;

/// Throws ParseError with SyntaxError (malformed line, unknown directive) or
/// SemanticError (well-formed but invalid content).
DesignFile parse_design(std::string_view text);
/// Canonical text form; parse_design(serialize_design(d)) == d.
std::string serialize_design(const DesignFile& design);
/// Reads and parses a file. Throws IoError or ParseError.
DesignFile load_design(const std::filesystem::path& path);

std::unique_ptr<System> build_system(const DesignFile& design);

/// Heights from the file when present, else a seeded random start
/// (seed: override, then file, then 1; gap scale: file, then 1).
Configuration initial_configuration(const DesignFile& design, const System& system,
                                    std::optional<std::uint64_t> seed_override = std::nullopt);

/// Formats with 17 significant digits.
std::string format_number(double value);

/// CSV: t,energy,grad_norm,min_gap,M_B,M_R[,M_W1..M_WK], one row per sample.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
/// Throws IoError (also for an empty trajectory).
void export_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);

/// JSON document with vertex records (x, y, z_blue, z_red, sign) and either
/// edge records (graphs) or thread polylines (weaves).
std::string configuration_json(const System& system, const Configuration& config);
/// Throws IoError.
void export_configuration(const System& system, const Configuration& config, const std::filesystem::path& path);

} // namespace tangleflow
